//! Model-level invariants of the hyperbolic plane checked against the
//! integrator and against each other.

use approx::assert_abs_diff_eq;
use std::f64::consts::TAU;

use proptest::prelude::*;

use geolab::geometry_core::{geodesic_integrate, H2Chart, TangentVector, Vector};
use geolab::hyperbolic_plane::{
    classify_curve, geodesic_between, klein_map, ConstantCurvatureCurve, H2Point, IdealPoint, MobiusMap, Model,
};

fn hp(u: f64, v: f64) -> H2Point {
    H2Point::half_plane(u, v).unwrap()
}

/// Largest distance of `pts` from the Euclidean line through the first and
/// last point.
fn line_residual(pts: &[[f64; 2]]) -> f64 {
    let (a, b) = (pts[0], pts[pts.len() - 1]);
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len = dx.hypot(dy);
    pts.iter()
        .map(|p| ((p[0] - a[0]) * dy - (p[1] - a[1]) * dx).abs() / len)
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integrated_geodesics_are_klein_chords(u in -2.0f64..2.0, v in 0.2f64..3.0, angle in 0.0f64..TAU) {
        let tv = TangentVector::<2>::new(Vector::<2>::new(u, v), Vector::<2>::new(angle.cos(), angle.sin()))
            .normalized(&H2Chart)
            .unwrap();
        let traj = geodesic_integrate(&H2Chart, &tv, 3.0, 3000).unwrap();
        let pts: Vec<[f64; 2]> = traj.points.iter().map(|p| klein_map(&hp(p[0], p[1]))).collect();
        prop_assert!(line_residual(&pts) < 1e-9, "{}", line_residual(&pts));
    }

    #[test]
    fn mobius_maps_preserve_distance_and_geodesics(
        a in 0.5f64..2.0, b in -2.0f64..2.0, c in -1.0f64..1.0,
        p in (-2.0f64..2.0, 0.2f64..3.0), q in (-2.0f64..2.0, 0.2f64..3.0),
    ) {
        // ad − bc = 1 with d solved for.
        let d = (1.0 + b * c) / a;
        let m = MobiusMap::new(a, b, c, d).unwrap();
        let (p, q) = (hp(p.0, p.1), hp(q.0, q.1));
        prop_assume!(p.distance(&q) > 1e-3);
        let (mp, mq) = (m.apply(&p), m.apply(&q));
        prop_assert!((mp.distance(&mq) - p.distance(&q)).abs() < 1e-9 * p.distance(&q).max(1.0));
        let image = geodesic_between(&mp, &mq).unwrap();
        let g = geodesic_between(&p, &q).unwrap();
        let (lo, hi) = (g.arc_param(p.z()), g.arc_param(q.z()));
        for i in 0..=10 {
            let z = g.point_at(lo + (hi - lo) * i as f64 / 10.0);
            prop_assert!(image.contains(&m.apply(&hp(z.re, z.im)), 1e-8));
        }
    }

    #[test]
    fn distances_agree_across_models(p in (-2.0f64..2.0, 0.2f64..3.0), q in (-2.0f64..2.0, 0.2f64..3.0)) {
        let (p, q) = (hp(p.0, p.1), hp(q.0, q.1));
        let d = p.distance(&q);
        for model in [Model::Disk, Model::Klein] {
            let (pm, qm) = (p.convert(model), q.convert(model));
            prop_assert!((pm.distance(&qm) - d).abs() < 1e-9 * d.max(1.0));
            let back = pm.convert(Model::HalfPlane);
            prop_assert!((back.z() - p.z()).norm() < 1e-10 * p.z().norm().max(1.0));
        }
    }
}

#[test]
fn curvature_does_not_depend_on_the_model() {
    let p = hp(0.3, 1.2);
    let curves = [
        ConstantCurvatureCurve::geodesic(IdealPoint::Real(-1.0), IdealPoint::Real(2.0)).unwrap(),
        ConstantCurvatureCurve::hypercycle(IdealPoint::Real(-1.0), IdealPoint::Real(2.0), 0.7).unwrap(),
        ConstantCurvatureCurve::horocycle(IdealPoint::Real(0.5), &p).unwrap(),
        ConstantCurvatureCurve::circle(&p, 0.8).unwrap(),
    ];
    for curve in curves {
        let half = classify_curve(&curve.sample(-0.5, 0.5, 201, Model::HalfPlane).unwrap(), Model::HalfPlane).unwrap();
        let disk = classify_curve(&curve.sample(-0.5, 0.5, 201, Model::Disk).unwrap(), Model::Disk).unwrap();
        assert_eq!(half.kind, disk.kind);
        assert_abs_diff_eq!(half.curvature, disk.curvature, epsilon = 1e-6);
        assert_abs_diff_eq!(half.curvature, curve.curvature(), epsilon = 1e-5);
    }
}

#[test]
fn integrated_geodesic_matches_closed_form() {
    let p = hp(0.4, 0.9);
    let tv = TangentVector::<2>::new(Vector::<2>::new(0.4, 0.9), Vector::<2>::new(0.6, 0.5))
        .normalized(&H2Chart)
        .unwrap();
    let traj = geodesic_integrate(&H2Chart, &tv, 4.0, 4000).unwrap();
    let end = traj.end_point();
    let g = geodesic_between(&p, &hp(end[0], end[1])).unwrap();
    for x in &traj.points {
        assert!(g.contains(&hp(x[0], x[1]), 1e-9));
    }
    assert_abs_diff_eq!(p.distance(&hp(end[0], end[1])), 4.0, epsilon = 1e-9);
}
