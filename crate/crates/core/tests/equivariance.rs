//! Isometries commute with the geodesic flow: the image of the geodesic
//! from `(p, v)` is the geodesic from `(φ(p), dφ_p v)`.

use proptest::prelude::*;

use geolab::geometry_core::{geodesic_integrate, Chart, NilChart, Sl2rChart, SolChart, TangentVector, Vector};
use geolab::hyperbolic_plane::MobiusMap;
use geolab::nil::{self, NilElement};
use geolab::sl2r::{lift_mobius, winding_map, SLPoint};
use geolab::sol::{self, SolElement, StabilizerIsometry};

const FD: f64 = 1e-6;

type PointMap = Box<dyn Fn(&Vector<3>) -> Vector<3>>;

fn differential(phi: &dyn Fn(&Vector<3>) -> Vector<3>, p: &Vector<3>, v: &Vector<3>) -> Vector<3> {
    (phi(&(p + v * FD)) - phi(&(p - v * FD))) / (2.0 * FD)
}

/// Largest coordinate gap between `φ ∘ γ` and the geodesic through the
/// pushed-forward initial data, over `[0, 3]`.
fn equivariance_gap(chart: &dyn Chart<3>, phi: &dyn Fn(&Vector<3>) -> Vector<3>, p: Vector<3>, v: Vector<3>) -> f64 {
    let tv = TangentVector::new(p, v).normalized(chart).unwrap();
    let image0 = TangentVector::new(phi(&p), differential(phi, &p, &tv.components));
    let a = geodesic_integrate(chart, &tv, 3.0, 3000).unwrap();
    let b = geodesic_integrate(chart, &image0, 3.0, 3000).unwrap();
    a.points
        .iter()
        .zip(&b.points)
        .map(|(x, y)| (phi(x) - y).amax())
        .fold(0.0, f64::max)
}

fn dir(v: [f64; 3]) -> Vector<3> {
    let v = Vector::<3>::from(v);
    if v.norm() < 1e-3 {
        Vector::<3>::new(1.0, 0.0, 0.0)
    } else {
        v
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nil_isometries(g in prop::array::uniform3(-2.0f64..2.0), p in prop::array::uniform3(-1.0f64..1.0),
                      v in prop::array::uniform3(-1.0f64..1.0), phi in -3.0f64..3.0) {
        let g = NilElement::new(g[0], g[1], g[2]);
        let maps: [PointMap; 3] = [
            Box::new(move |x| nil::left_translation(&g, &NilElement::from_vector(x)).to_vector()),
            Box::new(move |x| nil::nil_rotation(phi, &NilElement::from_vector(x)).to_vector()),
            Box::new(|x| nil::nil_reflection(&NilElement::from_vector(x)).to_vector()),
        ];
        for m in &maps {
            let gap = equivariance_gap(&NilChart, m.as_ref(), Vector::<3>::from(p), dir(v));
            prop_assert!(gap < 1e-6, "{gap}");
        }
    }

    #[test]
    fn sol_isometries(g in prop::array::uniform3(-1.0f64..1.0), p in prop::array::uniform3(-1.0f64..1.0),
                      v in prop::array::uniform3(-1.0f64..1.0), code in 0u8..8) {
        let g = SolElement::new(g[0], g[1], g[2]);
        let s = StabilizerIsometry::from_code(code).unwrap();
        let maps: [PointMap; 2] = [
            Box::new(move |x| sol::left_translation(&g, &SolElement::from_vector(x)).to_vector()),
            Box::new(move |x| s.apply(&SolElement::from_vector(x)).to_vector()),
        ];
        for m in &maps {
            let gap = equivariance_gap(&SolChart, m.as_ref(), Vector::<3>::from(p), dir(v));
            prop_assert!(gap < 1e-6, "{gap}");
        }
    }

    #[test]
    fn sl2r_lifted_mobius_and_windings(a in 0.5f64..2.0, b in -1.0f64..1.0, c in -0.5f64..0.5,
                                       reversing in any::<bool>(), wind in -7.0f64..7.0,
                                       p in (-1.0f64..1.0, 0.5f64..2.0, -3.0f64..3.0),
                                       v in prop::array::uniform3(-1.0f64..1.0)) {
        let d = (1.0 + b * c) / a;
        let mut m = MobiusMap::new(a, b, c, d).unwrap();
        if reversing {
            m = m.with_reflection();
        }
        let sl = |x: &Vector<3>| SLPoint::from_vector(x).unwrap();
        let maps: [PointMap; 2] = [
            Box::new(move |x| lift_mobius(&m, &sl(x)).to_vector()),
            Box::new(move |x| winding_map(wind, &sl(x)).to_vector()),
        ];
        for f in &maps {
            let gap = equivariance_gap(&Sl2rChart, f.as_ref(), Vector::<3>::new(p.0, p.1, p.2), dir(v));
            prop_assert!(gap < 1e-6, "{gap}");
        }
    }
}
