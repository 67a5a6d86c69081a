use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::geodesic::{BaseData, CylinderPoint, GeodesicClass, ProductGeodesic};
use crate::error::{GeoError, Result};
use crate::geometry_core::sphere::{s2xr_distance, s2xr_integrate};
use crate::geometry_core::{
    chart3, christoffel, geodesic_integrate, Chart, GeometryId, TangentVector, Vector,
};
use crate::hyperbolic_plane::{half_plane_distance, C64};

/// Initial point and velocity of a geodesic in any chart, with an optional
/// class tag (`horizontal`, `vertical`, `slant`, `parabolic`, `generic`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSpec {
    pub geometry: GeometryId,
    pub point: Vec<f64>,
    pub velocity: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

/// What [`epsilon_ball_components`] scans.
#[derive(Clone, Copy, Debug)]
pub enum BallTarget<'a> {
    Product(&'a ProductGeodesic),
    Spec(&'a GeodesicSpec),
}

/// Parameter half-width scanned for geodesics of the homogeneous charts,
/// whose returns are not bounded by a closed form.
pub const CHART_SCAN_LENGTH: f64 = 30.0;

/// Number of connected pieces of the intersection of a geodesic (as a set)
/// with the open ball of radius `eps` about `center`.
///
/// Product geodesics are scanned on their closed forms over the parameter
/// range where the ball can be met at all (one period for closed horizontal
/// geodesics). Geodesics of `SL₂~`, `Nil` and `Sol` are integrated over
/// `[−30, 30]` and distances to the center are measured in second-order
/// normal coordinates at the center.
pub fn epsilon_ball_components(target: BallTarget<'_>, center: &[f64], eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(GeoError::InvalidArgument(format!("ε must be positive, got {eps}")));
    }
    match target {
        BallTarget::Product(g) => product_components(g, center, eps),
        BallTarget::Spec(spec) => match spec.geometry {
            GeometryId::Cylinder | GeometryId::S2xR => {
                let g = product_from_spec(spec)?;
                product_components(&g, center, eps)
            }
            id => {
                let chart = chart3(id)
                    .ok_or_else(|| GeoError::Unsupported(format!("ε-balls in {id}")))?;
                chart_components(chart, spec, center, eps)
            }
        },
    }
}

/// Closed-form product geodesic with the given initial data.
pub fn product_from_spec(spec: &GeodesicSpec) -> Result<ProductGeodesic> {
    let (p, v) = (&spec.point, &spec.velocity);
    let need = spec.geometry.coords();
    if p.len() != need || v.len() != need {
        return Err(GeoError::InvalidArgument(format!("{} needs {need} coordinates", spec.geometry)));
    }
    match spec.geometry {
        GeometryId::Cylinder => ProductGeodesic::cylinder(p[0], p[1], 1.0, [v[0], v[1]]),
        GeometryId::H2xR => {
            let a = v[0].hypot(v[1]) / p[1];
            ProductGeodesic::h2xr([p[0], p[1]], v[1].atan2(v[0]), p[2], [a, v[2]])
        }
        GeometryId::S2xR => {
            let x = Vector::<3>::new(p[0], p[1], p[2]).normalize();
            let w = Vector::<3>::new(v[0], v[1], v[2]);
            let w = w - x * x.dot(&w);
            ProductGeodesic::s2xr(x.into(), w.into(), p[3], [w.norm(), v[3]])
        }
        other => Err(GeoError::Unsupported(format!("closed-form geodesics in {other}"))),
    }
}

fn product_distance(g: &ProductGeodesic, p: &[f64], c: &[f64]) -> f64 {
    match g.geometry {
        GeometryId::Cylinder => CylinderPoint::new(p[0], p[1]).distance(&CylinderPoint::new(c[0], c[1])),
        GeometryId::H2xR => half_plane_distance(C64::new(p[0], p[1]), C64::new(c[0], c[1])).hypot(p[2] - c[2]),
        GeometryId::S2xR => s2xr_distance(&Vector::<4>::from_column_slice(p), &Vector::<4>::from_column_slice(c)),
        _ => f64::INFINITY,
    }
}

fn product_components(g: &ProductGeodesic, center: &[f64], eps: f64) -> Result<usize> {
    if center.len() != g.geometry.coords() {
        return Err(GeoError::InvalidArgument("center has the wrong arity".into()));
    }
    let hc = *center.last().expect("non-empty");
    let step = eps.min(1.0) / 64.0;
    let closed = matches!(g.base, BaseData::Circle { .. } | BaseData::Sphere { .. });
    let (lo, hi, periodic) = match g.class {
        GeodesicClass::Horizontal if closed => {
            (0.0, g.base_period().expect("closed base"), true)
        }
        GeodesicClass::Horizontal => {
            let d0 = product_distance(g, &g.at(0.0), center);
            (-(d0 + eps), d0 + eps, false)
        }
        _ => {
            let b = g.speeds[1];
            let (t1, t2) = ((hc - eps - g.height) / b, (hc + eps - g.height) / b);
            (t1.min(t2), t1.max(t2), false)
        }
    };
    let n = (((hi - lo) / step).ceil() as usize).max(16);
    let inside: Vec<bool> = (0..=n)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            product_distance(g, &g.at(t), center) < eps
        })
        .collect();
    Ok(count_runs(&inside, periodic))
}

/// Runs of `true` in a sampled indicator; a periodic sequence's first and
/// last samples are the same point.
pub fn count_runs(inside: &[bool], periodic: bool) -> usize {
    let mut runs = 0;
    let mut prev = false;
    for &x in inside {
        if x && !prev {
            runs += 1;
        }
        prev = x;
    }
    if periodic && runs > 1 && inside[0] && *inside.last().expect("non-empty") {
        runs -= 1;
    }
    if periodic && runs == 0 && inside.iter().all(|&x| x) {
        runs = 1;
    }
    runs
}

/// Riemannian distance from `x` to a nearby `c`, to second order:
/// `|Δ + ½ Γ(c)(Δ, Δ)|` in the metric at `c`, `Δ = x − c`. Returns the
/// first-order value when that already exceeds `cutoff`.
pub fn local_distance<C: Chart<3> + ?Sized>(chart: &C, c: &Vector<3>, x: &Vector<3>, cutoff: f64) -> f64 {
    let g = chart.metric(c);
    let delta = x - c;
    let first = (delta.transpose() * g * delta)[(0, 0)].max(0.0).sqrt();
    if first > cutoff {
        return first;
    }
    let Ok(gamma) = christoffel(chart, c) else {
        return first;
    };
    let xi = delta + gamma.contract(&delta, &delta) * 0.5;
    (xi.transpose() * g * xi)[(0, 0)].max(0.0).sqrt()
}

fn chart_components(chart: &dyn Chart<3>, spec: &GeodesicSpec, center: &[f64], eps: f64) -> Result<usize> {
    if spec.point.len() != 3 || spec.velocity.len() != 3 || center.len() != 3 {
        return Err(GeoError::InvalidArgument("expected three coordinates".into()));
    }
    let c = Vector::<3>::from_column_slice(center);
    let v0 = TangentVector::<3>::from_slices(&spec.point, &spec.velocity)?.normalized(chart)?;
    let h = (eps / 64.0).min(1e-3);
    let n = (CHART_SCAN_LENGTH / h).ceil() as usize;
    let fwd = geodesic_integrate(chart, &v0, CHART_SCAN_LENGTH, n)?;
    let bwd = geodesic_integrate(chart, &v0.reversed(), CHART_SCAN_LENGTH, n)?;
    let inside: Vec<bool> = bwd
        .points
        .iter()
        .rev()
        .chain(fwd.points.iter().skip(1))
        .map(|x| local_distance(chart, &c, x, 2.0 * eps) < eps)
        .collect();
    Ok(count_runs(&inside, false))
}

/// A slant geodesic of `S²×ℝ` through the base point that comes back into
/// the `ε`-ball on later passes.
#[derive(Clone, Debug, Serialize)]
pub struct ReturnWitness {
    pub geodesic: ProductGeodesic,
    pub base_point: [f64; 4],
    pub rise_per_wrap: f64,
    pub components: usize,
    /// `components ≥ 2`.
    pub certified: bool,
}

/// Slant geodesic through `(1, 0, 0, 0)` rising `ε/10` per turn.
///
/// For `ε > π` a ball swallows whole turns at heights below `√(ε² − π²)`,
/// so the rise is also capped at a quarter of `ε − √(ε² − π²)`: some turn
/// then leaves the ball on the far side of the sphere and comes back.
pub fn slant_return_witness(eps: f64) -> Result<ReturnWitness> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(GeoError::InvalidArgument(format!("ε must be positive, got {eps}")));
    }
    let mut rise = eps / 10.0;
    if eps > std::f64::consts::PI {
        let full = (eps * eps - std::f64::consts::PI.powi(2)).sqrt();
        rise = rise.min(0.25 * (eps - full));
    }
    let base_point = [1.0, 0.0, 0.0, 0.0];
    let geodesic = ProductGeodesic::s2xr([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.0, [1.0, rise / TAU])?;
    let components = epsilon_ball_components(BallTarget::Product(&geodesic), &base_point, eps)?;
    Ok(ReturnWitness {
        geodesic,
        base_point,
        rise_per_wrap: rise,
        components,
        certified: components >= 2,
    })
}

/// Integrated `S²×ℝ` trajectory from a closed-form geodesic, for
/// cross-checks against the closed form.
pub fn integrate_product_s2xr(g: &ProductGeodesic, t_end: f64, n_steps: usize) -> Result<Vec<Vec<f64>>> {
    let p = Vector::<4>::from_column_slice(&g.at(0.0));
    let v = Vector::<4>::from_column_slice(&g.initial_velocity());
    let traj = s2xr_integrate(&p, &v, t_end, n_steps)?;
    Ok(traj.points.iter().map(|x| x.iter().copied().collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_cylinder_circle_meets_ball_once() {
        let g = ProductGeodesic::cylinder(0.0, 0.0, 1.0, [1.0, 0.0]).unwrap();
        for c in [0.0, 0.5, 0.99] {
            assert_eq!(epsilon_ball_components(BallTarget::Product(&g), &[c, 0.0], 0.2).unwrap(), 1);
        }
    }

    #[test]
    fn h2xr_geodesics_meet_ball_at_most_once() {
        let g = ProductGeodesic::h2xr([0.0, 1.0], 0.3, 0.0, [1.0, 0.2]).unwrap();
        let on = g.at(0.7);
        assert_eq!(epsilon_ball_components(BallTarget::Product(&g), &on, 0.1).unwrap(), 1);
        assert_eq!(epsilon_ball_components(BallTarget::Product(&g), &[5.0, 1.0, 0.0], 0.1).unwrap(), 0);
    }

    #[test]
    fn witness_returns() {
        for eps in [1.0, 0.1, 0.01] {
            let w = slant_return_witness(eps).unwrap();
            assert!(w.certified, "ε = {eps}: {} components", w.components);
            assert!((w.rise_per_wrap - eps / 10.0).abs() < 1e-15);
        }
        for eps in [3.0, 4.0, 10.0] {
            assert!(slant_return_witness(eps).unwrap().certified, "ε = {eps}");
        }
    }

    #[test]
    fn s2xr_slant_from_spec() {
        let spec = GeodesicSpec {
            geometry: GeometryId::S2xR,
            point: vec![1.0, 0.0, 0.0, 0.0],
            velocity: vec![0.0, 1.0, 0.0, 0.01 / TAU],
            class: Some("slant".into()),
        };
        let n = epsilon_ball_components(BallTarget::Spec(&spec), &[1.0, 0.0, 0.0, 0.0], 0.1).unwrap();
        assert!(n >= 2);
    }

    #[test]
    fn local_distance_is_second_order() {
        let chart = crate::geometry_core::SolChart;
        let c = Vector::<3>::new(0.0, 0.0, 0.0);
        // Along the vertical geodesic the chart coordinate is arc length.
        let x = Vector::<3>::new(0.0, 0.0, 0.05);
        assert!((local_distance(&chart, &c, &x, 1.0) - 0.05).abs() < 1e-12);
        let y = Vector::<3>::new(0.05, 0.0, 0.0);
        let d = local_distance(&chart, &c, &y, 1.0);
        assert!((d - 0.05).abs() < 1e-4);
    }

    #[test]
    fn runs() {
        assert_eq!(count_runs(&[true, false, true], false), 2);
        assert_eq!(count_runs(&[true, false, true], true), 1);
        assert_eq!(count_runs(&[false, false], true), 0);
        assert_eq!(count_runs(&[true, true], true), 1);
    }
}
