use super::chart::{christoffel, Chart, Vector};
use super::sample::CurveSample;
use crate::error::{GeoError, Result};

/// Finite-difference weights for derivatives `0..=m` at `z` from nodes `x`
/// (Fornberg's recursion). `w[k][j]` multiplies `f(x[j])` in the k-th
/// derivative.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Position, first and second derivative of a sampled curve at `t`, from the
/// five nodes nearest to `t`.
pub fn sample_jet<const N: usize>(
    sample: &CurveSample,
    t: f64,
) -> Result<(Vector<N>, Vector<N>, Vector<N>)> {
    if sample.dim != N {
        return Err(GeoError::InvalidArgument(format!(
            "expected a {N}-dimensional sample, got dimension {}",
            sample.dim
        )));
    }
    let n = sample.len();
    if n < 5 {
        return Err(GeoError::InvalidArgument(
            "need at least 5 samples for a 5-point stencil".into(),
        ));
    }
    let (lo, hi) = sample.range().unwrap_or((0.0, 0.0));
    if !(t >= lo && t <= hi) {
        return Err(GeoError::OutOfRange { t, lo, hi });
    }
    let idx = sample.params.partition_point(|&p| p < t);
    let start = idx.saturating_sub(2).min(n - 5);
    let nodes = &sample.params[start..start + 5];
    let w = fornberg_weights(t, nodes, 2);
    let mut jet = [Vector::<N>::zeros(); 3];
    for (k, out) in jet.iter_mut().enumerate() {
        for j in 0..5 {
            let p = &sample.points[start + j];
            for d in 0..N {
                out[d] += w[k][j] * p[d];
            }
        }
    }
    Ok((jet[0], jet[1], jet[2]))
}

/// Unsigned geodesic curvature of a sampled curve in a 2-D chart at `t`.
///
/// `κ = |a⊥| / |x'|²`, where `a = x'' + Γ(x', x')` is the covariant
/// acceleration and `a⊥` its component normal to the velocity. Valid for any
/// parameterization.
pub fn curve_geodesic_curvature<C: Chart<2> + ?Sized>(
    chart: &C,
    sample: &CurveSample,
    t: f64,
) -> Result<f64> {
    let (x, dx, ddx) = sample_jet::<2>(sample, t)?;
    let g = chart.metric(&x);
    let gamma = christoffel(chart, &x)?;
    let a = ddx + gamma.contract(&dx, &dx);
    let vv = (dx.transpose() * g * dx)[(0, 0)];
    if !(vv > 0.0) {
        return Err(GeoError::DegenerateVelocity);
    }
    let av = (a.transpose() * g * dx)[(0, 0)];
    let perp = a - dx * (av / vv);
    let pp = (perp.transpose() * g * perp)[(0, 0)].max(0.0);
    Ok(pp.sqrt() / vv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry_core::chart::{E2Chart, H2Chart};

    fn sample_from(f: impl Fn(f64) -> [f64; 2], lo: f64, hi: f64, n: usize) -> CurveSample {
        let params: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let points = params.iter().map(|&t| f(t).to_vec()).collect();
        CurveSample::new(params, points).unwrap()
    }

    #[test]
    fn fornberg_reproduces_polynomials() {
        let x = [0.0, 0.3, 0.7, 1.2, 2.0];
        let w = fornberg_weights(0.5, &x, 2);
        let f = |t: f64| t * t * t - 2.0 * t;
        let d1: f64 = (0..5).map(|j| w[1][j] * f(x[j])).sum();
        let d2: f64 = (0..5).map(|j| w[2][j] * f(x[j])).sum();
        assert!((d1 - (3.0 * 0.25 - 2.0)).abs() < 1e-12);
        assert!((d2 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn euclidean_circle() {
        let s = sample_from(|t| [2.0 * t.cos(), 2.0 * t.sin()], 0.0, 3.0, 601);
        let k = curve_geodesic_curvature(&E2Chart, &s, 1.234).unwrap();
        assert!((k - 0.5).abs() < 1e-8, "{k}");
    }

    #[test]
    fn h2_vertical_geodesic_has_zero_curvature() {
        let s = sample_from(|t| [0.0, t.exp()], -1.0, 1.0, 401);
        assert!(curve_geodesic_curvature(&H2Chart, &s, 0.1).unwrap() < 1e-6);
    }

    #[test]
    fn h2_horocycle_has_unit_curvature() {
        let s = sample_from(|t| [t, 1.0], -1.0, 1.0, 401);
        let k = curve_geodesic_curvature(&H2Chart, &s, 0.3).unwrap();
        assert!((k - 1.0).abs() < 1e-4, "{k}");
    }

    #[test]
    fn out_of_range_parameter() {
        let s = sample_from(|t| [t, 1.0], 0.0, 1.0, 11);
        assert!(matches!(
            curve_geodesic_curvature(&H2Chart, &s, 1.5),
            Err(GeoError::OutOfRange { .. })
        ));
    }
}
