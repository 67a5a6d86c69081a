//! Per-geometry sampling, two-point fitting and point-to-geodesic distance
//! used by the preservation checks.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GeoError, Result};
use crate::geometry_core::sphere::{project_to_tangent, s2xr_closed_form, s2xr_distance};
use crate::geometry_core::{
    chart2, chart3, geodesic_integrate, shoot, shoot_from, Chart, GeometryId, ShootOptions, TangentVector,
    Trajectory, Vector,
};
use crate::optimize::golden_section;

/// Integration step for sampled and fitted geodesics.
pub(crate) const FIT_STEP: f64 = 1e-3;

/// Integration step while searching over directions.
pub(crate) const COARSE_STEP: f64 = 1e-2;

/// Windings tried when connecting two points of `S²×ℝ`.
const WINDINGS: [i32; 5] = [0, -1, 1, -2, 2];

/// Windings tried when connecting two points of the cylinder.
const CYLINDER_WINDINGS: i32 = 12;

enum Kind {
    Flat { periodic: bool },
    Chart2(&'static dyn Chart<2>),
    Chart3(&'static dyn Chart<3>),
    Sphere,
}

fn kind(g: GeometryId) -> Kind {
    match g {
        GeometryId::E2 => Kind::Flat { periodic: false },
        GeometryId::Cylinder => Kind::Flat { periodic: true },
        GeometryId::S2xR => Kind::Sphere,
        GeometryId::H2 => Kind::Chart2(chart2(g).expect("h2 has a chart")),
        _ => Kind::Chart3(chart3(g).expect("three-dimensional chart")),
    }
}

/// Uniform direction in `ℝⁿ` by rejection from the cube.
fn unit_direction(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-3 && r <= 1.0 {
            return u.iter().map(|x| x / r).collect();
        }
    }
}

/// Uniform point of the bounded sampling patch of `g`.
pub(crate) fn random_point(g: GeometryId, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match g {
        GeometryId::E2 => vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
        GeometryId::Cylinder => vec![rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0)],
        GeometryId::H2 => vec![rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0)],
        GeometryId::H2xR => vec![
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(-1.0..1.0),
        ],
        GeometryId::Sl2r => vec![
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(-PI..PI),
        ],
        GeometryId::Nil | GeometryId::Sol => (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        GeometryId::S2xR => {
            let mut p = unit_direction(3, rng);
            p.push(rng.gen_range(-1.0..1.0));
            p
        }
    }
}

/// Unit tangent vector at `p` with uniformly distributed direction.
pub(crate) fn random_unit_velocity(g: GeometryId, p: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    match kind(g) {
        Kind::Flat { .. } => Ok(unit_direction(2, rng)),
        Kind::Sphere => {
            let x = Vector::<3>::new(p[0], p[1], p[2]);
            // Orthonormal basis of T_x S² plus the height direction.
            let a = if x[0].abs() < 0.9 { Vector::<3>::x() } else { Vector::<3>::y() };
            let e1 = (a - x * x.dot(&a)).normalize();
            let e2 = x.cross(&e1);
            let d = unit_direction(3, rng);
            let w = e1 * d[0] + e2 * d[1];
            Ok(vec![w[0], w[1], w[2], d[2]])
        }
        Kind::Chart2(c) => chart_unit_velocity::<2>(c, p, rng),
        Kind::Chart3(c) => chart_unit_velocity::<3>(c, p, rng),
    }
}

fn chart_unit_velocity<const N: usize>(
    chart: &dyn Chart<N>,
    p: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let x = Vector::<N>::from_column_slice(p);
    let g = chart.metric(&x);
    let l = g
        .cholesky()
        .ok_or_else(|| GeoError::OutOfChart(p.to_vec()))?
        .l();
    let z = Vector::<N>::from_column_slice(&unit_direction(N, rng));
    // v = L^{-T} z has g(v, v) = |z|² = 1.
    let v = l
        .transpose()
        .solve_upper_triangular(&z)
        .ok_or_else(|| GeoError::OutOfChart(p.to_vec()))?;
    Ok(v.iter().copied().collect())
}

/// Points of the unit-speed geodesic from `p` with unit velocity `v` at the
/// parameters `k · t_end / (count − 1)`.
pub(crate) fn geodesic_points(
    g: GeometryId,
    p: &[f64],
    v: &[f64],
    t_end: f64,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    let ts: Vec<f64> = (0..count).map(|k| t_end * k as f64 / (count - 1) as f64).collect();
    match kind(g) {
        Kind::Flat { .. } => Ok(ts.iter().map(|t| vec![p[0] + t * v[0], p[1] + t * v[1]]).collect()),
        Kind::Sphere => {
            let (pv, vv) = (Vector::<4>::from_column_slice(p), Vector::<4>::from_column_slice(v));
            ts.iter()
                .map(|&t| Ok(s2xr_closed_form(&pv, &vv, t)?.iter().copied().collect()))
                .collect()
        }
        Kind::Chart2(c) => chart_points::<2>(c, p, v, t_end, count),
        Kind::Chart3(c) => chart_points::<3>(c, p, v, t_end, count),
    }
}

fn chart_points<const N: usize>(
    chart: &dyn Chart<N>,
    p: &[f64],
    v: &[f64],
    t_end: f64,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    let per = ((t_end / (count - 1) as f64 / FIT_STEP).ceil() as usize).max(1);
    let tv = TangentVector::<N>::from_slices(p, v)?;
    let traj = geodesic_integrate(chart, &tv, t_end, per * (count - 1))?;
    if traj.partial {
        return Err(GeoError::OutOfChart(traj.end_point().iter().copied().collect()));
    }
    Ok((0..count)
        .map(|k| traj.points[k * per].iter().copied().collect())
        .collect())
}

/// Length of the chord between two nearby points, measured at their
/// midpoint (exact for the flat and product cases).
pub(crate) fn chord_length(g: GeometryId, a: &[f64], b: &[f64]) -> f64 {
    match kind(g) {
        Kind::Flat { periodic: false } => (a[0] - b[0]).hypot(a[1] - b[1]),
        Kind::Flat { periodic: true } => {
            let d = a[0] - b[0];
            (d - d.round()).hypot(a[1] - b[1])
        }
        Kind::Sphere => s2xr_distance(&Vector::<4>::from_column_slice(a), &Vector::<4>::from_column_slice(b)),
        Kind::Chart2(c) => chart_chord::<2>(c, a, b),
        Kind::Chart3(c) => chart_chord::<3>(c, a, b),
    }
}

fn chart_chord<const N: usize>(chart: &dyn Chart<N>, a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (Vector::<N>::from_column_slice(a), Vector::<N>::from_column_slice(b));
    let d = b - a;
    let m = 0.5 * (a + b);
    if !chart.contains(&m) {
        return f64::INFINITY;
    }
    (d.transpose() * chart.metric(&m) * d)[(0, 0)].max(0.0).sqrt()
}

/// Unit initial velocities at `q0` of geodesics through `target`: one per
/// winding on the cylinder and `S²×ℝ`, the shooting solution elsewhere.
pub(crate) fn connect(g: GeometryId, q0: &[f64], target: &[f64]) -> Vec<Vec<f64>> {
    match kind(g) {
        Kind::Flat { periodic } => {
            let shifts = if periodic { -CYLINDER_WINDINGS..=CYLINDER_WINDINGS } else { 0..=0 };
            shifts
                .filter_map(|m| {
                    let d = [target[0] + m as f64 - q0[0], target[1] - q0[1]];
                    let r = d[0].hypot(d[1]);
                    (r > 0.0).then(|| vec![d[0] / r, d[1] / r])
                })
                .collect()
        }
        Kind::Sphere => sphere_connect(q0, target),
        Kind::Chart2(c) => chart_connect::<2>(c, q0, target).into_iter().collect(),
        Kind::Chart3(c) => chart_connect::<3>(c, q0, target).into_iter().collect(),
    }
}

/// Candidate unit velocities at `q0` of a geodesic through the ordered
/// points `pts`: geodesics through the first and through the last point.
/// In charts the last one is reached by continuation along `pts`, assuming
/// roughly even spacing.
pub(crate) fn connect_along(g: GeometryId, q0: &[f64], pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let Some(first) = pts.first() else { return Vec::new() };
    match kind(g) {
        Kind::Chart2(c) => chart_chain::<2>(c, q0, pts),
        Kind::Chart3(c) => chart_chain::<3>(c, q0, pts),
        _ => {
            let mut out = connect(g, q0, first);
            if pts.len() > 1 {
                out.extend(connect(g, q0, &pts[pts.len() - 1]));
            }
            out
        }
    }
}

fn chart_chain<const N: usize>(chart: &dyn Chart<N>, q0: &[f64], pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let a = Vector::<N>::from_column_slice(q0);
    let unit = |v: Vector<N>| {
        TangentVector::new(a, v)
            .normalized(chart)
            .ok()
            .map(|t| t.components.iter().copied().collect::<Vec<f64>>())
    };
    let opts = ShootOptions::default();
    let Ok(first) = shoot(chart, &a, &Vector::<N>::from_column_slice(&pts[0]), &opts) else {
        return Vec::new();
    };
    let mut out: Vec<Vec<f64>> = unit(first.velocity).into_iter().collect();
    let (mut v, mut reached) = (first.velocity, 0usize);
    let last = pts.len() - 1;
    let mut idx = 1;
    while reached < last {
        idx = idx.min(last);
        let guess = v * ((idx + 1) as f64 / (reached + 1) as f64);
        let target = Vector::<N>::from_column_slice(&pts[idx]);
        match shoot_from(chart, &a, &target, &guess, &opts) {
            Ok(s) => {
                v = s.velocity;
                reached = idx;
                idx = 2 * idx + 1;
            }
            Err(_) => break,
        }
    }
    if reached > 0 {
        out.extend(unit(v));
    }
    out
}

fn sphere_connect(q0: &[f64], target: &[f64]) -> Vec<Vec<f64>> {
    let x = Vector::<3>::new(q0[0], q0[1], q0[2]);
    let y = Vector::<3>::new(target[0], target[1], target[2]);
    let dh = target[3] - q0[3];
    let perp = y - x * x.dot(&y);
    let psi = x.cross(&y).norm().atan2(x.dot(&y));
    if perp.norm() < 1e-12 {
        return if dh.abs() > 0.0 { vec![vec![0.0, 0.0, 0.0, dh.signum()]] } else { vec![] };
    }
    let t = perp.normalize();
    WINDINGS
        .iter()
        .map(|&n| {
            let a = psi + 2.0 * PI * n as f64;
            let r = a.hypot(dh);
            let w = t * (a / r);
            vec![w[0], w[1], w[2], dh / r]
        })
        .collect()
}

fn chart_connect<const N: usize>(chart: &dyn Chart<N>, q0: &[f64], target: &[f64]) -> Option<Vec<f64>> {
    let (a, b) = (Vector::<N>::from_column_slice(q0), Vector::<N>::from_column_slice(target));
    let shot = shoot(chart, &a, &b, &ShootOptions::default()).ok()?;
    let v = TangentVector::new(a, shot.velocity).normalized(chart).ok()?;
    Some(v.components.iter().copied().collect())
}

/// Orthonormal basis of the directions perpendicular to the unit vector `v`
/// at `q0`.
pub(crate) fn perpendicular_basis(g: GeometryId, q0: &[f64], v: &[f64]) -> Vec<Vec<f64>> {
    match kind(g) {
        Kind::Flat { .. } => vec![vec![-v[1], v[0]]],
        Kind::Sphere => {
            let x = Vector::<4>::new(q0[0], q0[1], q0[2], 0.0);
            let e_h = Vector::<4>::new(0.0, 0.0, 0.0, 1.0);
            let vv = Vector::<4>::from_column_slice(v);
            let mut basis: Vec<Vector<4>> = Vec::new();
            for cand in [e_h, Vector::<4>::x(), Vector::<4>::y(), Vector::<4>::z()] {
                let mut w = cand - x * x.dot(&cand) - vv * vv.dot(&cand);
                for b in &basis {
                    w -= b * b.dot(&w);
                }
                if w.norm() > 1e-6 {
                    basis.push(w.normalize());
                }
                if basis.len() == 2 {
                    break;
                }
            }
            basis.iter().map(|b| b.iter().copied().collect()).collect()
        }
        Kind::Chart2(c) => chart_perpendicular::<2>(c, q0, v),
        Kind::Chart3(c) => chart_perpendicular::<3>(c, q0, v),
    }
}

fn chart_perpendicular<const N: usize>(chart: &dyn Chart<N>, q0: &[f64], v: &[f64]) -> Vec<Vec<f64>> {
    let g = chart.metric(&Vector::<N>::from_column_slice(q0));
    let ip = |a: &Vector<N>, b: &Vector<N>| (a.transpose() * g * b)[(0, 0)];
    let vv = Vector::<N>::from_column_slice(v);
    let mut basis: Vec<Vector<N>> = Vec::new();
    for k in 0..N {
        let mut w = Vector::<N>::zeros();
        w[k] = 1.0;
        w -= vv * ip(&vv, &w);
        for b in &basis {
            w -= b * ip(b, &w);
        }
        let n = ip(&w, &w).max(0.0).sqrt();
        if n > 1e-6 {
            basis.push(w / n);
        }
        if basis.len() == N - 1 {
            break;
        }
    }
    basis.iter().map(|b| b.iter().copied().collect()).collect()
}

/// `v + Σ w_j e_j`, rescaled to unit length.
pub(crate) fn perturbed(g: GeometryId, q0: &[f64], v: &[f64], basis: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for (b, c) in basis.iter().zip(w) {
        for (o, bi) in out.iter_mut().zip(b) {
            *o += c * bi;
        }
    }
    let n = match kind(g) {
        Kind::Flat { .. } | Kind::Sphere => out.iter().map(|x| x * x).sum::<f64>().sqrt(),
        Kind::Chart2(c) => {
            let x = Vector::<2>::from_column_slice(q0);
            let o = Vector::<2>::from_column_slice(&out);
            (o.transpose() * c.metric(&x) * o)[(0, 0)].sqrt()
        }
        Kind::Chart3(c) => {
            let x = Vector::<3>::from_column_slice(q0);
            let o = Vector::<3>::from_column_slice(&out);
            (o.transpose() * c.metric(&x) * o)[(0, 0)].sqrt()
        }
    };
    out.iter().map(|x| x / n).collect()
}

/// Largest distance from `pts` to the geodesic through `q0` with unit
/// velocity `v`, restricted to parameters in `[−reach, reach]`. The
/// geodesic is traced or scanned with the given step.
pub(crate) fn max_distance(
    g: GeometryId,
    q0: &[f64],
    v: &[f64],
    pts: &[Vec<f64>],
    reach: f64,
    step: f64,
) -> Result<f64> {
    match kind(g) {
        Kind::Flat { periodic } => {
            // Every translate of the point that can come within `reach`.
            let m_max = if periodic { reach.ceil() as i64 + 2 } else { 0 };
            Ok(pts
                .iter()
                .map(|x| {
                    (-m_max..=m_max)
                        .map(|m| {
                            let y = [x[0] + m as f64 - q0[0], x[1] - q0[1]];
                            let t = (y[0] * v[0] + y[1] * v[1]).clamp(-reach, reach);
                            (y[0] - t * v[0]).hypot(y[1] - t * v[1])
                        })
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max))
        }
        Kind::Sphere => sphere_max_distance(q0, v, pts, reach, 10.0 * step),
        Kind::Chart2(c) => chart_max_distance::<2>(c, q0, v, pts, reach, step),
        Kind::Chart3(c) => chart_max_distance::<3>(c, q0, v, pts, reach, step),
    }
}

fn sphere_max_distance(q0: &[f64], v: &[f64], pts: &[Vec<f64>], reach: f64, step: f64) -> Result<f64> {
    let (p, w) = project_to_tangent(&Vector::<4>::from_column_slice(q0), &Vector::<4>::from_column_slice(v))?;
    let n = (2.0 * reach / step).ceil() as usize;
    let h = 2.0 * reach / n as f64;
    let curve: Vec<Vector<4>> = (0..=n)
        .map(|i| s2xr_closed_form(&p, &w, -reach + h * i as f64))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for x in pts {
        let x = Vector::<4>::from_column_slice(x);
        let (i, _) = curve
            .iter()
            .map(|c| s2xr_distance(c, &x))
            .enumerate()
            .fold((0, f64::INFINITY), |a, (i, d)| if d < a.1 { (i, d) } else { a });
        let lo = -reach + h * i.saturating_sub(1) as f64;
        let hi = (-reach + h * (i + 1) as f64).min(reach);
        let f = |t: f64| s2xr_closed_form(&p, &w, t).map_or(f64::INFINITY, |c| s2xr_distance(&c, &x));
        let (_, d) = golden_section(f, lo, hi, 1e-13);
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Traces the geodesic both ways and measures each point's distance to the
/// nearest traced point, refined on the Hermite interpolant. Distances are
/// `|γ(t) − x|` in the metric at `x`, which agrees with the Riemannian
/// distance to first order.
fn chart_max_distance<const N: usize>(
    chart: &dyn Chart<N>,
    q0: &[f64],
    v: &[f64],
    pts: &[Vec<f64>],
    reach: f64,
    step: f64,
) -> Result<f64> {
    let n = ((reach / step).ceil() as usize).max(2);
    let tv = TangentVector::<N>::from_slices(q0, v)?;
    let forward = geodesic_integrate(chart, &tv, reach, n)?;
    let backward = geodesic_integrate(chart, &tv.reversed(), reach, n)?;
    let mut worst: f64 = 0.0;
    for x in pts {
        let x = Vector::<N>::from_column_slice(x);
        if !chart.contains(&x) {
            return Ok(f64::INFINITY);
        }
        let g = chart.metric(&x);
        let dist = |c: &Vector<N>| {
            let d = c - x;
            (d.transpose() * g * d)[(0, 0)].max(0.0).sqrt()
        };
        let best = [&forward, &backward]
            .iter()
            .map(|traj| nearest_on(traj, &dist))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    Ok(worst)
}

fn nearest_on<const N: usize>(traj: &Trajectory<N>, dist: &impl Fn(&Vector<N>) -> f64) -> f64 {
    let (i, d0) = traj
        .points
        .iter()
        .map(dist)
        .enumerate()
        .fold((0, f64::INFINITY), |a, (i, d)| if d < a.1 { (i, d) } else { a });
    let mut best = d0;
    for seg in [i.checked_sub(1), Some(i)].into_iter().flatten() {
        if seg + 1 >= traj.points.len() {
            continue;
        }
        let (_, d) = golden_section(|s| dist(&traj.hermite(seg, s)), 0.0, 1.0, 1e-12);
        best = best.min(d);
    }
    best
}
