//! `S²×ℝ` carried in ambient coordinates `(x, y, z, h)` with `x² + y² + z² = 1`.
//!
//! Geodesics are integrated in `ℝ⁴` with the sphere's acceleration
//! `-|x'|² x` and projected back onto the sphere and its tangent space after
//! every step, so no chart transitions are needed.

use super::chart::Vector;
use super::integrate::Trajectory;
use crate::error::{GeoError, Result};

pub type Vector3 = Vector<3>;

fn split(p: &Vector<4>) -> (Vector3, f64) {
    (Vector3::new(p[0], p[1], p[2]), p[3])
}

fn join(x: &Vector3, h: f64) -> Vector<4> {
    Vector::<4>::new(x[0], x[1], x[2], h)
}

/// Normalizes the sphere part of `p` and removes the radial part of `v`.
pub fn project_to_tangent(p: &Vector<4>, v: &Vector<4>) -> Result<(Vector<4>, Vector<4>)> {
    let (x, h) = split(p);
    let n = x.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(GeoError::OutOfChart(p.iter().copied().collect()));
    }
    let x = x / n;
    let (w, hv) = split(v);
    let w = w - x * x.dot(&w);
    Ok((join(&x, h), join(&w, hv)))
}

fn accel(p: &Vector<4>, v: &Vector<4>) -> Vector<4> {
    let (x, _) = split(p);
    let (w, _) = split(v);
    join(&(-x * w.norm_squared()), 0.0)
}

/// `true` when the sphere part of `p` has unit length to `1e-9`.
pub fn on_sphere(p: &Vector<4>) -> bool {
    let (x, h) = split(p);
    h.is_finite() && (x.norm() - 1.0).abs() < 1e-9
}

/// RK4 with projection for a geodesic of `S²×ℝ` starting at `p` with
/// velocity `v`. `v` is first projected onto the tangent space at `p`.
pub fn s2xr_integrate(
    p: &Vector<4>,
    v: &Vector<4>,
    t_end: f64,
    n_steps: usize,
) -> Result<Trajectory<4>> {
    if n_steps < 2 {
        return Err(GeoError::InvalidArgument("n_steps must be at least 2".into()));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(GeoError::InvalidArgument(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    let (mut x, mut w) = project_to_tangent(p, v)?;
    if w.norm() == 0.0 || !w.iter().all(|c| c.is_finite()) {
        return Err(GeoError::DegenerateVelocity);
    }
    let h = t_end / n_steps as f64;
    let mut traj = Trajectory {
        params: vec![0.0],
        points: vec![x],
        velocities: vec![w],
        partial: false,
    };
    for i in 1..=n_steps {
        let a1 = accel(&x, &w);
        let (x2, w2) = (x + w * (0.5 * h), w + a1 * (0.5 * h));
        let a2 = accel(&x2, &w2);
        let (x3, w3) = (x + w2 * (0.5 * h), w + a2 * (0.5 * h));
        let a3 = accel(&x3, &w3);
        let (x4, w4) = (x + w3 * h, w + a3 * h);
        let a4 = accel(&x4, &w4);
        let xn = x + (w + w2 * 2.0 + w3 * 2.0 + w4) * (h / 6.0);
        let wn = w + (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
        (x, w) = project_to_tangent(&xn, &wn)?;
        traj.params.push(if i == n_steps { t_end } else { h * i as f64 });
        traj.points.push(x);
        traj.velocities.push(w);
    }
    Ok(traj)
}

/// Closed-form geodesic through `p` with tangent velocity `v`:
/// `x(t) = x₀ cos(at) + (w/a) sin(at)`, `h(t) = h₀ + b t`, where `a = |w|`.
pub fn s2xr_closed_form(p: &Vector<4>, v: &Vector<4>, t: f64) -> Result<Vector<4>> {
    let (p, v) = project_to_tangent(p, v)?;
    let (x, h) = split(&p);
    let (w, b) = split(&v);
    let a = w.norm();
    let xs = if a == 0.0 {
        x
    } else {
        x * (a * t).cos() + w * ((a * t).sin() / a)
    };
    Ok(join(&xs, h + b * t))
}

/// Distance in `S²×ℝ`.
pub fn s2xr_distance(p: &Vector<4>, q: &Vector<4>) -> f64 {
    let (x, h1) = split(p);
    let (y, h2) = split(q);
    let angle = x.cross(&y).norm().atan2(x.dot(&y));
    angle.hypot(h1 - h2)
}

/// `max |‖γ'‖² − ‖γ'(0)‖²|` for an ambient trajectory.
pub fn max_speed_drift(traj: &Trajectory<4>) -> f64 {
    let e0 = traj.velocities[0].norm_squared();
    traj.velocities
        .iter()
        .map(|v| (v.norm_squared() - e0).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_closed_form() {
        let p = Vector::<4>::new(0.0, 0.6, 0.8, 0.5);
        let v = Vector::<4>::new(0.7, 0.4, -0.3, 0.2);
        let traj = s2xr_integrate(&p, &v, 5.0, 5_000).unwrap();
        let exact = s2xr_closed_form(&p, &v, 5.0).unwrap();
        assert!((traj.end_point() - exact).amax() < 1e-10);
        assert!(max_speed_drift(&traj) < 1e-12);
    }

    #[test]
    fn distance_is_product_distance() {
        let p = Vector::<4>::new(1.0, 0.0, 0.0, 0.0);
        let q = Vector::<4>::new(0.0, 1.0, 0.0, 1.0);
        let d = s2xr_distance(&p, &q);
        assert!((d - (std::f64::consts::FRAC_PI_2.powi(2) + 1.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn radial_velocity_is_degenerate() {
        let p = Vector::<4>::new(1.0, 0.0, 0.0, 0.0);
        let v = Vector::<4>::new(2.0, 0.0, 0.0, 0.0);
        assert_eq!(s2xr_integrate(&p, &v, 1.0, 10).unwrap_err(), GeoError::DegenerateVelocity);
    }
}
