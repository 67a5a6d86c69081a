use super::chart::{christoffel, norm, Chart, Vector};
use super::sample::CurveSample;
use crate::error::{GeoError, Result};

/// Default RK4 step, in units of arc length.
pub const DEFAULT_STEP: f64 = 1e-3;

/// A velocity at a base point, both in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVector<const N: usize> {
    pub base: Vector<N>,
    pub components: Vector<N>,
}

impl<const N: usize> TangentVector<N> {
    pub fn new(base: Vector<N>, components: Vector<N>) -> Self {
        TangentVector { base, components }
    }

    pub fn from_slices(base: &[f64], components: &[f64]) -> Result<Self> {
        if base.len() != N || components.len() != N {
            return Err(GeoError::InvalidArgument(format!(
                "expected {N} coordinates, got {} and {}",
                base.len(),
                components.len()
            )));
        }
        Ok(TangentVector {
            base: Vector::<N>::from_column_slice(base),
            components: Vector::<N>::from_column_slice(components),
        })
    }

    pub fn norm<C: Chart<N> + ?Sized>(&self, chart: &C) -> f64 {
        norm(chart, &self.base, &self.components)
    }

    pub fn normalized<C: Chart<N> + ?Sized>(&self, chart: &C) -> Result<Self> {
        let n = self.norm(chart);
        if !(n > 0.0) || !n.is_finite() {
            return Err(GeoError::DegenerateVelocity);
        }
        Ok(self.scaled(1.0 / n))
    }

    pub fn scaled(&self, s: f64) -> Self {
        TangentVector {
            base: self.base,
            components: self.components * s,
        }
    }

    pub fn reversed(&self) -> Self {
        self.scaled(-1.0)
    }
}

/// Output of the geodesic integrator: positions and velocities on a uniform
/// parameter grid. `partial` is set when the curve left the chart before
/// `t_end`; the samples up to that point are kept.
#[derive(Clone, Debug)]
pub struct Trajectory<const N: usize> {
    pub params: Vec<f64>,
    pub points: Vec<Vector<N>>,
    pub velocities: Vec<Vector<N>>,
    pub partial: bool,
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn end_point(&self) -> Vector<N> {
        *self.points.last().expect("trajectory has at least one point")
    }

    pub fn end_velocity(&self) -> Vector<N> {
        *self.velocities.last().expect("trajectory has at least one point")
    }

    pub fn to_sample(&self) -> CurveSample {
        CurveSample {
            dim: N,
            params: self.params.clone(),
            points: self.points.iter().map(|p| p.iter().copied().collect()).collect(),
        }
    }

    /// Cubic Hermite point on segment `i` at local fraction `s ∈ [0, 1]`.
    pub fn hermite(&self, i: usize, s: f64) -> Vector<N> {
        let h = self.params[i + 1] - self.params[i];
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        self.points[i] * h00
            + self.velocities[i] * (h10 * h)
            + self.points[i + 1] * h01
            + self.velocities[i + 1] * (h11 * h)
    }

    /// Dense-output position at parameter `t`.
    pub fn interpolate(&self, t: f64) -> Option<Vector<N>> {
        let (lo, hi) = (*self.params.first()?, *self.params.last()?);
        if t < lo || t > hi {
            return None;
        }
        if self.len() == 1 {
            return Some(self.points[0]);
        }
        let i = match self.params.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => return Some(self.points[i]),
            Err(i) => i.saturating_sub(1).min(self.len() - 2),
        };
        let s = (t - self.params[i]) / (self.params[i + 1] - self.params[i]);
        Some(self.hermite(i, s))
    }

    /// `max |g(γ', γ') − g(γ'(0), γ'(0))|` over the samples.
    pub fn max_speed_drift<C: Chart<N> + ?Sized>(&self, chart: &C) -> f64 {
        let energy = |i: usize| {
            let v = &self.velocities[i];
            (v.transpose() * chart.metric(&self.points[i]) * v)[(0, 0)]
        };
        let e0 = energy(0);
        (0..self.len())
            .map(|i| (energy(i) - e0).abs())
            .fold(0.0, f64::max)
    }
}

/// `-Γ(x)(v, v)`.
pub fn geodesic_accel<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    x: &Vector<N>,
    v: &Vector<N>,
) -> Result<Vector<N>> {
    Ok(-christoffel(chart, x)?.contract(v, v))
}

fn rk4_step<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    x: &Vector<N>,
    v: &Vector<N>,
    h: f64,
) -> Result<(Vector<N>, Vector<N>)> {
    let a1 = geodesic_accel(chart, x, v)?;
    let x2 = x + v * (0.5 * h);
    let v2 = v + a1 * (0.5 * h);
    let a2 = geodesic_accel(chart, &x2, &v2)?;
    let x3 = x + v2 * (0.5 * h);
    let v3 = v + a2 * (0.5 * h);
    let a3 = geodesic_accel(chart, &x3, &v3)?;
    let x4 = x + v3 * h;
    let v4 = v + a3 * h;
    let a4 = geodesic_accel(chart, &x4, &v4)?;
    let xn = x + (v + v2 * 2.0 + v3 * 2.0 + v4) * (h / 6.0);
    let vn = v + (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
    Ok((xn, vn))
}

/// Number of RK4 steps covering `length` of arc at the default step.
pub fn steps_for(length: f64) -> usize {
    ((length.abs() / DEFAULT_STEP).ceil() as usize).max(2)
}

/// Solves `x'' + Γ(x)(x', x') = 0` from `v0` on `[0, t_end]` with `n_steps`
/// fixed RK4 steps.
pub fn geodesic_integrate<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    v0: &TangentVector<N>,
    t_end: f64,
    n_steps: usize,
) -> Result<Trajectory<N>> {
    if n_steps < 2 {
        return Err(GeoError::InvalidArgument("n_steps must be at least 2".into()));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(GeoError::InvalidArgument(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    if !chart.contains(&v0.base) {
        return Err(GeoError::OutOfChart(v0.base.iter().copied().collect()));
    }
    if !v0.components.iter().all(|c| c.is_finite()) || v0.components.iter().all(|&c| c == 0.0) {
        return Err(GeoError::DegenerateVelocity);
    }
    let h = t_end / n_steps as f64;
    let mut traj = Trajectory {
        params: Vec::with_capacity(n_steps + 1),
        points: Vec::with_capacity(n_steps + 1),
        velocities: Vec::with_capacity(n_steps + 1),
        partial: false,
    };
    let (mut x, mut v) = (v0.base, v0.components);
    traj.params.push(0.0);
    traj.points.push(x);
    traj.velocities.push(v);
    for i in 1..=n_steps {
        match rk4_step(chart, &x, &v, h) {
            Ok((xn, vn)) if chart.contains(&xn) && vn.iter().all(|c| c.is_finite()) => {
                x = xn;
                v = vn;
            }
            _ => {
                traj.partial = true;
                break;
            }
        }
        traj.params.push(if i == n_steps { t_end } else { h * i as f64 });
        traj.points.push(x);
        traj.velocities.push(v);
    }
    Ok(traj)
}

/// Integrates to `t_end` with the default arc-length step.
pub fn trace<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    v0: &TangentVector<N>,
    t_end: f64,
) -> Result<Trajectory<N>> {
    let speed = v0.norm(chart);
    geodesic_integrate(chart, v0, t_end, steps_for(t_end * speed))
}

/// `exp_p(v)`; the zero vector maps to its base point.
pub fn exp_map<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    v0: &TangentVector<N>,
) -> Result<Vector<N>> {
    if v0.components.iter().all(|&c| c == 0.0) {
        if !chart.contains(&v0.base) {
            return Err(GeoError::OutOfChart(v0.base.iter().copied().collect()));
        }
        return Ok(v0.base);
    }
    let traj = trace(chart, v0, 1.0)?;
    if traj.partial {
        return Err(GeoError::OutOfChart(traj.end_point().iter().copied().collect()));
    }
    Ok(traj.end_point())
}

/// `exp_p(v)` with an explicit step count, for callers that difference it.
pub(crate) fn exp_with_steps<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    base: &Vector<N>,
    v: &Vector<N>,
    n_steps: usize,
) -> Result<Vector<N>> {
    let mut x = *base;
    let mut vel = *v;
    let h = 1.0 / n_steps as f64;
    for _ in 0..n_steps {
        let (xn, vn) = rk4_step(chart, &x, &vel, h)?;
        if !chart.contains(&xn) {
            return Err(GeoError::OutOfChart(xn.iter().copied().collect()));
        }
        x = xn;
        vel = vn;
    }
    Ok(x)
}
