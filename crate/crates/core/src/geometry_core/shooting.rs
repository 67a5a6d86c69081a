//! Boundary-value geodesics: find `v` with `exp_{q0}(v) = q1`.

use nalgebra::{DMatrix, DVector, SMatrix};

use super::chart::{Chart, Vector};
use super::integrate::{exp_with_steps, DEFAULT_STEP};
use crate::error::{GeoError, Result};
use crate::optimize::{nelder_mead, NelderMead};

#[derive(Clone, Copy, Debug)]
pub struct ShootOptions {
    /// Accepted endpoint miss (max-norm in chart coordinates).
    pub tol: f64,
    pub max_newton: usize,
    /// RK4 step in units of `|v|` measured in the metric at `q0`.
    pub step: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            tol: 1e-9,
            max_newton: 40,
            step: DEFAULT_STEP,
        }
    }
}

/// Initial velocity of a geodesic from `q0` hitting `q1` at parameter 1.
#[derive(Clone, Copy, Debug)]
pub struct Shot<const N: usize> {
    pub velocity: Vector<N>,
    pub miss: f64,
}

struct Problem<'a, C: ?Sized, const N: usize> {
    chart: &'a C,
    q0: Vector<N>,
    n_steps: usize,
}

impl<C: Chart<N> + ?Sized, const N: usize> Problem<'_, C, N> {
    fn exp(&self, v: &Vector<N>) -> Result<Vector<N>> {
        exp_with_steps(self.chart, &self.q0, v, self.n_steps)
    }

    fn newton(&self, target: &Vector<N>, mut v: Vector<N>, opts: &ShootOptions) -> Result<Shot<N>> {
        let mut end = self.exp(&v)?;
        let mut miss = (end - target).amax();
        for _ in 0..opts.max_newton {
            if miss <= opts.tol {
                return Ok(Shot { velocity: v, miss });
            }
            let delta = 1e-7 * v.amax().max(1.0);
            let mut jac = SMatrix::<f64, N, N>::zeros();
            for k in 0..N {
                let mut vk = v;
                vk[k] += delta;
                let col = (self.exp(&vk)? - end) / delta;
                jac.set_column(k, &col);
            }
            let lu = DMatrix::from_column_slice(N, N, jac.as_slice()).lu();
            let Some(step) = lu.solve(&DVector::from_column_slice((target - end).as_slice())) else {
                break;
            };
            let step = Vector::<N>::from_column_slice(step.as_slice());
            let mut lambda = 1.0;
            let mut improved = false;
            while lambda > 1e-4 {
                let trial = v + step * lambda;
                if let Ok(e) = self.exp(&trial) {
                    let m = (e - target).amax();
                    if m < miss {
                        v = trial;
                        end = e;
                        miss = m;
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if miss <= opts.tol {
            Ok(Shot { velocity: v, miss })
        } else {
            Err(GeoError::Nonconvergence { miss })
        }
    }
}

/// Solves the two-point problem by damped Newton from the coordinate
/// difference, then by continuation along the coordinate segment, then by
/// Nelder–Mead on the endpoint miss from eight starts, each polished by
/// Newton.
pub fn shoot<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    q0: &Vector<N>,
    q1: &Vector<N>,
    opts: &ShootOptions,
) -> Result<Shot<N>> {
    for q in [q0, q1] {
        if !chart.contains(q) {
            return Err(GeoError::OutOfChart(q.iter().copied().collect()));
        }
    }
    let d = q1 - q0;
    if d.amax() == 0.0 {
        return Ok(Shot {
            velocity: Vector::<N>::zeros(),
            miss: 0.0,
        });
    }
    let g = chart.metric(q0);
    let guess_len = (d.transpose() * g * d)[(0, 0)].sqrt();
    let n_steps = ((3.0 * guess_len.max(1.0) / opts.step).ceil() as usize).max(50);
    let problem = Problem {
        chart,
        q0: *q0,
        n_steps,
    };
    let mut best_miss = f64::INFINITY;
    match problem.newton(q1, d, opts) {
        Ok(s) => return Ok(s),
        Err(GeoError::Nonconvergence { miss }) => best_miss = best_miss.min(miss),
        Err(_) => {}
    }

    let mut v = d / 8.0;
    let mut ok = true;
    for i in 1..=8 {
        let target = q0 + d * (i as f64 / 8.0);
        match problem.newton(&target, v, opts) {
            Ok(s) => v = s.velocity,
            Err(_) => {
                ok = false;
                break;
            }
        }
    }
    if ok {
        return problem.newton(q1, v, opts);
    }

    let scale = d.amax();
    let mut starts = vec![d * 0.5, d * 1.5];
    for k in 0..N {
        for sgn in [-1.0, 1.0] {
            let mut s = d;
            s[k] += sgn * 0.5 * scale;
            starts.push(s);
        }
    }
    starts.truncate(8);
    for s in starts {
        let f = |x: &[f64]| match problem.exp(&Vector::<N>::from_column_slice(x)) {
            Ok(e) => (e - q1).norm(),
            Err(_) => f64::INFINITY,
        };
        let m = nelder_mead(
            f,
            s.as_slice(),
            0.1 * scale.max(1e-3),
            NelderMead {
                max_iter: 400 * N,
                f_tol: 0.0,
                x_tol: 1e-10,
            },
        );
        let v = Vector::<N>::from_column_slice(&m.x);
        match problem.newton(q1, v, opts) {
            Ok(s) => return Ok(s),
            Err(GeoError::Nonconvergence { miss }) => best_miss = best_miss.min(miss),
            Err(_) => best_miss = best_miss.min(m.value),
        }
    }
    Err(GeoError::Nonconvergence { miss: best_miss })
}

/// Damped Newton only, started from `guess`. Cheap when the guess comes from
/// a nearby solved problem.
pub fn shoot_from<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    q0: &Vector<N>,
    q1: &Vector<N>,
    guess: &Vector<N>,
    opts: &ShootOptions,
) -> Result<Shot<N>> {
    for q in [q0, q1] {
        if !chart.contains(q) {
            return Err(GeoError::OutOfChart(q.iter().copied().collect()));
        }
    }
    let g = chart.metric(q0);
    let len = (guess.transpose() * g * guess)[(0, 0)].max(0.0).sqrt();
    let n_steps = ((3.0 * len.max(1.0) / opts.step).ceil() as usize).max(50);
    let problem = Problem {
        chart,
        q0: *q0,
        n_steps,
    };
    problem.newton(q1, *guess, opts)
}
