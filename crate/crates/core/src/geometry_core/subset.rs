//! Parameterized surfaces and the chord-containment test for total geodesy.

use std::sync::Arc;

use nalgebra::{Matrix2, SMatrix, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::chart::{Chart, Vector};
use super::integrate::{geodesic_integrate, TangentVector};
use super::shooting::{shoot, ShootOptions};
use crate::error::{GeoError, Result};

type Embedding<const N: usize> = dyn Fn(&[f64; 2]) -> Vector<N> + Send + Sync;

/// A surface `(s1, s2) ↦ point` over the rectangle `[lo, hi]`.
#[derive(Clone)]
pub struct ParamSurface<const N: usize> {
    pub name: String,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    embed: Arc<Embedding<N>>,
}

impl<const N: usize> std::fmt::Debug for ParamSurface<N> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamSurface")
            .field("name", &self.name)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish()
    }
}

impl<const N: usize> ParamSurface<N> {
    pub fn new(
        name: impl Into<String>,
        lo: [f64; 2],
        hi: [f64; 2],
        embed: impl Fn(&[f64; 2]) -> Vector<N> + Send + Sync + 'static,
    ) -> Self {
        ParamSurface {
            name: name.into(),
            lo,
            hi,
            embed: Arc::new(embed),
        }
    }

    pub fn at(&self, s: &[f64; 2]) -> Vector<N> {
        (self.embed)(s)
    }

    /// `n × n` grid of parameter values covering the rectangle.
    pub fn grid(&self, n: usize) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let a = i as f64 / (n - 1) as f64;
                let b = j as f64 / (n - 1) as f64;
                out.push([
                    self.lo[0] + a * (self.hi[0] - self.lo[0]),
                    self.lo[1] + b * (self.hi[1] - self.lo[1]),
                ]);
            }
        }
        out
    }

    /// Approximate distance from `p` to the surface, by Levenberg–Marquardt
    /// on `|L^T (S(s) − p)|` where `g(p) = L L^T`, started at `hint`.
    pub fn distance<C: Chart<N> + ?Sized>(&self, chart: &C, p: &Vector<N>, hint: [f64; 2]) -> f64 {
        let g = chart.metric(p);
        let Some(chol) = g.cholesky() else {
            return f64::INFINITY;
        };
        let lt = chol.l().transpose();
        let resid = |s: &[f64; 2]| -> Option<Vector<N>> {
            let x = self.at(s);
            x.iter().all(|c| c.is_finite()).then(|| lt * (x - p))
        };
        let mut s = hint;
        let Some(mut r) = resid(&s) else {
            return f64::INFINITY;
        };
        let mut mu = 1e-6;
        for _ in 0..60 {
            let mut jac = SMatrix::<f64, N, 2>::zeros();
            for k in 0..2 {
                let h = 1e-7 * s[k].abs().max(1.0);
                let mut sp = s;
                let mut sm = s;
                sp[k] += h;
                sm[k] -= h;
                match (resid(&sp), resid(&sm)) {
                    (Some(a), Some(b)) => jac.set_column(k, &((a - b) / (2.0 * h))),
                    _ => return r.norm(),
                }
            }
            let jtj: Matrix2<f64> = jac.transpose() * jac;
            let jtr: Vector2<f64> = jac.transpose() * r;
            let mut accepted = false;
            for _ in 0..30 {
                let damped = jtj + Matrix2::identity() * (mu * (1.0 + jtj.trace()));
                let Some(step) = damped.lu().solve(&(-jtr)) else {
                    break;
                };
                let trial = [s[0] + step[0], s[1] + step[1]];
                if let Some(rt) = resid(&trial) {
                    if rt.norm() < r.norm() {
                        let small = step.amax() < 1e-14 * (1.0 + s[0].abs().max(s[1].abs()));
                        s = trial;
                        r = rt;
                        mu = (mu * 0.3).max(1e-15);
                        accepted = !small;
                        break;
                    }
                }
                mu *= 10.0;
            }
            if !accepted {
                break;
            }
        }
        r.norm()
    }
}

/// Outcome of a chord-containment run.
#[derive(Clone, Debug, Serialize)]
pub struct ChordReport {
    pub surface: String,
    pub pairs: Vec<[Vec<f64>; 2]>,
    /// `None` for pairs whose two-point problem did not converge.
    pub residuals: Vec<Option<f64>>,
    pub nonconverged: usize,
    pub max: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ChordOptions {
    pub grid: usize,
    pub n_pairs: usize,
    pub seed: u64,
    /// Interior points checked on each connecting geodesic.
    pub checks: usize,
}

impl Default for ChordOptions {
    fn default() -> Self {
        ChordOptions {
            grid: 10,
            n_pairs: 24,
            seed: 0,
            checks: 16,
        }
    }
}

/// For random pairs of grid points, connects them by a geodesic and returns
/// the largest distance from that geodesic to the surface.
pub fn chord_residual<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    surface: &ParamSurface<N>,
    opts: &ChordOptions,
) -> Result<ChordReport> {
    if opts.grid < 2 || opts.n_pairs == 0 {
        return Err(GeoError::InvalidArgument(
            "need a grid of at least 2×2 and one pair".into(),
        ));
    }
    let grid = surface.grid(opts.grid);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pairs = Vec::with_capacity(opts.n_pairs);
    while pairs.len() < opts.n_pairs {
        let i = rng.gen_range(0..grid.len());
        let j = rng.gen_range(0..grid.len());
        if surface.at(&grid[i]) != surface.at(&grid[j]) {
            pairs.push((grid[i], grid[j]));
        }
    }
    let checks = opts.checks.max(1);
    let residuals: Vec<Option<f64>> = pairs
        .par_iter()
        .map(|(a, b)| {
            let p = surface.at(a);
            let q = surface.at(b);
            let shot = shoot(chart, &p, &q, &ShootOptions::default()).ok()?;
            let n_steps = 4 * checks * 64;
            let traj =
                geodesic_integrate(chart, &TangentVector::new(p, shot.velocity), 1.0, n_steps).ok()?;
            if traj.partial {
                return None;
            }
            let worst = (1..=checks)
                .map(|k| {
                    let lam = k as f64 / (checks + 1) as f64;
                    let x = traj.points[(lam * n_steps as f64).round() as usize];
                    let hint = [a[0] + lam * (b[0] - a[0]), a[1] + lam * (b[1] - a[1])];
                    surface.distance(chart, &x, hint)
                })
                .fold(0.0, f64::max);
            Some(worst)
        })
        .collect();
    let nonconverged = residuals.iter().filter(|r| r.is_none()).count();
    let max = residuals.iter().flatten().copied().fold(0.0, f64::max);
    Ok(ChordReport {
        surface: surface.name.clone(),
        pairs: pairs
            .iter()
            .map(|(a, b)| {
                [
                    surface.at(a).iter().copied().collect(),
                    surface.at(b).iter().copied().collect(),
                ]
            })
            .collect(),
        residuals,
        nonconverged,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry_core::chart::{H2xRChart, NilChart};

    #[test]
    fn distance_to_plane() {
        let plane = ParamSurface::<3>::new("z=0", [-1.0, -1.0], [1.0, 1.0], |s| {
            Vector::<3>::new(s[0], s[1], 0.0)
        });
        let d = plane.distance(&H2xRChart, &Vector::<3>::new(0.2, 1.0, 0.3), [0.0, 1.0]);
        assert!((d - 0.3).abs() < 1e-10, "{d}");
    }

    #[test]
    fn h2xr_horizontal_plane_contains_chords() {
        let plane = ParamSurface::<3>::new("h=0.5", [-1.0, 0.5], [1.0, 2.0], |s| {
            Vector::<3>::new(s[0], s[1], 0.5)
        });
        let r = chord_residual(&H2xRChart, &plane, &ChordOptions { n_pairs: 6, ..Default::default() })
            .unwrap();
        assert_eq!(r.nonconverged, 0);
        assert!(r.max < 1e-9, "{}", r.max);
    }

    #[test]
    fn nil_xy_plane_is_not_totally_geodesic() {
        let plane = ParamSurface::<3>::new("z=0", [-1.0, -1.0], [1.0, 1.0], |s| {
            Vector::<3>::new(s[0], s[1], 0.0)
        });
        let r = chord_residual(&NilChart, &plane, &ChordOptions { n_pairs: 6, ..Default::default() })
            .unwrap();
        assert!(r.max > 1e-2, "{}", r.max);
    }
}
