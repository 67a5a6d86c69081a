use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::map::{CandidateMap, Expected};
use super::space::{
    chord_length, connect_along, geodesic_points, max_distance, COARSE_STEP, FIT_STEP, perpendicular_basis, perturbed,
    random_point, random_unit_velocity,
};
use crate::error::{GeoError, Result};
use crate::geometry_core::GeometryId;
use crate::optimize::{nelder_mead, NelderMead};

/// Default pass tolerance.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Residuals above this are failures with a witness.
pub const FAIL_THRESHOLD: f64 = 1e-2;
/// Points mapped per sampled geodesic.
pub const POINTS_PER_GEODESIC: usize = 25;
/// Parameter length of each sampled geodesic segment.
pub const SAMPLE_LENGTH: f64 = 4.0;
/// Above this fraction of unfitted geodesics the verdict is inconclusive.
pub const MAX_UNFITTED_FRACTION: f64 = 0.1;

/// A geodesic whose image is far from every geodesic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub geodesic: usize,
    pub base: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Images of the sampled points.
    pub points: Vec<Vec<f64>>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail { witness: Witness },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail { .. } => "fail",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }

    /// `Some(true)` when the verdict matches `expected`, `None` when it is
    /// inconclusive or nothing is expected.
    pub fn agrees_with(&self, expected: Option<Expected>) -> Option<bool> {
        match (self, expected?) {
            (Verdict::Inconclusive { .. }, _) => None,
            (Verdict::Pass, e) => Some(e == Expected::Pass),
            (Verdict::Fail { .. }, e) => Some(e == Expected::Fail),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreservationReport {
    pub map_id: String,
    pub geometry: GeometryId,
    pub seed: u64,
    pub n_geodesics: usize,
    pub tol: f64,
    /// Per geodesic; `None` where no fitted geodesic could be produced.
    pub residuals: Vec<Option<f64>>,
    pub unfitted: usize,
    pub max_residual: f64,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub expected: Option<Expected>,
}

struct Sampled {
    base: Vec<f64>,
    velocity: Vec<f64>,
    mapped: Vec<Vec<f64>>,
    residual: Option<f64>,
}

/// Smallest over geodesics through `q[0]` of the largest distance from the
/// remaining points. Candidates pass through `q[1]` and through the last
/// point (with windings where geodesics can wrap); the best one is then
/// refined over nearby directions.
pub fn fit_residual(g: GeometryId, q: &[Vec<f64>], tol: f64) -> Option<f64> {
    if q.len() < 3 || q.iter().flatten().any(|x| !x.is_finite()) {
        return None;
    }
    let reach = 1.5 * q.windows(2).map(|w| chord_length(g, &w[0], &w[1])).sum::<f64>() + 0.5;
    if !reach.is_finite() {
        return None;
    }
    let rest = &q[1..];
    let mut best: Option<(f64, Vec<f64>)> = None;
    for v in connect_along(g, &q[0], rest) {
        let Ok(d) = max_distance(g, &q[0], &v, rest, reach, FIT_STEP) else { continue };
        if best.as_ref().is_none_or(|b| d < b.0) {
            best = Some((d, v));
        }
    }
    let (mut value, v) = best?;
    if value < tol {
        return Some(value);
    }
    let basis = perpendicular_basis(g, &q[0], &v);
    let objective = |w: &[f64], step: f64| {
        let u = perturbed(g, &q[0], &v, &basis, w);
        max_distance(g, &q[0], &u, rest, reach, step).unwrap_or(f64::INFINITY)
    };
    let zero = vec![0.0; basis.len()];
    // A coarse search settles clear failures; a fine one polishes the rest.
    let coarse = nelder_mead(|w| objective(w, COARSE_STEP), &zero, 1e-2, NelderMead {
        max_iter: 150,
        f_tol: 1e-10,
        x_tol: 1e-9,
    });
    value = value.min(objective(&coarse.x, FIT_STEP));
    if value < FAIL_THRESHOLD && value >= tol {
        let fine = nelder_mead(|w| objective(w, FIT_STEP), &coarse.x, 1e-4, NelderMead {
            max_iter: 150,
            f_tol: 1e-14,
            x_tol: 1e-12,
        });
        value = value.min(fine.value);
    }
    Some(value)
}

fn sample_one(m: &CandidateMap, seed: u64, index: usize, tol: f64) -> Result<Sampled> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let g = m.geometry;
    let mut last_err = None;
    for _ in 0..10 {
        let base = random_point(g, &mut rng);
        let velocity = random_unit_velocity(g, &base, &mut rng)?;
        let pts = match geodesic_points(g, &base, &velocity, SAMPLE_LENGTH, POINTS_PER_GEODESIC) {
            Ok(p) => p,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let mapped: Vec<Vec<f64>> = pts.iter().map(|p| m.apply(p)).collect();
        let residual = fit_residual(g, &mapped, tol);
        return Ok(Sampled {
            base,
            velocity,
            mapped,
            residual,
        });
    }
    Err(last_err.unwrap_or(GeoError::Degenerate("no geodesic could be sampled".into())))
}

/// Samples `n` random geodesics, maps `POINTS_PER_GEODESIC` points of each
/// through `m` and tests whether the images lie on a geodesic.
pub fn check_preserving(m: &CandidateMap, n: usize, tol: f64, seed: u64) -> Result<PreservationReport> {
    if n == 0 {
        return Err(GeoError::InvalidArgument("need at least one geodesic".into()));
    }
    if !(tol > 0.0) {
        return Err(GeoError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let samples: Vec<Sampled> = (0..n)
        .into_par_iter()
        .map(|i| sample_one(m, seed, i, tol))
        .collect::<Result<_>>()?;
    let residuals: Vec<Option<f64>> = samples.iter().map(|s| s.residual).collect();
    let unfitted = residuals.iter().filter(|r| r.is_none()).count();
    let (worst, max_residual) = residuals
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .fold((None, 0.0), |acc, (i, r)| if r > acc.1 || acc.0.is_none() { (Some(i), r) } else { acc });
    let verdict = if max_residual > FAIL_THRESHOLD {
        let i = worst.expect("a residual exceeded the threshold");
        Verdict::Fail {
            witness: Witness {
                geodesic: i,
                base: samples[i].base.clone(),
                velocity: samples[i].velocity.clone(),
                points: samples[i].mapped.clone(),
                residual: max_residual,
            },
        }
    } else if unfitted as f64 > MAX_UNFITTED_FRACTION * n as f64 {
        Verdict::Inconclusive {
            reason: format!("{unfitted} of {n} images could not be fitted"),
        }
    } else if max_residual < tol {
        Verdict::Pass
    } else {
        Verdict::Inconclusive {
            reason: format!("largest residual {max_residual:e} is between {tol:e} and {FAIL_THRESHOLD:e}"),
        }
    };
    Ok(PreservationReport {
        map_id: m.id.clone(),
        geometry: m.geometry,
        seed,
        n_geodesics: n,
        tol,
        residuals,
        unfitted,
        max_residual,
        verdict,
        expected: m.expected,
    })
}
