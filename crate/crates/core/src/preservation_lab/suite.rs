use serde::Serialize;

use super::check::{check_preserving, PreservationReport, DEFAULT_TOL};
use super::registry::registry;
use super::totally::{parallel_witness, tg_suite, ParallelWitness, TgReport, DEFAULT_TG_TOL};
use crate::error::{GeoError, Result};
use crate::geometry_core::GeometryId;

/// Version of the JSON layout of [`VerifyReport`].
pub const VERIFY_SCHEMA: &str = "geolab.verify/1";
/// Geodesics sampled per registered map.
pub const DEFAULT_GEODESICS: usize = 16;
/// Chord pairs per surface case.
pub const DEFAULT_PAIRS: usize = 24;

/// Which checks `verify` runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    #[default]
    All,
    Preservation,
    TotallyGeodesic,
}

impl std::str::FromStr for Suite {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "all" => Ok(Suite::All),
            "preservation" => Ok(Suite::Preservation),
            "totally_geodesic" | "totally" => Ok(Suite::TotallyGeodesic),
            _ => Err(GeoError::Parse(format!("unknown suite `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub seed: u64,
    pub n_geodesics: usize,
    pub tol: f64,
    pub n_pairs: usize,
    pub tg_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            suite: Suite::All,
            seed: 0,
            n_geodesics: DEFAULT_GEODESICS,
            tol: DEFAULT_TOL,
            n_pairs: DEFAULT_PAIRS,
            tg_tol: DEFAULT_TG_TOL,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub checks: usize,
    pub as_expected: usize,
    pub unexpected: Vec<String>,
    pub inconclusive: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub seed: u64,
    pub geometry: Option<GeometryId>,
    pub suite: Suite,
    pub preservation: Vec<PreservationReport>,
    pub totally_geodesic: Vec<TgReport>,
    pub parallel_witness: Option<ParallelWitness>,
    pub summary: VerifySummary,
}

impl VerifyReport {
    /// 0 if every verdict matches its prediction, 1 if some verdict
    /// contradicts it, 2 if some verdict is inconclusive.
    pub fn exit_code(&self) -> i32 {
        if !self.summary.unexpected.is_empty() {
            1
        } else if !self.summary.inconclusive.is_empty() {
            2
        } else {
            0
        }
    }
}

/// Runs every registered map and surface case, restricted to `geometry`
/// when given.
pub fn verify(geometry: Option<GeometryId>, opts: &VerifyOptions) -> Result<VerifyReport> {
    let wanted = |g: GeometryId| geometry.is_none_or(|w| w == g);
    let mut summary = VerifySummary::default();
    let mut tally = |id: &str, agrees: Option<bool>| {
        summary.checks += 1;
        match agrees {
            Some(true) => summary.as_expected += 1,
            Some(false) => summary.unexpected.push(id.to_string()),
            None => summary.inconclusive.push(id.to_string()),
        }
    };
    let run_maps = opts.suite != Suite::TotallyGeodesic;
    let run_surfaces = opts.suite != Suite::Preservation;
    let mut preservation = Vec::new();
    for m in registry().into_iter().filter(|m| run_maps && wanted(m.geometry)) {
        let report = check_preserving(&m, opts.n_geodesics, opts.tol, opts.seed)?;
        tally(&report.map_id, report.verdict.agrees_with(report.expected));
        preservation.push(report);
    }
    let mut totally_geodesic = Vec::new();
    for case in tg_suite().into_iter().filter(|c| run_surfaces && wanted(c.geometry)) {
        let report = case.run(opts.n_pairs, opts.tg_tol, opts.seed)?;
        tally(&report.id, report.verdict.agrees_with(report.expected));
        totally_geodesic.push(report);
    }
    let parallel_witness = (run_surfaces && wanted(GeometryId::H2xR)).then(|| {
        let w = parallel_witness(360);
        let ok = w.hyperbolic_non_crossing >= 2 && w.plane_non_crossing == 1 && w.induced_metric_defect < 1e-8;
        tally("h2xr.parallel_witness", Some(ok));
        w
    });
    Ok(VerifyReport {
        schema: VERIFY_SCHEMA,
        seed: opts.seed,
        geometry,
        suite: opts.suite,
        preservation,
        totally_geodesic,
        parallel_witness,
        summary,
    })
}
