use serde::Serialize;

use super::map::Expected;
use crate::error::{GeoError, Result};
use crate::geometry_core::{
    chord_residual, Chart, ChordOptions, ChordReport, GeometryId, H2xRChart, NilChart, ParamSurface,
    Sl2rChart, SolChart, Vector,
};
use crate::sl2r::{horizontal_plane, SLPoint};
use crate::sol::{tg_plane_chart, z_plane, PlaneAxis, PATCH_HALF_WIDTH};

/// Default pass tolerance for chord containment.
pub const DEFAULT_TG_TOL: f64 = 1e-6;
/// Residuals above this mark a subset as not totally geodesic.
pub const TG_FAIL_THRESHOLD: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum TgVerdict {
    Pass,
    Fail {
        /// Index of the worst pair and its endpoints.
        pair: usize,
        points: [Vec<f64>; 2],
        residual: f64,
    },
    Inconclusive {
        reason: String,
    },
}

impl TgVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            TgVerdict::Pass => "pass",
            TgVerdict::Fail { .. } => "fail",
            TgVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn agrees_with(&self, expected: Option<Expected>) -> Option<bool> {
        match (self, expected?) {
            (TgVerdict::Inconclusive { .. }, _) => None,
            (TgVerdict::Pass, e) => Some(e == Expected::Pass),
            (TgVerdict::Fail { .. }, e) => Some(e == Expected::Fail),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TgReport {
    pub id: String,
    pub geometry: GeometryId,
    pub tol: f64,
    pub chords: ChordReport,
    #[serde(flatten)]
    pub verdict: TgVerdict,
    pub expected: Option<Expected>,
}

/// Chord-containment test of a surface in any three-dimensional chart.
pub fn check_totally_geodesic<C: Chart<3> + ?Sized>(
    chart: &C,
    surface: &ParamSurface<3>,
    n_pairs: usize,
    tol: f64,
    seed: u64,
) -> Result<(ChordReport, TgVerdict)> {
    if !(tol > 0.0) {
        return Err(GeoError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let opts = ChordOptions {
        n_pairs,
        seed,
        ..ChordOptions::default()
    };
    let report = chord_residual(chart, surface, &opts)?;
    let worst = report
        .residuals
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .fold(None, |acc: Option<(usize, f64)>, (i, r)| match acc {
            Some((_, m)) if m >= r => acc,
            _ => Some((i, r)),
        });
    let verdict = match worst {
        Some((i, r)) if r > TG_FAIL_THRESHOLD => TgVerdict::Fail {
            pair: i,
            points: report.pairs[i].clone(),
            residual: r,
        },
        _ if report.nonconverged * 10 > n_pairs => TgVerdict::Inconclusive {
            reason: format!("{} of {n_pairs} chords did not converge", report.nonconverged),
        },
        _ if report.max < tol => TgVerdict::Pass,
        _ => TgVerdict::Inconclusive {
            reason: format!("largest residual {:e} is between {tol:e} and {TG_FAIL_THRESHOLD:e}", report.max),
        },
    };
    Ok((report, verdict))
}

/// A named surface with its predicted verdict.
pub struct TgCase {
    pub id: &'static str,
    pub geometry: GeometryId,
    pub expected: Expected,
    pub surface: ParamSurface<3>,
}

impl TgCase {
    pub fn run(&self, n_pairs: usize, tol: f64, seed: u64) -> Result<TgReport> {
        let chart: &dyn Chart<3> = match self.geometry {
            GeometryId::H2xR => &H2xRChart,
            GeometryId::Sl2r => &Sl2rChart,
            GeometryId::Nil => &NilChart,
            GeometryId::Sol => &SolChart,
            other => return Err(GeoError::Unsupported(format!("no surface cases for {other}"))),
        };
        let (chords, verdict) = check_totally_geodesic(chart, &self.surface, n_pairs, tol, seed)?;
        Ok(TgReport {
            id: self.id.to_string(),
            geometry: self.geometry,
            tol,
            chords,
            verdict,
            expected: Some(self.expected),
        })
    }
}

/// Vertical plane `γ×ℝ` over the geodesic `u = 0`, parameterized by arc
/// length and height.
pub fn h2xr_vertical_plane(half_width: f64) -> ParamSurface<3> {
    ParamSurface::new(
        "h2xr vertical plane over u=0",
        [-half_width, -half_width],
        [half_width, half_width],
        |s| Vector::<3>::new(0.0, s[0].exp(), s[1]),
    )
}

/// Square inside the hyperbolic disk of radius 1 about `e·i`, one unit
/// from the base point of `x = (0, 1, 0)`.
pub const SL2R_PATCH: ([f64; 2], [f64; 2]) = ([-2.2, 1.98], [2.2, 6.4]);

/// Surfaces with known answers.
pub fn tg_suite() -> Vec<TgCase> {
    let sl_x = SLPoint::new(0.0, 1.0, 0.0).expect("valid point");
    vec![
        TgCase {
            id: "h2xr.horizontal_plane",
            geometry: GeometryId::H2xR,
            expected: Expected::Pass,
            surface: ParamSurface::new("h2xr h=0.5", [-1.0, 0.5], [1.0, 2.0], |s| {
                Vector::<3>::new(s[0], s[1], 0.5)
            }),
        },
        TgCase {
            id: "h2xr.vertical_plane",
            geometry: GeometryId::H2xR,
            expected: Expected::Pass,
            surface: h2xr_vertical_plane(1.0),
        },
        TgCase {
            id: "sol.x_plane",
            geometry: GeometryId::Sol,
            expected: Expected::Pass,
            surface: tg_plane_chart(PlaneAxis::X, 0.0).patch(PATCH_HALF_WIDTH),
        },
        TgCase {
            id: "sol.y_plane",
            geometry: GeometryId::Sol,
            expected: Expected::Pass,
            surface: tg_plane_chart(PlaneAxis::Y, 0.5).patch(PATCH_HALF_WIDTH),
        },
        TgCase {
            id: "sol.z_plane",
            geometry: GeometryId::Sol,
            expected: Expected::Fail,
            surface: z_plane(0.0, PATCH_HALF_WIDTH),
        },
        TgCase {
            id: "sl2r.horizontal_plane",
            geometry: GeometryId::Sl2r,
            expected: Expected::Fail,
            surface: horizontal_plane(&sl_x, SL2R_PATCH.0, SL2R_PATCH.1),
        },
        TgCase {
            id: "nil.xy_plane",
            geometry: GeometryId::Nil,
            expected: Expected::Fail,
            surface: ParamSurface::new("nil z=0", [-1.0, -1.0], [1.0, 1.0], |s| {
                Vector::<3>::new(s[0], s[1], 0.0)
            }),
        },
    ]
}

/// Lines through a point off a given line that never meet it, in `H²`
/// and in the vertical plane `γ×ℝ`, over the same sampled directions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParallelWitness {
    pub directions: usize,
    pub hyperbolic_non_crossing: usize,
    pub plane_non_crossing: usize,
    /// Largest entry of `g_induced − I` for the vertical plane.
    pub induced_metric_defect: f64,
}

/// Compares parallels in `H²` (line `u = 0`, point `1 + i`) with parallels
/// in the vertical plane over `u = 0` (line `s = 0`, point `(1, 0)`), for
/// `directions` equally spaced directions in `[0, π)`.
pub fn parallel_witness(directions: usize) -> ParallelWitness {
    let (u0, v0) = (1.0f64, 1.0f64);
    let mut hyperbolic = 0;
    let mut plane = 0;
    for k in 0..directions {
        let phi = std::f64::consts::PI * k as f64 / directions as f64;
        let (s, c) = phi.sin_cos();
        // Geodesic through u0 + i v0 with direction phi: a vertical line if
        // c = 0, else a semicircle centered where the radius is normal to it.
        let crosses = if c.abs() < 1e-12 {
            u0 == 0.0
        } else {
            let center = u0 + v0 * s / c;
            let r = (u0 - center).hypot(v0);
            center - r < 0.0 && 0.0 < center + r
        };
        if !crosses {
            hyperbolic += 1;
        }
        // Straight line s(t) = 1 + t c in the flat plane meets s = 0 unless c = 0.
        if c.abs() < 1e-12 {
            plane += 1;
        }
    }
    let surface = h2xr_vertical_plane(1.0);
    let mut defect: f64 = 0.0;
    let h = 1e-5;
    for s in [[-0.7, 0.2], [0.0, 0.0], [0.9, -0.4]] {
        let p = surface.at(&s);
        let g = H2xRChart.metric(&p);
        let cols: Vec<Vector<3>> = (0..2)
            .map(|i| {
                let (mut a, mut b) = (s, s);
                a[i] += h;
                b[i] -= h;
                (surface.at(&a) - surface.at(&b)) / (2.0 * h)
            })
            .collect();
        for i in 0..2 {
            for j in 0..2 {
                let gij = (cols[i].transpose() * g * cols[j])[(0, 0)];
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((gij - target).abs());
            }
        }
    }
    ParallelWitness {
        directions,
        hyperbolic_non_crossing: hyperbolic,
        plane_non_crossing: plane,
        induced_metric_defect: defect,
    }
}
