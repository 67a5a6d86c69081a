use serde::Serialize;

use super::classify::{classify_sample, SampleClass};
use super::config::{Format, RunConfig};
use crate::error::{GeoError, Result};
use crate::geometry_core::sphere::s2xr_integrate;
use crate::geometry_core::{
    chart2, chart3, geodesic_integrate, steps_for, Chart, CurveSample, GeometryId, TangentVector, Trajectory,
    Vector,
};

pub const TRACE_SCHEMA: &str = "geolab.trace/1";

/// Base point used when `--p` is not given.
pub fn default_point(g: GeometryId) -> Vec<f64> {
    match g {
        GeometryId::E2 | GeometryId::Cylinder => vec![0.0, 0.0],
        GeometryId::H2 => vec![0.0, 1.0],
        GeometryId::H2xR | GeometryId::Sl2r => vec![0.0, 1.0, 0.0],
        GeometryId::Nil | GeometryId::Sol => vec![0.0, 0.0, 0.0],
        GeometryId::S2xR => vec![1.0, 0.0, 0.0, 0.0],
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceResult {
    pub schema: &'static str,
    pub geometry: GeometryId,
    pub p: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
    pub steps: usize,
    /// The integration left the chart before `t`.
    pub partial: bool,
    pub class: SampleClass,
    pub sample: CurveSample,
}

impl TraceResult {
    pub fn to_bytes(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => Ok(self.sample.to_csv_string().into_bytes()),
            Format::Json => super::output::json_bytes(self),
        }
    }
}

fn run_chart<const N: usize>(
    chart: &dyn Chart<N>,
    p: &[f64],
    v: &[f64],
    t: f64,
    steps: Option<usize>,
) -> Result<(Trajectory<N>, usize)> {
    let tv = TangentVector::<N>::from_slices(p, v)?;
    let n = steps.unwrap_or_else(|| steps_for(t * tv.norm(chart)));
    Ok((geodesic_integrate(chart, &tv, t, n)?, n))
}

/// Integrates the geodesic from `p` with velocity `v` up to `config.t`.
pub fn trace(config: &RunConfig, p: Option<&[f64]>, v: &[f64]) -> Result<TraceResult> {
    let g = config.require_geometry()?;
    let p = p.map_or_else(|| default_point(g), <[f64]>::to_vec);
    for (name, x) in [("--p", &p[..]), ("--v", v)] {
        if x.len() != g.coords() {
            return Err(GeoError::InvalidArgument(format!(
                "{name} needs {} components for {g}, got {}",
                g.coords(),
                x.len()
            )));
        }
    }
    let t = config.t;
    let (sample, partial, steps) = match g.coords() {
        2 => {
            let chart = chart2(g).ok_or_else(|| GeoError::Unsupported(format!("no chart for {g}")))?;
            let (traj, n) = run_chart::<2>(chart, &p, v, t, config.steps)?;
            (traj.to_sample(), traj.partial, n)
        }
        3 => {
            let chart = chart3(g).ok_or_else(|| GeoError::Unsupported(format!("no chart for {g}")))?;
            let (traj, n) = run_chart::<3>(chart, &p, v, t, config.steps)?;
            (traj.to_sample(), traj.partial, n)
        }
        _ => {
            let (pv, vv) = (Vector::<4>::from_column_slice(&p), Vector::<4>::from_column_slice(v));
            let n = config.steps.unwrap_or_else(|| steps_for(t * vv.norm()));
            let traj = s2xr_integrate(&pv, &vv, t, n)?;
            (traj.to_sample(), traj.partial, n)
        }
    };
    let class = classify_sample(g, &sample)?;
    Ok(TraceResult {
        schema: TRACE_SCHEMA,
        geometry: g,
        p,
        v: v.to_vec(),
        t,
        steps,
        partial,
        class,
        sample,
    })
}
