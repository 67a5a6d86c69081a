use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{GeoError, Result};
use crate::geometry_core::{CurveSample, GeometryId};
use crate::hyperbolic_plane::{classify_curve, Model};
use crate::nil::{classify_nil_geodesic, fit_line};
use crate::sl2r::{classify_sl_geodesic, linear_fit};

/// Coordinate change below which a coordinate counts as constant.
pub const STILL: f64 = 1e-9;

/// Class tag of a sampled curve plus the classifier's numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleClass {
    pub class: String,
    pub detail: Value,
}

impl SampleClass {
    fn new(class: impl Into<String>, detail: Value) -> Self {
        SampleClass {
            class: class.into(),
            detail,
        }
    }
}

fn spread(sample: &CurveSample, k: std::ops::Range<usize>) -> f64 {
    let p0 = &sample.points[0];
    sample
        .points
        .iter()
        .flat_map(|p| k.clone().map(move |i| (p[i] - p0[i]).abs()))
        .fold(0.0, f64::max)
}

fn height_fit(sample: &CurveSample, k: usize) -> Value {
    let pts: Vec<(f64, f64)> = sample.params.iter().zip(&sample.points).map(|(t, p)| (*t, p[k])).collect();
    match linear_fit(&pts) {
        Ok(f) => json!({ "speed": f.slope, "rms": f.rms }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn product(g: GeometryId, sample: &CurveSample) -> Result<SampleClass> {
    let k = g.coords() - 1;
    let base = spread(sample, 0..k);
    let height = spread(sample, k..k + 1);
    let class = if base < STILL {
        "vertical"
    } else if height < STILL {
        "horizontal"
    } else {
        "slant"
    };
    let base_detail = if g == GeometryId::H2xR && base >= STILL {
        match classify_curve(&sample.project(2), Model::HalfPlane) {
            Ok(c) => json!({
                "kind": c.kind.map(|k| k.to_string()),
                "K": c.curvature,
            }),
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        Value::Null
    };
    Ok(SampleClass::new(
        class,
        json!({ "base_projection": base_detail, "height": height_fit(sample, k) }),
    ))
}

fn sol(sample: &CurveSample) -> SampleClass {
    let (x, y) = (spread(sample, 0..1), spread(sample, 1..2));
    let class = match (x < STILL, y < STILL) {
        (true, true) => "vertical",
        (true, false) => "in_x_plane",
        (false, true) => "in_y_plane",
        (false, false) => "generic",
    };
    SampleClass::new(class, json!({ "x_spread": x, "y_spread": y }))
}

/// Runs the classifier of `g` on a sample in chart coordinates.
/// Classifier failures give the class `unclassified` with the reason.
pub fn classify_sample(g: GeometryId, sample: &CurveSample) -> Result<SampleClass> {
    if sample.dim != g.coords() {
        return Err(GeoError::InvalidArgument(format!(
            "{g} samples have {} coordinates, got {}",
            g.coords(),
            sample.dim
        )));
    }
    if sample.len() < 2 {
        return Err(GeoError::InvalidArgument("need at least two points".into()));
    }
    let unclassified = |e: GeoError| SampleClass::new("unclassified", json!({ "reason": e.to_string() }));
    Ok(match g {
        GeometryId::E2 => {
            let pts: Vec<[f64; 2]> = sample.points.iter().map(|p| [p[0], p[1]]).collect();
            let fit = fit_line(&pts);
            let class = if fit.rms < STILL { "line" } else { "curve" };
            SampleClass::new(class, json!({ "line_rms": fit.rms }))
        }
        GeometryId::H2 => match classify_curve(sample, Model::HalfPlane) {
            Ok(c) => SampleClass::new(
                c.kind.map_or("unclassified".to_string(), |k| k.to_string()),
                serde_json::to_value(&c)?,
            ),
            Err(e) => unclassified(e),
        },
        GeometryId::Cylinder | GeometryId::H2xR | GeometryId::S2xR => product(g, sample)?,
        GeometryId::Nil => match classify_nil_geodesic(sample) {
            Ok(c) => SampleClass::new(c.class.name(), serde_json::to_value(&c)?),
            Err(e) => unclassified(e),
        },
        GeometryId::Sl2r => match classify_sl_geodesic(sample) {
            Ok(c) => SampleClass::new(c.class.to_string(), serde_json::to_value(&c)?),
            Err(e) => unclassified(e),
        },
        GeometryId::Sol => sol(sample),
    })
}

/// Reads a curve sample from CSV or JSON. JSON may be a bare sample, a
/// schema-tagged sample or a `trace` result holding one under `sample`.
pub fn read_sample(text: &str) -> Result<CurveSample> {
    if !text.trim_start().starts_with('{') {
        return CurveSample::read_csv(text.as_bytes());
    }
    let mut v: Value = serde_json::from_str(text)?;
    if let Some(inner) = v.get_mut("sample") {
        v = inner.take();
    }
    let s: CurveSample = serde_json::from_value(v)?;
    CurveSample::new(s.params, s.points)
}
