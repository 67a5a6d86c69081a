use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// Version line written at the top of every curve CSV.
pub const CSV_HEADER: &str = "# geolab curve-sample v1";
/// `schema` field of the JSON encoding.
pub const JSON_SCHEMA: &str = "geolab.curve-sample.v1";

/// Ordered `(parameter, point)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub dim: usize,
    pub params: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    schema: String,
    #[serde(flatten)]
    sample: CurveSample,
}

impl CurveSample {
    pub fn new(params: Vec<f64>, points: Vec<Vec<f64>>) -> Result<Self> {
        if params.len() != points.len() {
            return Err(GeoError::InvalidArgument(format!(
                "{} params for {} points",
                params.len(),
                points.len()
            )));
        }
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(GeoError::InvalidArgument("points of mixed arity".into()));
        }
        if params.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeoError::InvalidArgument(
                "params must be strictly increasing".into(),
            ));
        }
        Ok(CurveSample { dim, params, points })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn range(&self) -> Option<(f64, f64)> {
        Some((*self.params.first()?, *self.params.last()?))
    }

    /// Keeps only the first `k` coordinates of every point.
    pub fn project(&self, k: usize) -> CurveSample {
        CurveSample {
            dim: k.min(self.dim),
            params: self.params.clone(),
            points: self.points.iter().map(|p| p[..k.min(p.len())].to_vec()).collect(),
        }
    }

    pub fn map_points(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> CurveSample {
        let points: Vec<Vec<f64>> = self.points.iter().map(|p| f(p)).collect();
        CurveSample {
            dim: points.first().map_or(self.dim, Vec::len),
            params: self.params.clone(),
            points,
        }
    }

    /// CSV with a version comment, a `t,x1..xdim` header, one row per point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER} dim={}", self.dim)?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim).map(|i| format!("x{i}")));
        w.write_record(&header)?;
        for (t, p) in self.params.iter().zip(&self.points) {
            let mut row = Vec::with_capacity(p.len() + 1);
            row.push(t.to_string());
            row.extend(p.iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(true)
            .from_reader(input);
        let mut params = Vec::new();
        let mut points = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let vals = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| GeoError::Parse(e.to_string()))?;
            let (t, p) = vals
                .split_first()
                .ok_or_else(|| GeoError::Parse("empty row".into()))?;
            params.push(*t);
            points.push(p.to_vec());
        }
        CurveSample::new(params, points)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&Envelope {
            schema: JSON_SCHEMA.to_string(),
            sample: self.clone(),
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let env: Envelope = serde_json::from_str(s)?;
        if env.schema != JSON_SCHEMA {
            return Err(GeoError::Parse(format!("unexpected schema {}", env.schema)));
        }
        CurveSample::new(env.sample.params, env.sample.points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_increasing_params() {
        assert!(CurveSample::new(vec![0.0, 0.0], vec![vec![1.0], vec![2.0]]).is_err());
        assert!(CurveSample::new(vec![0.0], vec![vec![1.0], vec![2.0]]).is_err());
    }

    #[test]
    fn csv_layout_is_versioned() {
        let s = CurveSample::new(vec![0.0, 0.5], vec![vec![1.0, 2.0], vec![3.0, 4.5]]).unwrap();
        let text = s.to_csv_string();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# geolab curve-sample v1 dim=2");
        assert_eq!(lines.next().unwrap(), "t,x1,x2");
        assert_eq!(lines.next().unwrap(), "0,1,2");
        assert_eq!(lines.next().unwrap(), "0.5,3,4.5");
    }

    proptest! {
        #[test]
        fn csv_and_json_round_trip(raw in prop::collection::vec((0.001f64..1.0, -1e3f64..1e3, -1e3f64..1e3), 1..40)) {
            let mut t = 0.0;
            let mut params = Vec::new();
            let mut points = Vec::new();
            for (dt, a, b) in raw {
                t += dt;
                params.push(t);
                points.push(vec![a, b]);
            }
            let s = CurveSample::new(params, points).unwrap();
            let back = CurveSample::read_csv(s.to_csv_string().as_bytes()).unwrap();
            prop_assert_eq!(&back, &s);
            let back = CurveSample::from_json(&s.to_json().unwrap()).unwrap();
            prop_assert_eq!(&back, &s);
        }
    }
}
