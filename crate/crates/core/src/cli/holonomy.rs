use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::hyperbolic_plane::H2Point;
use crate::sl2r::{holonomy_report, HolonomyReport};

pub const HOLONOMY_SCHEMA: &str = "geolab.holonomy/1";

#[derive(Clone, Debug, Serialize)]
pub struct HolonomyOutput {
    pub schema: &'static str,
    #[serde(flatten)]
    pub report: HolonomyReport,
    pub difference: f64,
}

impl HolonomyOutput {
    /// One line per quantity, for the terminal.
    pub fn summary(&self) -> String {
        format!(
            "transport defect: {:.12}\nangle defect:     {:.12}\ndifference:       {:.3e}\n",
            self.report.transport_defect, self.report.defect, self.difference
        )
    }
}

/// Holonomy of the triangle with half-plane vertices `points`, each `[u, v]`.
pub fn holonomy(points: &[Vec<f64>]) -> Result<HolonomyOutput> {
    if points.len() != 3 {
        return Err(GeoError::InvalidArgument(format!(
            "holonomy needs three --p points, got {}",
            points.len()
        )));
    }
    let mut vertices = Vec::with_capacity(3);
    for p in points {
        match p[..] {
            [u, v] => vertices.push(H2Point::half_plane(u, v)?),
            _ => {
                return Err(GeoError::InvalidArgument(format!(
                    "each --p must be u,v in the half-plane, got {} values",
                    p.len()
                )))
            }
        }
    }
    let triangle = [vertices[0], vertices[1], vertices[2]];
    let report = holonomy_report(&triangle)?;
    Ok(HolonomyOutput {
        schema: HOLONOMY_SCHEMA,
        difference: report.difference(),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn thin_and_large_triangles() {
        let thin = holonomy(&[vec![0.0, 1.0], vec![1e-3, 1.0], vec![0.0, 1.001]]).unwrap();
        assert!(thin.report.defect < 1e-5);
        assert!(thin.difference < 1e-5);
        let big = holonomy(&[vec![-1.0, 1e-3], vec![1.0, 1e-3], vec![0.0, 1e3]]).unwrap();
        assert!(big.report.defect > 3.0 && big.report.defect < PI);
        assert!(big.difference < 1e-5);
    }

    #[test]
    fn degenerate_input_is_an_error() {
        assert!(holonomy(&[vec![0.0, 1.0], vec![0.0, 2.0], vec![0.0, 3.0]]).is_err());
        assert!(holonomy(&[vec![0.0, 1.0], vec![0.0, 2.0]]).is_err());
        assert!(holonomy(&[vec![0.0, 1.0], vec![1.0, 2.0], vec![0.0, -1.0]]).is_err());
    }
}
