use std::f64::consts::PI;

use serde::Serialize;

use super::curves::tangent_toward;
use super::model::{H2Point, C64};
use crate::error::{GeoError, Result};

/// `π − (α + β + γ)`, the area of a hyperbolic triangle with these angles.
pub fn triangle_holonomy_target(angles: [f64; 3]) -> Result<f64> {
    if angles.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
        return Err(GeoError::InvalidTriangle(format!("angles must be positive: {angles:?}")));
    }
    let sum: f64 = angles.iter().sum();
    if sum >= PI {
        return Err(GeoError::InvalidTriangle(format!(
            "angle sum {sum} is not below π"
        )));
    }
    Ok(PI - sum)
}

/// Interior angles at `a`, `b`, `c`, each measured between the tangent
/// directions of the two sides leaving that vertex.
pub fn triangle_angles(a: &H2Point, b: &H2Point, c: &H2Point) -> Result<[f64; 3]> {
    let z = [a.z(), b.z(), c.z()];
    let mut out = [0.0; 3];
    for i in 0..3 {
        let p = z[i];
        let t1 = tangent_toward(p, z[(i + 1) % 3])?;
        let t2 = tangent_toward(p, z[(i + 2) % 3])?;
        out[i] = angle_between(t1, t2);
    }
    if out.iter().any(|a| *a < 1e-12) || out.iter().any(|a| PI - a < 1e-12) {
        return Err(GeoError::Degenerate("vertices are collinear".into()));
    }
    Ok(out)
}

fn angle_between(a: C64, b: C64) -> f64 {
    (a.re * b.im - a.im * b.re).abs().atan2(a.re * b.re + a.im * b.im)
}

/// A triangle with its measured angles and the defect they predict.
#[derive(Clone, Debug, Serialize)]
pub struct TriangleDefect {
    pub vertices: [[f64; 2]; 3],
    pub angles: [f64; 3],
    pub defect: f64,
}

pub fn triangle_defect(a: &H2Point, b: &H2Point, c: &H2Point) -> Result<TriangleDefect> {
    let angles = triangle_angles(a, b, c)?;
    Ok(TriangleDefect {
        vertices: [a.z(), b.z(), c.z()].map(|z| [z.re, z.im]),
        angles,
        defect: triangle_holonomy_target(angles)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn arithmetic() {
        let t = triangle_holonomy_target([PI / 2.0, FRAC_PI_4, FRAC_PI_4 - 0.1]).unwrap();
        assert!((t - 0.1).abs() < 1e-15);
        let e = triangle_holonomy_target([FRAC_PI_4; 3]).unwrap();
        assert!((e - FRAC_PI_4).abs() < 1e-15);
        let ideal = triangle_holonomy_target([1e-9; 3]).unwrap();
        assert!(PI - ideal < 1e-8);
        assert!(triangle_holonomy_target([1.0, 1.0, 1.2]).is_err());
    }

    #[test]
    fn right_angle_at_i() {
        // Sides along the imaginary axis and the unit circle meet at i at π/2.
        let a = H2Point::half_plane(0.0, 1.0).unwrap();
        let b = H2Point::half_plane(0.0, 2.0).unwrap();
        let c = H2Point::half_plane(0.6, 0.8).unwrap();
        let ang = triangle_angles(&a, &b, &c).unwrap();
        assert!((ang[0] - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_is_degenerate() {
        let a = H2Point::half_plane(0.0, 1.0).unwrap();
        let b = H2Point::half_plane(0.0, 2.0).unwrap();
        let c = H2Point::half_plane(0.0, 3.0).unwrap();
        assert!(triangle_angles(&a, &b, &c).is_err());
    }
}
