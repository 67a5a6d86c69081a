use std::fmt;
use std::str::FromStr;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

pub type C64 = Complex<f64>;

/// Representation of a point of `H²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    HalfPlane,
    Disk,
    Klein,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::HalfPlane => "half-plane",
            Model::Disk => "disk",
            Model::Klein => "klein",
        })
    }
}

impl FromStr for Model {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "half-plane" | "halfplane" | "upper" | "h" => Ok(Model::HalfPlane),
            "disk" | "poincare" | "d" => Ok(Model::Disk),
            "klein" | "k" => Ok(Model::Klein),
            other => Err(GeoError::InvalidArgument(format!("unknown model {other:?}"))),
        }
    }
}

/// A point of `H²` in one of three models. Half-plane points have `v > 0`;
/// disk and Klein points lie in the open unit disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct H2Point {
    pub model: Model,
    pub coords: [f64; 2],
}

impl H2Point {
    pub fn new(model: Model, coords: [f64; 2]) -> Result<Self> {
        let ok = coords.iter().all(|c| c.is_finite())
            && match model {
                Model::HalfPlane => coords[1] > 0.0,
                Model::Disk | Model::Klein => coords[0].hypot(coords[1]) < 1.0,
            };
        if ok {
            Ok(H2Point { model, coords })
        } else {
            Err(GeoError::OutOfChart(coords.to_vec()))
        }
    }

    pub fn half_plane(u: f64, v: f64) -> Result<Self> {
        Self::new(Model::HalfPlane, [u, v])
    }

    pub fn disk(x: f64, y: f64) -> Result<Self> {
        Self::new(Model::Disk, [x, y])
    }

    pub fn klein(x: f64, y: f64) -> Result<Self> {
        Self::new(Model::Klein, [x, y])
    }

    pub(crate) fn from_z(z: C64) -> Self {
        H2Point {
            model: Model::HalfPlane,
            coords: [z.re, z.im],
        }
    }

    /// Half-plane coordinate as a complex number.
    pub fn z(&self) -> C64 {
        let c = self.convert(Model::HalfPlane).coords;
        C64::new(c[0], c[1])
    }

    pub fn convert(&self, target: Model) -> H2Point {
        if self.model == target {
            return *self;
        }
        let w = match self.model {
            Model::Disk => C64::new(self.coords[0], self.coords[1]),
            Model::HalfPlane => half_plane_to_disk(C64::new(self.coords[0], self.coords[1])),
            Model::Klein => {
                let k = C64::new(self.coords[0], self.coords[1]);
                k / (1.0 + (1.0 - k.norm_sqr()).max(0.0).sqrt())
            }
        };
        let out = match target {
            Model::Disk => w,
            Model::HalfPlane => disk_to_half_plane(w),
            Model::Klein => w * (2.0 / (1.0 + w.norm_sqr())),
        };
        H2Point {
            model: target,
            coords: [out.re, out.im],
        }
    }

    pub fn distance(&self, other: &H2Point) -> f64 {
        half_plane_distance(self.z(), other.z())
    }
}

/// Cayley map from the disk to the half-plane, `w ↦ i(1 + w)/(1 − w)`.
pub fn disk_to_half_plane(w: C64) -> C64 {
    C64::i() * (1.0 + w) / (1.0 - w)
}

pub fn half_plane_to_disk(z: C64) -> C64 {
    (z - C64::i()) / (z + C64::i())
}

/// `2 asinh(|z − w| / (2 √(Im z Im w)))`.
pub fn half_plane_distance(z: C64, w: C64) -> f64 {
    2.0 * ((z - w).norm() / (2.0 * (z.im * w.im).sqrt())).asinh()
}

/// Klein-model coordinates of `p`, read as a point of the Euclidean plane.
pub fn klein_map(p: &H2Point) -> [f64; 2] {
    p.convert(Model::Klein).coords
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn disk_origin_is_i() {
        let p = H2Point::disk(0.0, 0.0).unwrap().convert(Model::HalfPlane);
        assert!((p.coords[0]).abs() < 1e-15 && (p.coords[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn i_is_klein_origin() {
        let k = H2Point::half_plane(0.0, 1.0).unwrap().convert(Model::Klein);
        assert!(k.coords[0].abs() < 1e-15 && k.coords[1].abs() < 1e-15);
    }

    #[test]
    fn disk_round_trip() {
        let p = H2Point::disk(0.5, 0.0).unwrap();
        let back = p.convert(Model::HalfPlane).convert(Model::Disk);
        assert!((back.coords[0] - 0.5).abs() < 1e-12 && back.coords[1].abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(H2Point::half_plane(0.0, 0.0).is_err());
        assert!(H2Point::disk(0.8, 0.8).is_err());
    }

    #[test]
    fn distance_along_imaginary_axis() {
        let a = H2Point::half_plane(0.0, 1.0).unwrap();
        let b = H2Point::half_plane(0.0, 3.0).unwrap();
        assert!((a.distance(&b) - 3f64.ln()).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn conversions_round_trip(r in 0.0f64..0.95, phi in 0.0f64..std::f64::consts::TAU) {
            let p = H2Point::disk(r * phi.cos(), r * phi.sin()).unwrap();
            for m in [Model::HalfPlane, Model::Klein] {
                let q = p.convert(m);
                let back = q.convert(Model::Disk);
                prop_assert!((back.coords[0] - p.coords[0]).abs() < 1e-12);
                prop_assert!((back.coords[1] - p.coords[1]).abs() < 1e-12);
                prop_assert!(p.distance(&q) < 1e-6);
            }
        }
    }
}
