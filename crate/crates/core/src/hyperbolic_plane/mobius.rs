use serde::{Deserialize, Serialize};

use super::model::{H2Point, C64};
use crate::error::{GeoError, Result};

/// Isometry of the half-plane: `z ↦ M(z)` or, when `reversing`, `z ↦ M(−z̄)`,
/// with `M = [[a, b], [c, d]]` normalized to determinant 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub reversing: bool,
}

impl MobiusMap {
    pub const IDENTITY: MobiusMap = MobiusMap {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
        reversing: false,
    };

    /// `z ↦ (az + b)/(cz + d)` if `ad − bc > 0`, `z ↦ (az̄ + b)/(cz̄ + d)` if
    /// it is negative. The matrix is rescaled to `|det| = 1`.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.abs() > 0.0) || !det.is_finite() {
            return Err(GeoError::NotBijective(format!(
                "matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}"
            )));
        }
        let s = det.abs().sqrt();
        Ok(if det > 0.0 {
            MobiusMap {
                a: a / s,
                b: b / s,
                c: c / s,
                d: d / s,
                reversing: false,
            }
        } else {
            MobiusMap {
                a: -a / s,
                b: b / s,
                c: -c / s,
                d: d / s,
                reversing: true,
            }
        })
    }

    /// `z ↦ M(−z̄)` for the orientation-preserving `M`.
    pub fn with_reflection(self) -> Self {
        MobiusMap {
            reversing: !self.reversing,
            ..self
        }
    }

    /// The reflection `(u, v) ↦ (−u, v)`.
    pub fn reflection() -> Self {
        Self::IDENTITY.with_reflection()
    }

    pub fn translation(t: f64) -> Self {
        MobiusMap {
            b: t,
            ..Self::IDENTITY
        }
    }

    pub fn dilation(k: f64) -> Result<Self> {
        Self::new(k, 0.0, 0.0, 1.0)
    }

    /// Rotation by `phi` about `i`.
    pub fn rotation_about_i(phi: f64) -> Self {
        let (s, c) = (0.5 * phi).sin_cos();
        MobiusMap {
            a: c,
            b: s,
            c: -s,
            d: c,
            reversing: false,
        }
    }

    fn pre(&self, z: C64) -> C64 {
        if self.reversing {
            C64::new(-z.re, z.im)
        } else {
            z
        }
    }

    /// Action on a half-plane point given as a complex number.
    pub fn apply_z(&self, z: C64) -> C64 {
        let w = self.pre(z);
        let den = w * self.c + self.d;
        let out = (w * self.a + self.b) / den;
        // Keep the image in the open half-plane despite rounding.
        C64::new(out.re, out.im.max(f64::MIN_POSITIVE))
    }

    pub fn apply(&self, p: &H2Point) -> H2Point {
        H2Point::from_z(self.apply_z(p.z())).convert(p.model)
    }

    /// Image of the unit tangent direction at angle `phi` (measured from
    /// `∂u`) at `z`. Continuous in `z` and `phi`, so it lifts to angles that
    /// are not reduced mod 2π.
    pub fn tangent_angle(&self, z: C64, phi: f64) -> f64 {
        let (w, phi) = if self.reversing {
            (C64::new(-z.re, z.im), std::f64::consts::PI - phi)
        } else {
            (z, phi)
        };
        phi - 2.0 * (w * self.c + self.d).arg()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let o = if self.reversing {
            [other.a, -other.b, -other.c, other.d]
        } else {
            [other.a, other.b, other.c, other.d]
        };
        MobiusMap {
            a: self.a * o[0] + self.b * o[2],
            b: self.a * o[1] + self.b * o[3],
            c: self.c * o[0] + self.d * o[2],
            d: self.c * o[1] + self.d * o[3],
            reversing: self.reversing != other.reversing,
        }
    }

    pub fn inverse(&self) -> MobiusMap {
        let (a, b, c, d) = (self.d, -self.b, -self.c, self.a);
        if self.reversing {
            MobiusMap {
                a,
                b: -b,
                c: -c,
                d,
                reversing: true,
            }
        } else {
            MobiusMap {
                a,
                b,
                c,
                d,
                reversing: false,
            }
        }
    }

    /// Orientation-preserving map with `0 ↦ a` and `∞ ↦ b` (either may be
    /// `None` for `∞`), carrying the imaginary axis onto the geodesic `a → b`.
    pub fn sending_axis_to(a: Option<f64>, b: Option<f64>) -> Result<MobiusMap> {
        match (a, b) {
            (Some(a), None) => Ok(MobiusMap::translation(a)),
            (None, Some(b)) => MobiusMap::new(b, -1.0, 1.0, 0.0),
            (Some(a), Some(b)) if b > a => MobiusMap::new(b, a, 1.0, 1.0),
            (Some(a), Some(b)) if b < a => MobiusMap::new(b, -a, 1.0, -1.0),
            _ => Err(GeoError::Degenerate("geodesic endpoints coincide".into())),
        }
    }
}
