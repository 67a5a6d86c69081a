use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::rational::to_f64;
use crate::error::{GeoError, Result};
use crate::geometry_core::{GeometryId, Vector};
use crate::hyperbolic_plane::{MobiusMap, C64};

/// Taxonomy of product geodesics by their two speed components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeodesicClass {
    Horizontal,
    Vertical,
    Slant,
}

impl fmt::Display for GeodesicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeodesicClass::Horizontal => "horizontal",
            GeodesicClass::Vertical => "vertical",
            GeodesicClass::Slant => "slant",
        })
    }
}

/// Initial data in the base factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "factor", rename_all = "lowercase")]
pub enum BaseData {
    /// Universal-cover circle coordinate and direction of travel (±1).
    Circle { r1: f64, direction: f64 },
    /// Half-plane point and the direction of travel as an angle from `∂u`.
    Hyperbolic { point: [f64; 2], angle: f64 },
    /// Point of the unit sphere and a unit tangent vector there.
    Sphere { point: [f64; 3], tangent: [f64; 3] },
}

/// A unit-speed geodesic of the cylinder, `H²×ℝ` or `S²×ℝ`:
/// base geodesic at speed `speeds[0]`, height moving at speed `speeds[1]`,
/// with `speeds[0]² + speeds[1]² = 1` and `speeds[0] ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductGeodesic {
    pub geometry: GeometryId,
    pub class: GeodesicClass,
    pub base: BaseData,
    pub speeds: [f64; 2],
    pub height: f64,
    /// Exact slope `speeds[1] / speeds[0]` when it was supplied as a rational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_slope: Option<[i64; 2]>,
}

const CLASS_EPS: f64 = 1e-15;

impl ProductGeodesic {
    /// Validates and normalizes the base data and the speeds.
    pub fn new(geometry: GeometryId, base: BaseData, speeds: [f64; 2], height: f64) -> Result<Self> {
        let [mut a, b] = speeds;
        if !(a.is_finite() && b.is_finite() && height.is_finite()) {
            return Err(GeoError::InvalidArgument("non-finite geodesic data".into()));
        }
        let s = a.hypot(b);
        if s == 0.0 {
            return Err(GeoError::DegenerateVelocity);
        }
        let mut base = match (geometry, base) {
            (GeometryId::Cylinder, BaseData::Circle { r1, direction }) if direction != 0.0 => {
                BaseData::Circle { r1, direction: direction.signum() }
            }
            (GeometryId::H2xR, BaseData::Hyperbolic { point, angle }) if point[1] > 0.0 => {
                BaseData::Hyperbolic { point, angle }
            }
            (GeometryId::S2xR, BaseData::Sphere { point, tangent }) => {
                let p = Vector::<3>::from(point);
                let n = p.norm();
                if !(n > 0.0) {
                    return Err(GeoError::OutOfChart(point.to_vec()));
                }
                let p = p / n;
                let t = Vector::<3>::from(tangent);
                let t = t - p * p.dot(&t);
                let tn = t.norm();
                let t = if tn > 0.0 {
                    t / tn
                } else if a == 0.0 {
                    any_tangent(&p)
                } else {
                    return Err(GeoError::DegenerateVelocity);
                };
                BaseData::Sphere { point: p.into(), tangent: t.into() }
            }
            (g, b) => {
                return Err(GeoError::InvalidArgument(format!(
                    "base data {b:?} does not belong to {g}"
                )))
            }
        };
        if a < 0.0 {
            a = -a;
            base = reversed(base);
        }
        let (a, b) = (a / s, b / s);
        let class = if a <= CLASS_EPS {
            GeodesicClass::Vertical
        } else if b.abs() <= CLASS_EPS {
            GeodesicClass::Horizontal
        } else {
            GeodesicClass::Slant
        };
        let (a, b) = match class {
            GeodesicClass::Vertical => (0.0, b.signum()),
            GeodesicClass::Horizontal => (1.0, 0.0),
            GeodesicClass::Slant => (a, b),
        };
        Ok(ProductGeodesic {
            geometry,
            class,
            base,
            speeds: [a, b],
            height,
            exact_slope: None,
        })
    }

    pub fn cylinder(r1: f64, height: f64, direction: f64, speeds: [f64; 2]) -> Result<Self> {
        Self::new(GeometryId::Cylinder, BaseData::Circle { r1, direction }, speeds, height)
    }

    pub fn h2xr(point: [f64; 2], angle: f64, height: f64, speeds: [f64; 2]) -> Result<Self> {
        Self::new(GeometryId::H2xR, BaseData::Hyperbolic { point, angle }, speeds, height)
    }

    pub fn s2xr(point: [f64; 3], tangent: [f64; 3], height: f64, speeds: [f64; 2]) -> Result<Self> {
        Self::new(GeometryId::S2xR, BaseData::Sphere { point, tangent }, speeds, height)
    }

    /// Cylinder or `S²×ℝ` geodesic whose slope (`vertical / base` speed) is
    /// the exact rational `slope`, traveling in the positive base direction.
    pub fn with_exact_slope(mut self, slope: Rational64) -> Result<Self> {
        if self.geometry == GeometryId::H2xR {
            return Err(GeoError::Unsupported("exact slopes on H²×ℝ".into()));
        }
        let r = to_f64(slope);
        let mut g = ProductGeodesic::new(self.geometry, self.base, [1.0, r], self.height)?;
        g.exact_slope = Some([*slope.numer(), *slope.denom()]);
        std::mem::swap(&mut self, &mut g);
        Ok(self)
    }

    pub fn exact_slope(&self) -> Option<Rational64> {
        self.exact_slope.map(|[n, d]| Rational64::new(n, d))
    }

    pub fn base_speed(&self) -> f64 {
        self.speeds[0]
    }

    pub fn vertical_speed(&self) -> f64 {
        self.speeds[1]
    }

    /// `vertical / base` speed; `±∞` for vertical geodesics.
    pub fn slope(&self) -> f64 {
        match self.class {
            GeodesicClass::Vertical => f64::INFINITY,
            _ => self.speeds[1] / self.speeds[0],
        }
    }

    /// Point at arc length `t`, in the geometry's coordinates (universal
    /// cover coordinates for the cylinder).
    pub fn at(&self, t: f64) -> Vec<f64> {
        let [a, b] = self.speeds;
        let h = self.height + b * t;
        match self.base {
            BaseData::Circle { r1, direction } => vec![r1 + direction * a * t, h],
            BaseData::Hyperbolic { point, angle } => {
                let z = hyperbolic_point(point, angle, a * t);
                vec![z.re, z.im, h]
            }
            BaseData::Sphere { point, tangent } => {
                let (s, c) = (a * t).sin_cos();
                let p = Vector::<3>::from(point) * c + Vector::<3>::from(tangent) * s;
                vec![p[0], p[1], p[2], h]
            }
        }
    }

    /// Initial velocity in chart coordinates.
    pub fn initial_velocity(&self) -> Vec<f64> {
        let [a, b] = self.speeds;
        match self.base {
            BaseData::Circle { direction, .. } => vec![direction * a, b],
            BaseData::Hyperbolic { point, angle } => {
                let v = point[1];
                vec![a * v * angle.cos(), a * v * angle.sin(), b]
            }
            BaseData::Sphere { tangent, .. } => {
                vec![a * tangent[0], a * tangent[1], a * tangent[2], b]
            }
        }
    }

    /// Length of one trip around a closed base geodesic, if the base is one.
    pub fn base_period(&self) -> Option<f64> {
        if self.class == GeodesicClass::Vertical {
            return None;
        }
        match self.base {
            BaseData::Circle { .. } => Some(1.0 / self.speeds[0]),
            BaseData::Sphere { .. } => Some(std::f64::consts::TAU / self.speeds[0]),
            BaseData::Hyperbolic { .. } => None,
        }
    }

    /// Height gained per trip around a closed base geodesic.
    pub fn rise_per_wrap(&self) -> Option<f64> {
        self.base_period().map(|p| p * self.speeds[1])
    }
}

fn reversed(base: BaseData) -> BaseData {
    match base {
        BaseData::Circle { r1, direction } => BaseData::Circle { r1, direction: -direction },
        BaseData::Hyperbolic { point, angle } => BaseData::Hyperbolic {
            point,
            angle: angle + std::f64::consts::PI,
        },
        BaseData::Sphere { point, tangent } => BaseData::Sphere {
            point,
            tangent: tangent.map(|c| -c),
        },
    }
}

pub(crate) fn any_tangent(p: &Vector<3>) -> Vector<3> {
    let e = if p[0].abs() < 0.9 { Vector::<3>::x() } else { Vector::<3>::y() };
    let t = e - p * p.dot(&e);
    t / t.norm()
}

/// Point at hyperbolic distance `s` from `point` along direction `angle`.
pub(crate) fn hyperbolic_point(point: [f64; 2], angle: f64, s: f64) -> C64 {
    let rot = MobiusMap::rotation_about_i(angle - std::f64::consts::FRAC_PI_2);
    let w = rot.apply_z(C64::new(0.0, s.exp()));
    C64::new(point[0] + point[1] * w.re, point[1] * w.im)
}

/// Point of `S¹×ℝ` with the circle coordinate reduced to `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderPoint {
    pub circle: f64,
    pub height: f64,
}

impl CylinderPoint {
    pub fn new(r1: f64, height: f64) -> Self {
        let mut c = r1.rem_euclid(1.0);
        if c >= 1.0 {
            c = 0.0;
        }
        CylinderPoint { circle: c, height }
    }

    /// Distance on the flat cylinder of circumference 1.
    pub fn distance(&self, other: &CylinderPoint) -> f64 {
        let d = (self.circle - other.circle).rem_euclid(1.0);
        d.min(1.0 - d).hypot(self.height - other.height)
    }
}

/// Signed slope of a cylinder geodesic: height gained per trip around the
/// circle in the direction of increasing circle coordinate. `0` for
/// horizontal, `∞` for vertical geodesics.
pub fn cylinder_slope(g: &ProductGeodesic) -> Result<f64> {
    match (g.geometry, g.base) {
        (GeometryId::Cylinder, BaseData::Circle { direction, .. }) => Ok(match g.class {
            GeodesicClass::Vertical => f64::INFINITY,
            GeodesicClass::Horizontal => 0.0,
            GeodesicClass::Slant => g.speeds[1] / (direction * g.speeds[0]),
        }),
        _ => Err(GeoError::Unsupported(format!("cylinder slope of a {} geodesic", g.geometry))),
    }
}

/// `(r1, r2) ↦ (r1 + α r2, r2)` on universal-cover coordinates.
pub fn twist_cover(alpha: f64, p: [f64; 2]) -> [f64; 2] {
    [p[0] + alpha * p[1], p[1]]
}

/// The twisting map `(r1, r2) ↦ (r1 + α r2 mod 1, r2)`.
pub fn twisting_map(alpha: f64, p: &CylinderPoint) -> CylinderPoint {
    let [r1, r2] = twist_cover(alpha, [p.circle, p.height]);
    CylinderPoint::new(r1, r2)
}

/// Replaces the last (height) coordinate `h` by `a h + b`.
pub fn affine_r_map(a: f64, b: f64, p: &[f64]) -> Result<Vec<f64>> {
    if a == 0.0 || !a.is_finite() {
        return Err(GeoError::NotBijective(format!("affine factor {a}")));
    }
    let mut out = p.to_vec();
    let h = out.last_mut().ok_or_else(|| GeoError::InvalidArgument("empty point".into()))?;
    *h = a * *h + b;
    Ok(out)
}
