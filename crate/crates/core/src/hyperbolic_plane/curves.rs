use std::fmt;

use serde::{Deserialize, Serialize};

use super::mobius::MobiusMap;
use super::model::{disk_to_half_plane, half_plane_distance, H2Point, Model, C64};
use crate::error::{GeoError, Result};
use crate::geometry_core::{curve_geodesic_curvature, CurveSample, H2Chart};

/// A point of `ℝ ∪ {∞}` on the boundary of the half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdealPoint {
    Real(f64),
    Infinity,
}

impl IdealPoint {
    fn finite(self) -> Option<f64> {
        match self {
            IdealPoint::Real(x) => Some(x),
            IdealPoint::Infinity => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Geodesic,
    Hypercycle,
    Horocycle,
    Circle,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::Geodesic => "geodesic",
            CurveKind::Hypercycle => "hypercycle",
            CurveKind::Horocycle => "horocycle",
            CurveKind::Circle => "circle",
        })
    }
}

/// Defining data of a constant-curvature curve. Points are half-plane
/// coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveParams {
    /// Oriented from `ends[0]` to `ends[1]`.
    Geodesic { ends: [IdealPoint; 2] },
    /// Points at signed distance `distance` from the oriented axis; positive
    /// distances lie to the right of the direction of travel.
    Hypercycle { axis: [IdealPoint; 2], distance: f64 },
    Horocycle { ideal: IdealPoint, through: [f64; 2] },
    Circle { center: [f64; 2], radius: f64 },
}

/// Geodesic, hypercycle, horocycle or circle of `H²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantCurvatureCurve {
    pub params: CurveParams,
}

#[derive(Serialize)]
struct CurveRecord<'a> {
    kind: CurveKind,
    params: &'a CurveParams,
    #[serde(rename = "K")]
    k: f64,
}

impl ConstantCurvatureCurve {
    pub fn geodesic(a: IdealPoint, b: IdealPoint) -> Result<Self> {
        Self::checked(CurveParams::Geodesic { ends: [a, b] })
    }

    pub fn hypercycle(a: IdealPoint, b: IdealPoint, distance: f64) -> Result<Self> {
        Self::checked(CurveParams::Hypercycle {
            axis: [a, b],
            distance,
        })
    }

    pub fn horocycle(ideal: IdealPoint, through: &H2Point) -> Result<Self> {
        let z = through.z();
        if let IdealPoint::Real(x) = ideal {
            if !x.is_finite() {
                return Err(GeoError::InvalidArgument("ideal point must be finite or ∞".into()));
            }
        }
        Ok(ConstantCurvatureCurve {
            params: CurveParams::Horocycle {
                ideal,
                through: [z.re, z.im],
            },
        })
    }

    pub fn circle(center: &H2Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeoError::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        let z = center.z();
        Ok(ConstantCurvatureCurve {
            params: CurveParams::Circle {
                center: [z.re, z.im],
                radius,
            },
        })
    }

    fn checked(params: CurveParams) -> Result<Self> {
        let c = ConstantCurvatureCurve { params };
        if let CurveParams::Hypercycle { distance, .. } = params {
            if !distance.is_finite() {
                return Err(GeoError::InvalidArgument("distance must be finite".into()));
            }
        }
        c.axis_map()?;
        Ok(c)
    }

    pub fn kind(&self) -> CurveKind {
        match self.params {
            CurveParams::Geodesic { .. } => CurveKind::Geodesic,
            CurveParams::Hypercycle { distance, .. } if distance == 0.0 => CurveKind::Geodesic,
            CurveParams::Hypercycle { .. } => CurveKind::Hypercycle,
            CurveParams::Horocycle { .. } => CurveKind::Horocycle,
            CurveParams::Circle { .. } => CurveKind::Circle,
        }
    }

    /// Unsigned geodesic curvature: `0`, `tanh |d|`, `1`, `coth r`.
    pub fn curvature(&self) -> f64 {
        match self.params {
            CurveParams::Geodesic { .. } => 0.0,
            CurveParams::Hypercycle { distance, .. } => distance.abs().tanh(),
            CurveParams::Horocycle { .. } => 1.0,
            CurveParams::Circle { radius, .. } => 1.0 / radius.tanh(),
        }
    }

    /// Isometry carrying the imaginary axis (oriented upward) onto the axis.
    fn axis_map(&self) -> Result<MobiusMap> {
        let ends = match self.params {
            CurveParams::Geodesic { ends } => ends,
            CurveParams::Hypercycle { axis, .. } => axis,
            _ => return Ok(MobiusMap::IDENTITY),
        };
        MobiusMap::sending_axis_to(ends[0].finite(), ends[1].finite())
    }

    /// Half-plane point at arc length `s`.
    pub fn point_at(&self, s: f64) -> C64 {
        match self.params {
            CurveParams::Geodesic { .. } => {
                let m = self.axis_map().expect("validated at construction");
                m.apply_z(C64::new(0.0, s.exp()))
            }
            CurveParams::Hypercycle { distance, .. } => {
                let m = self.axis_map().expect("validated at construction");
                let (sh, ch) = (distance.sinh(), distance.cosh());
                let dir = C64::new(sh / ch, 1.0 / ch);
                m.apply_z(dir * (s * dir.im).exp())
            }
            CurveParams::Horocycle { ideal, through } => {
                let p = C64::new(through[0], through[1]);
                match ideal {
                    IdealPoint::Infinity => p + s * p.im,
                    IdealPoint::Real(xi) => {
                        let q = -1.0 / (p - xi);
                        let w = q + s * q.im;
                        xi - 1.0 / w
                    }
                }
            }
            CurveParams::Circle { center, radius } => {
                let w = C64::from_polar((0.5 * radius).tanh(), s / radius.sinh());
                let z = disk_to_half_plane(w);
                C64::new(center[0] + center[1] * z.re, center[1] * z.im)
            }
        }
    }

    /// `n` points at uniformly spaced arc lengths in `[lo, hi]`.
    pub fn sample(&self, lo: f64, hi: f64, n: usize, model: Model) -> Result<CurveSample> {
        if n < 2 || !(hi > lo) {
            return Err(GeoError::InvalidArgument("need n ≥ 2 and hi > lo".into()));
        }
        let params: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let points = params
            .iter()
            .map(|&s| {
                let z = self.point_at(s);
                H2Point::from_z(z).convert(model).coords.to_vec()
            })
            .collect();
        CurveSample::new(params, points)
    }

    /// Signed hyperbolic distance test: `|d(p, curve)| ≤ tol`.
    pub fn contains(&self, p: &H2Point, tol: f64) -> bool {
        self.offset(p.z()).abs() <= tol
    }

    /// Hyperbolic distance from `z` to the curve (signed for hypercycles and
    /// geodesics: positive to the right of the axis).
    pub fn offset(&self, z: C64) -> f64 {
        match self.params {
            CurveParams::Geodesic { .. } => self.axis_offset(z),
            CurveParams::Hypercycle { distance, .. } => self.axis_offset(z) - distance,
            CurveParams::Horocycle { ideal, through } => {
                let p = C64::new(through[0], through[1]);
                let (p, z) = match ideal {
                    IdealPoint::Infinity => (p, z),
                    IdealPoint::Real(xi) => (-1.0 / (p - xi), -1.0 / (z - xi)),
                };
                (z.im / p.im).ln().abs()
            }
            CurveParams::Circle { center, radius } => {
                half_plane_distance(z, C64::new(center[0], center[1])) - radius
            }
        }
    }

    fn axis_offset(&self, z: C64) -> f64 {
        let m = self.axis_map().expect("validated at construction");
        let w = m.inverse().apply_z(z);
        (w.re / w.im).asinh()
    }

    /// Arc-length parameter of the point of a geodesic nearest to `z`.
    pub fn arc_param(&self, z: C64) -> f64 {
        let m = self.axis_map().expect("validated at construction");
        m.inverse().apply_z(z).norm().ln()
    }

    /// `{kind, params, K}` record.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&CurveRecord {
            kind: self.kind(),
            params: &self.params,
            k: self.curvature(),
        })?)
    }
}

/// The geodesic through `p` and `q`, oriented from `p` to `q`.
pub fn geodesic_between(p: &H2Point, q: &H2Point) -> Result<ConstantCurvatureCurve> {
    let (z1, z2) = (p.z(), q.z());
    if half_plane_distance(z1, z2) < 1e-14 {
        return Err(GeoError::Degenerate("geodesic through a single point".into()));
    }
    let du = z2.re - z1.re;
    let scale = z1.norm().max(z2.norm()).max(1.0);
    if du.abs() <= 1e-15 * scale {
        let u = 0.5 * (z1.re + z2.re);
        let ends = if z2.im > z1.im {
            [IdealPoint::Real(u), IdealPoint::Infinity]
        } else {
            [IdealPoint::Infinity, IdealPoint::Real(u)]
        };
        return ConstantCurvatureCurve::geodesic(ends[0], ends[1]);
    }
    let c = (z2.norm_sqr() - z1.norm_sqr()) / (2.0 * du);
    let r = (z1 - c).norm();
    let ends = if du > 0.0 {
        [IdealPoint::Real(c - r), IdealPoint::Real(c + r)]
    } else {
        [IdealPoint::Real(c + r), IdealPoint::Real(c - r)]
    };
    ConstantCurvatureCurve::geodesic(ends[0], ends[1])
}

/// Unit Euclidean tangent direction at `p` of the geodesic from `p` to `q`
/// (half-plane coordinates; angles in a conformal model are Euclidean).
pub fn tangent_toward(p: C64, q: C64) -> Result<C64> {
    let g = geodesic_between(&H2Point::from_z(p), &H2Point::from_z(q))?;
    let dir = match g.params {
        CurveParams::Geodesic { ends: [_, IdealPoint::Infinity] } => C64::new(0.0, 1.0),
        CurveParams::Geodesic { ends: [IdealPoint::Infinity, _] } => C64::new(0.0, -1.0),
        CurveParams::Geodesic { ends: [IdealPoint::Real(a), IdealPoint::Real(b)] } => {
            let c = 0.5 * (a + b);
            let radial = p - c;
            let t = C64::new(-radial.im, radial.re);
            if b > a { -t } else { t }
        }
        _ => unreachable!("geodesic_between returns a geodesic"),
    };
    Ok(dir / dir.norm())
}

/// Result of [`classify_curve`].
#[derive(Clone, Debug, Serialize)]
pub struct CurveClassification {
    /// `None` when the curvature is not constant along the sample.
    pub kind: Option<CurveKind>,
    #[serde(rename = "K")]
    pub curvature: f64,
    pub spread: f64,
    pub estimates: Vec<f64>,
}

/// Width of the geodesic and horocycle bands.
pub const CURVATURE_BAND: f64 = 1e-3;

/// Estimates the geodesic curvature at nine interior parameters and sorts
/// the curve into geodesic / hypercycle / horocycle / circle.
pub fn classify_curve(sample: &CurveSample, model: Model) -> Result<CurveClassification> {
    if sample.dim != 2 || sample.len() < 20 {
        return Err(GeoError::InvalidArgument(
            "need a 2-dimensional sample with at least 20 points".into(),
        ));
    }
    let hp = if model == Model::HalfPlane {
        sample.clone()
    } else {
        let mut points = Vec::with_capacity(sample.len());
        for p in &sample.points {
            points.push(H2Point::new(model, [p[0], p[1]])?.convert(Model::HalfPlane).coords.to_vec());
        }
        CurveSample::new(sample.params.clone(), points)?
    };
    let n = hp.len();
    let lo = hp.params[2];
    let hi = hp.params[n - 3];
    let estimates = (0..9)
        .map(|i| curve_geodesic_curvature(&H2Chart, &hp, lo + (hi - lo) * i as f64 / 8.0))
        .collect::<Result<Vec<f64>>>()?;
    let max = estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = estimates.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let spread = max - min;
    let kind = if spread >= CURVATURE_BAND * mean.max(1.0) {
        None
    } else if mean < CURVATURE_BAND {
        Some(CurveKind::Geodesic)
    } else if (mean - 1.0).abs() < CURVATURE_BAND {
        Some(CurveKind::Horocycle)
    } else if mean < 1.0 {
        Some(CurveKind::Hypercycle)
    } else {
        Some(CurveKind::Circle)
    };
    Ok(CurveClassification {
        kind,
        curvature: mean,
        spread,
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(u: f64, v: f64) -> H2Point {
        H2Point::half_plane(u, v).unwrap()
    }

    #[test]
    fn perpendicular_bisector_arc() {
        let g = geodesic_between(&hp(-1.0, 1.0), &hp(1.0, 1.0)).unwrap();
        let CurveParams::Geodesic { ends: [IdealPoint::Real(a), IdealPoint::Real(b)] } = g.params else {
            panic!("expected a semicircle");
        };
        assert!((0.5 * (a + b)).abs() < 1e-15);
        assert!((0.5 * (b - a) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn vertical_geodesic() {
        let g = geodesic_between(&hp(0.0, 1.0), &hp(0.0, 3.0)).unwrap();
        assert_eq!(g.params, CurveParams::Geodesic { ends: [IdealPoint::Real(0.0), IdealPoint::Infinity] });
    }

    #[test]
    fn disk_diameter() {
        let p = H2Point::disk(0.0, 0.0).unwrap();
        let q = H2Point::disk(0.5, 0.0).unwrap();
        let g = geodesic_between(&p, &q).unwrap();
        let s = g.sample(-2.0, 2.0, 21, Model::Disk).unwrap();
        assert!(s.points.iter().all(|w| w[1].abs() < 1e-12));
        assert!(g.contains(&p, 1e-10) && g.contains(&q, 1e-10));
    }

    #[test]
    fn same_point_is_degenerate() {
        assert!(geodesic_between(&hp(0.0, 1.0), &hp(0.0, 1.0)).is_err());
    }

    #[test]
    fn sampled_points_are_on_their_curves() {
        let curves = [
            ConstantCurvatureCurve::geodesic(IdealPoint::Real(-1.0), IdealPoint::Real(3.0)).unwrap(),
            ConstantCurvatureCurve::hypercycle(IdealPoint::Real(2.0), IdealPoint::Infinity, 0.5).unwrap(),
            ConstantCurvatureCurve::horocycle(IdealPoint::Real(1.0), &hp(0.5, 0.7)).unwrap(),
            ConstantCurvatureCurve::circle(&hp(0.3, 2.0), 1.0).unwrap(),
        ];
        for c in curves {
            for i in 0..20 {
                let z = c.point_at(-2.0 + 0.2 * i as f64);
                assert!(c.offset(z).abs() < 1e-9, "{:?} {}", c.kind(), c.offset(z));
            }
        }
    }

    #[test]
    fn sampling_is_unit_speed() {
        let c = ConstantCurvatureCurve::circle(&hp(0.3, 2.0), 0.7).unwrap();
        let ds = 1e-4;
        let d = half_plane_distance(c.point_at(0.5), c.point_at(0.5 + ds));
        assert!((d / ds - 1.0).abs() < 1e-6);
    }

    #[test]
    fn classifies_each_kind() {
        let cases = [
            (ConstantCurvatureCurve::geodesic(IdealPoint::Real(-1.0), IdealPoint::Real(3.0)).unwrap(), CurveKind::Geodesic),
            (ConstantCurvatureCurve::hypercycle(IdealPoint::Real(0.0), IdealPoint::Infinity, 0.5).unwrap(), CurveKind::Hypercycle),
            (ConstantCurvatureCurve::horocycle(IdealPoint::Infinity, &hp(0.0, 1.0)).unwrap(), CurveKind::Horocycle),
            (ConstantCurvatureCurve::circle(&hp(0.0, 1.0), 1.0).unwrap(), CurveKind::Circle),
        ];
        for (c, kind) in cases {
            let s = c.sample(0.0, 2.0, 401, Model::HalfPlane).unwrap();
            let r = classify_curve(&s, Model::HalfPlane).unwrap();
            assert_eq!(r.kind, Some(kind));
            assert!((r.curvature - c.curvature()).abs() < 1e-4, "{kind}: {}", r.curvature);
        }
    }

    #[test]
    fn json_record() {
        let c = ConstantCurvatureCurve::horocycle(IdealPoint::Infinity, &hp(0.0, 1.0)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&c.to_json().unwrap()).unwrap();
        assert_eq!(v["kind"], "horocycle");
        assert_eq!(v["K"], 1.0);
    }
}
