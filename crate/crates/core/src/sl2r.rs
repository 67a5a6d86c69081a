//! `SL₂~` as the universal cover of the unit tangent bundle of `H²`.
//!
//! Points are `(u, v, θ)`: a half-plane base point and the unwrapped angle of
//! a unit vector measured from `∂u`. The metric is
//! `(du² + dv²)/v² + (dθ + du/v)²`, so horizontal curves satisfy
//! `θ' = −u'/v` (Levi-Civita transport) and fibers have length `2π`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::geometry_core::{sample_jet, CurveSample, ParamSurface, Vector};
use crate::hyperbolic_plane::{
    classify_curve, geodesic_between, triangle_angles, triangle_holonomy_target, CurveKind,
    CurveParams, H2Point, IdealPoint, MobiusMap, Model, C64,
};

/// Projected extent below which a sample counts as a fiber.
pub const VERTICAL_EXTENT: f64 = 1e-9;

/// A based unit vector of `H²` together with its winding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "SlRecord", try_from = "SlRecord")]
pub struct SLPoint {
    pub base: H2Point,
    /// Unwrapped; `θ` and `θ + 2π` are different points.
    pub angle: f64,
}

#[derive(Serialize, Deserialize)]
struct SlRecord {
    u: f64,
    v: f64,
    theta: f64,
}

impl From<SLPoint> for SlRecord {
    fn from(p: SLPoint) -> Self {
        let z = p.base.z();
        SlRecord {
            u: z.re,
            v: z.im,
            theta: p.angle,
        }
    }
}

impl TryFrom<SlRecord> for SLPoint {
    type Error = GeoError;
    fn try_from(r: SlRecord) -> Result<Self> {
        SLPoint::new(r.u, r.v, r.theta)
    }
}

impl SLPoint {
    pub fn new(u: f64, v: f64, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(GeoError::InvalidArgument(format!("angle {theta} is not finite")));
        }
        Ok(SLPoint {
            base: H2Point::half_plane(u, v)?,
            angle: theta,
        })
    }

    pub fn from_vector(p: &Vector<3>) -> Result<Self> {
        SLPoint::new(p[0], p[1], p[2])
    }

    /// Chart coordinates `(u, v, θ)`.
    pub fn to_vector(&self) -> Vector<3> {
        let z = self.base.z();
        Vector::<3>::new(z.re, z.im, self.angle)
    }
}

impl fmt::Display for SLPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.base.z();
        write!(f, "(u={}, v={}, θ={})", z.re, z.im, self.angle)
    }
}

pub fn project(p: &SLPoint) -> H2Point {
    p.base
}

/// Angle change of a parallel unit vector carried along the geodesic from
/// `a` to `b`. Along a semicircle about `c` it equals the change in
/// `arg(z − c)`; along a vertical line it is zero.
pub fn transport_rotation(a: C64, b: C64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let g = geodesic_between(&H2Point::from_z(a), &H2Point::from_z(b))?;
    Ok(match g.params {
        CurveParams::Geodesic {
            ends: [IdealPoint::Real(p), IdealPoint::Real(q)],
        } => {
            let c = C64::new(0.5 * (p + q), 0.0);
            (b - c).arg() - (a - c).arg()
        }
        _ => 0.0,
    })
}

/// `t_x(y)`: parallel transport of the unit vector `x` along the `H²`
/// geodesic from its base point to `y`.
pub fn parallel_transport_lift(x: &SLPoint, y: &H2Point) -> Result<SLPoint> {
    let a = x.base.z();
    let b = y.z();
    Ok(SLPoint {
        base: H2Point::from_z(b).convert(x.base.model),
        angle: x.angle + transport_rotation(a, b)?,
    })
}

/// Holonomy of a triangle together with the angle-sum prediction.
#[derive(Clone, Debug, Serialize)]
pub struct HolonomyReport {
    pub vertices: [[f64; 2]; 3],
    pub angles: [f64; 3],
    /// `π − Σ angles`.
    pub defect: f64,
    /// Rotation of a unit vector transported once around the triangle.
    pub transport_defect: f64,
}

impl HolonomyReport {
    pub fn difference(&self) -> f64 {
        (self.transport_defect - self.defect).abs()
    }
}

pub fn holonomy_report(triangle: &[H2Point; 3]) -> Result<HolonomyReport> {
    let [a, b, c] = triangle;
    let angles = triangle_angles(a, b, c)?;
    let z = [a.z(), b.z(), c.z()];
    let mut turn = 0.0;
    for i in 0..3 {
        turn += transport_rotation(z[i], z[(i + 1) % 3])?;
    }
    Ok(HolonomyReport {
        vertices: z.map(|w| [w.re, w.im]),
        angles,
        defect: triangle_holonomy_target(angles)?,
        transport_defect: turn.abs(),
    })
}

/// Rotation picked up by parallel transport once around the triangle.
pub fn holonomy(triangle: &[H2Point; 3]) -> Result<f64> {
    Ok(holonomy_report(triangle)?.transport_defect)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "projection", rename_all = "lowercase")]
pub enum SlGeodesicClass {
    Horizontal,
    Vertical,
    /// Projects to a curve of constant nonzero curvature.
    Slant(CurveKind),
}

impl fmt::Display for SlGeodesicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlGeodesicClass::Horizontal => f.write_str("horizontal"),
            SlGeodesicClass::Vertical => f.write_str("vertical"),
            SlGeodesicClass::Slant(k) => write!(f, "slant({k})"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SlClassification {
    pub class: SlGeodesicClass,
    /// Geodesic curvature of the projection (0 for vertical).
    #[serde(rename = "K")]
    pub curvature: f64,
    /// Mean of `|θ' + u'/v|`, the speed along the fiber direction.
    pub vertical_speed: f64,
    pub vertical_speed_std: f64,
    /// Mean speed of the projection, `|(u', v')| / v`.
    pub base_speed: f64,
}

impl SlClassification {
    /// Vertical speed per unit of projected arc length.
    pub fn vertical_rate(&self) -> f64 {
        self.vertical_speed / self.base_speed
    }
}

/// Fiber and base speeds at 9 interior parameters.
fn speeds(sample: &CurveSample) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = sample.len();
    let lo = sample.params[2];
    let hi = sample.params[n - 3];
    let mut fiber = Vec::with_capacity(9);
    let mut base = Vec::with_capacity(9);
    for i in 0..9 {
        let t = lo + (hi - lo) * i as f64 / 8.0;
        let (x, dx, _) = sample_jet::<3>(sample, t)?;
        fiber.push((dx[2] + dx[0] / x[1]).abs());
        base.push(dx[0].hypot(dx[1]) / x[1]);
    }
    Ok((fiber, base))
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
    (m, var.sqrt())
}

/// Sorts a sampled geodesic of the `(u, v, θ)` chart into horizontal,
/// vertical or slant by the curvature of its projection.
pub fn classify_sl_geodesic(sample: &CurveSample) -> Result<SlClassification> {
    if sample.dim != 3 || sample.len() < 20 {
        return Err(GeoError::InvalidArgument(
            "need a 3-dimensional sample with at least 20 points".into(),
        ));
    }
    let first = &sample.points[0];
    let extent = sample
        .points
        .iter()
        .map(|p| (p[0] - first[0]).hypot(p[1] - first[1]))
        .fold(0.0, f64::max);
    if extent < VERTICAL_EXTENT {
        let (fiber, _) = speeds(sample)?;
        let (m, s) = mean_std(&fiber);
        return Ok(SlClassification {
            class: SlGeodesicClass::Vertical,
            curvature: 0.0,
            vertical_speed: m,
            vertical_speed_std: s,
            base_speed: 0.0,
        });
    }
    let projected = classify_curve(&sample.project(2), Model::HalfPlane)?;
    let kind = projected.kind.ok_or_else(|| {
        GeoError::Unclassifiable(format!(
            "projected curvature varies by {:e} (integration error?)",
            projected.spread
        ))
    })?;
    let (fiber, base) = speeds(sample)?;
    let (vm, vs) = mean_std(&fiber);
    let (bm, _) = mean_std(&base);
    let class = match kind {
        CurveKind::Geodesic => SlGeodesicClass::Horizontal,
        k => SlGeodesicClass::Slant(k),
    };
    Ok(SlClassification {
        class,
        curvature: projected.curvature,
        vertical_speed: vm,
        vertical_speed_std: vs,
        base_speed: bm,
    })
}

/// Least-squares line `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(GeoError::InvalidArgument("need at least two points".into()));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(GeoError::Degenerate("all abscissae coincide".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(LinearFit {
        slope,
        intercept,
        rms,
    })
}

/// Fits vertical speed per projected arc length against the projected
/// curvature across a family of classified slants.
pub fn vertical_speed_law(slants: &[SlClassification]) -> Result<LinearFit> {
    let pts: Vec<(f64, f64)> = slants
        .iter()
        .filter(|c| matches!(c.class, SlGeodesicClass::Slant(_)))
        .map(|c| (c.curvature, c.vertical_rate()))
        .collect();
    linear_fit(&pts)
}

/// Adds `c` to the fiber angle of every point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingMap {
    pub c: f64,
}

impl WindingMap {
    pub fn apply(&self, p: &SLPoint) -> SLPoint {
        winding_map(self.c, p)
    }

    pub fn compose(&self, other: &WindingMap) -> WindingMap {
        WindingMap { c: self.c + other.c }
    }

    pub fn inverse(&self) -> WindingMap {
        WindingMap { c: -self.c }
    }
}

pub fn winding_map(c: f64, p: &SLPoint) -> SLPoint {
    SLPoint {
        base: p.base,
        angle: p.angle + c,
    }
}

/// Action of an isometry of `H²` on unit vectors, continued to the
/// universal cover.
pub fn lift_mobius(m: &MobiusMap, p: &SLPoint) -> SLPoint {
    let z = p.base.z();
    SLPoint {
        base: H2Point::from_z(m.apply_z(z)).convert(p.base.model),
        angle: m.tangent_angle(z, p.angle),
    }
}

/// Exact inverse of [`lift_mobius`] for the same `m`.
pub fn lift_mobius_inverse(m: &MobiusMap, q: &SLPoint) -> SLPoint {
    let z = m.inverse().apply_z(q.base.z());
    // tangent_angle(z, θ) = θ' − 2 arg(c w + d) with θ' = θ or π − θ.
    let w = if m.reversing { C64::new(-z.re, z.im) } else { z };
    let shift = 2.0 * (w * m.c + m.d).arg();
    let inner = q.angle + shift;
    let angle = if m.reversing { std::f64::consts::PI - inner } else { inner };
    SLPoint {
        base: H2Point::from_z(z).convert(q.base.model),
        angle,
    }
}

/// Image of `t_x` over a half-plane rectangle, in chart coordinates.
pub fn horizontal_plane(x: &SLPoint, lo: [f64; 2], hi: [f64; 2]) -> ParamSurface<3> {
    let x = *x;
    ParamSurface::new(format!("t_x for x = {x}"), lo, hi, move |s| {
        let z0 = x.base.z();
        let b = C64::new(s[0], s[1]);
        let turn = transport_rotation(z0, b).unwrap_or(f64::NAN);
        Vector::<3>::new(s[0], s[1], x.angle + turn)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry_core::{geodesic_integrate, norm, Chart, Sl2rChart, TangentVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn sp(u: f64, v: f64, t: f64) -> SLPoint {
        SLPoint::new(u, v, t).unwrap()
    }

    fn hp(u: f64, v: f64) -> H2Point {
        H2Point::half_plane(u, v).unwrap()
    }

    /// Integrates `θ' = −u'/v` along the geodesic from `a` to `b` by RK4 on
    /// the arc-length parameterization of the connecting curve.
    fn transport_ode(a: C64, b: C64, n: usize) -> f64 {
        let g = geodesic_between(&H2Point::from_z(a), &H2Point::from_z(b)).unwrap();
        let s0 = g.arc_param(a);
        let s1 = g.arc_param(b);
        let h = (s1 - s0) / n as f64;
        let rate = |s: f64| {
            let e = 1e-6;
            let z = g.point_at(s);
            let du = (g.point_at(s + e).re - g.point_at(s - e).re) / (2.0 * e);
            -du / z.im
        };
        let mut theta = 0.0;
        for i in 0..n {
            let s = s0 + h * i as f64;
            theta += h / 6.0 * (rate(s) + 4.0 * rate(s + 0.5 * h) + rate(s + h));
        }
        theta
    }

    #[test]
    fn projection_drops_angle() {
        let p = sp(0.0, 1.0, 7.0 * PI);
        assert_eq!(project(&p), hp(0.0, 1.0));
        assert_eq!(project(&winding_map(2.5, &p)), project(&p));
    }

    #[test]
    fn serializes_as_u_v_theta() {
        let p = sp(0.5, 2.0, -1.0);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"u":0.5,"v":2.0,"theta":-1.0}"#);
        let back: SLPoint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<SLPoint>(r#"{"u":0,"v":-1,"theta":0}"#).is_err());
    }

    #[test]
    fn lift_to_own_base_is_identity() {
        let x = sp(0.3, 1.2, 0.7);
        assert_eq!(parallel_transport_lift(&x, &x.base).unwrap(), x);
    }

    #[test]
    fn transport_along_vertical_keeps_angle() {
        let x = sp(1.0, 0.5, 0.4);
        let y = parallel_transport_lift(&x, &hp(1.0, 3.0)).unwrap();
        assert_eq!(y.angle, 0.4);
        assert!(transport_ode(C64::new(1.0, 0.5), C64::new(1.0, 3.0), 200).abs() < 1e-12);
    }

    #[test]
    fn transport_matches_ode() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0));
            let b = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0));
            let closed = transport_rotation(a, b).unwrap();
            let ode = transport_ode(a, b, 2000);
            assert!((closed - ode).abs() < 1e-8, "{a} {b}: {closed} vs {ode}");
        }
    }

    #[test]
    fn transport_around_triangle_is_not_a_loop() {
        let t = [hp(0.0, 1.0), hp(2.0, 1.0), hp(1.0, 3.0)];
        let x = sp(0.0, 1.0, 0.0);
        let mut p = x;
        for i in 1..=3 {
            p = parallel_transport_lift(&p, &t[i % 3]).unwrap();
        }
        assert_eq!(p.base.z(), x.base.z());
        assert!((p.angle - x.angle).abs() > 0.1);
    }

    /// Places a triangle with the given angles: `A = i`, `B` straight up at
    /// the side length from the hyperbolic law of cosines, `C` rotated off
    /// the vertical by `alpha`.
    fn triangle_with_angles(alpha: f64, beta: f64, gamma: f64) -> [H2Point; 3] {
        let side = |x: f64, y: f64, z: f64| ((z.cos() + x.cos() * y.cos()) / (x.sin() * y.sin())).acosh();
        let c = side(alpha, beta, gamma);
        let b = side(alpha, gamma, beta);
        let a_pt = C64::new(0.0, 1.0);
        let b_pt = C64::new(0.0, c.exp());
        let c_up = C64::new(0.0, b.exp());
        let c_pt = MobiusMap::rotation_about_i(alpha).apply_z(c_up);
        [a_pt, b_pt, c_pt].map(H2Point::from_z)
    }

    #[test]
    fn right_triangle_with_two_fifths() {
        let t = triangle_with_angles(PI / 2.0, PI / 5.0, PI / 5.0);
        let r = holonomy_report(&t).unwrap();
        let mut measured = r.angles;
        measured.sort_by(f64::total_cmp);
        assert!((measured[0] - PI / 5.0).abs() < 1e-9);
        assert!((measured[1] - PI / 5.0).abs() < 1e-9);
        assert!((measured[2] - PI / 2.0).abs() < 1e-9);
        assert!((r.transport_defect - PI / 10.0).abs() < 1e-6, "{}", r.transport_defect);
        assert!(r.difference() < 1e-6);
    }

    #[test]
    fn thin_and_ideal_limits() {
        let thin = [hp(0.0, 1.0), hp(0.0, 3.0), hp(1e-4, 2.0)];
        assert!(holonomy(&thin).unwrap() < 1e-3);
        let big = [hp(0.0, 1e-3), hp(1.0, 1e-3), hp(0.5, 1e3)];
        let h = holonomy(&big).unwrap();
        assert!(h < PI && PI - h < 1e-2, "{h}");
    }

    #[test]
    fn collinear_triangle_is_rejected() {
        let t = [hp(0.0, 1.0), hp(0.0, 2.0), hp(0.0, 3.0)];
        assert!(matches!(holonomy(&t), Err(GeoError::Degenerate(_))));
    }

    #[test]
    fn random_triangles_match_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 50 {
            let t = [(); 3].map(|_| hp(rng.gen_range(-2.0..2.0), rng.gen_range(0.3..3.0)));
            let Ok(r) = holonomy_report(&t) else { continue };
            if !(0.1..=2.0).contains(&r.defect) {
                continue;
            }
            assert!(r.difference() < 1e-7, "{r:?}");
            done += 1;
        }
    }

    #[test]
    fn horizontal_vectors_submerse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let p = Vector::<3>::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..4.0), rng.gen_range(-9.0..9.0));
            let (du, dv) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let h = Vector::<3>::new(du, dv, -du / p[1]);
            let lifted = norm(&Sl2rChart, &p, &h);
            let base = du.hypot(dv) / p[1];
            assert!((lifted - base).abs() < 1e-8 * base.max(1.0));
        }
    }

    #[test]
    fn winding_maps_add_and_are_isometries() {
        let p = sp(0.2, 0.9, 1.0);
        assert_eq!(winding_map(0.0, &p), p);
        assert_ne!(winding_map(2.0 * PI, &p), p);
        let a = WindingMap { c: 0.4 };
        let b = WindingMap { c: -1.3 };
        assert!((a.compose(&b).apply(&p).angle - a.apply(&b.apply(&p)).angle).abs() < 1e-15);
        // The metric does not depend on θ.
        let x = p.to_vector();
        let y = winding_map(5.0, &p).to_vector();
        assert_eq!(Sl2rChart.metric(&x), Sl2rChart.metric(&y));
    }

    fn pullback_defect(f: impl Fn(&Vector<3>) -> Vector<3>, p: &Vector<3>) -> f64 {
        let h = 1e-6;
        let cols: Vec<Vector<3>> = (0..3)
            .map(|k| {
                let mut e = Vector::<3>::zeros();
                e[k] = h;
                (f(&(p + e)) - f(&(p - e))) / (2.0 * h)
            })
            .collect();
        let j = nalgebra::Matrix3::from_columns(&cols);
        let pulled = j.transpose() * Sl2rChart.metric(&f(p)) * j;
        (pulled - Sl2rChart.metric(p)).amax()
    }

    #[test]
    fn lifted_isometries_preserve_metric() {
        let maps = [
            MobiusMap::new(2.0, 1.0, 1.0, 1.0).unwrap(),
            MobiusMap::rotation_about_i(2.2),
            MobiusMap::reflection(),
            MobiusMap::new(1.0, 3.0, -0.5, 0.2).unwrap().with_reflection(),
        ];
        let p = Vector::<3>::new(0.3, 1.4, 0.6);
        for m in &maps {
            let f = |x: &Vector<3>| lift_mobius(m, &SLPoint::from_vector(x).unwrap()).to_vector();
            assert!(pullback_defect(f, &p) < 1e-8, "{m:?}");
            let q = lift_mobius(m, &SLPoint::from_vector(&p).unwrap());
            let back = lift_mobius_inverse(m, &q).to_vector();
            assert!((back - p).amax() < 1e-12, "{m:?}");
        }
    }

    #[test]
    fn reflection_lift_is_u_flip() {
        let q = lift_mobius(&MobiusMap::reflection(), &sp(0.4, 2.0, 0.3));
        assert_eq!(q.to_vector(), Vector::<3>::new(-0.4, 2.0, PI - 0.3));
    }

    fn integrate(p: [f64; 3], v: [f64; 3], t: f64) -> CurveSample {
        let tv = TangentVector::<3>::from_slices(&p, &v).unwrap().normalized(&Sl2rChart).unwrap();
        geodesic_integrate(&Sl2rChart, &tv, t, (t / 1e-3) as usize).unwrap().to_sample()
    }

    #[test]
    fn fiber_is_vertical() {
        let c = classify_sl_geodesic(&integrate([0.0, 1.0, 0.0], [0.0, 0.0, 1.0], 4.0)).unwrap();
        assert_eq!(c.class, SlGeodesicClass::Vertical);
        assert!((c.vertical_speed - 1.0).abs() < 1e-9);
    }

    #[test]
    fn horizontal_lift_is_horizontal() {
        // θ' = −u'/v at the start makes the geodesic horizontal.
        let c = classify_sl_geodesic(&integrate([0.0, 1.0, 0.0], [1.0, 0.5, -1.0], 4.0)).unwrap();
        assert_eq!(c.class, SlGeodesicClass::Horizontal);
        assert!(c.vertical_speed < 1e-9);
    }

    #[test]
    fn slants_have_constant_vertical_speed_linear_in_curvature() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut family = Vec::new();
        for _ in 0..12 {
            let du: f64 = rng.gen_range(-1.0..1.0);
            let dv: f64 = rng.gen_range(-1.0..1.0);
            let w: f64 = rng.gen_range(0.1..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let c = classify_sl_geodesic(&integrate([0.0, 1.0, 0.0], [du, dv, w - du], 4.0)).unwrap();
            assert!(matches!(c.class, SlGeodesicClass::Slant(_)), "{c:?}");
            assert!(c.vertical_speed_std <= 1e-6 * c.vertical_speed, "{c:?}");
            family.push(c);
        }
        let fit = vertical_speed_law(&family).unwrap();
        assert!(fit.rms < 1e-5, "{fit:?}");
        assert!((fit.slope - 1.0).abs() < 1e-4 && fit.intercept.abs() < 1e-4, "{fit:?}");
    }

    #[test]
    fn horizontal_plane_passes_through_lifts() {
        let x = sp(0.0, 1.0, 0.2);
        let plane = horizontal_plane(&x, [-1.0, 0.5], [1.0, 2.0]);
        let p = plane.at(&[0.5, 1.5]);
        let q = parallel_transport_lift(&x, &hp(0.5, 1.5)).unwrap().to_vector();
        assert_eq!(p, q);
    }
}
