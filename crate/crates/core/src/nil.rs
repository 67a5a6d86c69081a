//! The Heisenberg group with the left-invariant metric
//! `dx² + dy² + (dz − x dy)²`.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::geometry_core::{geodesic_integrate, norm, sample_jet, CurveSample, NilChart, TangentVector, Vector};

/// Projected extent below which a sample counts as a fiber.
pub const VERTICAL_EXTENT: f64 = 1e-9;
/// Largest accepted RMS residual of the winning fit.
pub const FIT_TOL: f64 = 1e-5;
/// The circle wins when its residual is below this fraction of the line's.
pub const CIRCLE_PREFERENCE: f64 = 0.1;
/// Fitted radii beyond this are treated as lines.
pub const MAX_RADIUS: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NilElement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl NilElement {
    pub const IDENTITY: NilElement = NilElement { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        NilElement { x, y, z }
    }

    pub fn from_vector(p: &Vector<3>) -> Self {
        NilElement::new(p[0], p[1], p[2])
    }

    pub fn to_vector(&self) -> Vector<3> {
        Vector::<3>::new(self.x, self.y, self.z)
    }
}

impl fmt::Display for NilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// `(x, y, z)(a, b, c) = (x + a, y + b, z + c + x b)`.
pub fn nil_mul(g: &NilElement, h: &NilElement) -> NilElement {
    NilElement::new(g.x + h.x, g.y + h.y, g.z + h.z + g.x * h.y)
}

pub fn nil_inv(g: &NilElement) -> NilElement {
    NilElement::new(-g.x, -g.y, -g.z + g.x * g.y)
}

pub fn left_translation(g: &NilElement, p: &NilElement) -> NilElement {
    nil_mul(g, p)
}

/// Differential of `p ↦ g·p` (the same at every `p`).
pub fn left_translation_differential(g: &NilElement) -> Matrix3<f64> {
    Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, g.x, 1.0)
}

/// Rotation by `phi` about the `z`-axis. It rotates `(x, y)` and fixes the
/// symmetric height `w = z − xy/2`.
pub fn nil_rotation(phi: f64, p: &NilElement) -> NilElement {
    let (s, c) = phi.sin_cos();
    let w = p.z - 0.5 * p.x * p.y;
    let x = c * p.x - s * p.y;
    let y = s * p.x + c * p.y;
    NilElement::new(x, y, w + 0.5 * x * y)
}

/// The orientation-reversing isometry `(x, y, w) ↦ (x, −y, −w)`.
pub fn nil_reflection(p: &NilElement) -> NilElement {
    let w = p.z - 0.5 * p.x * p.y;
    NilElement::new(p.x, -p.y, -w - 0.5 * p.x * p.y)
}

/// Vertical component `z' − x y'` of a velocity, constant along geodesics.
pub fn vertical_component(p: &Vector<3>, v: &Vector<3>) -> f64 {
    v[2] - p[0] * v[1]
}

/// Total least-squares line `n·(x, y) = offset` with `|n| = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub normal: [f64; 2],
    pub offset: f64,
    pub rms: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircleFit {
    pub center: [f64; 2],
    pub radius: f64,
    pub rms: f64,
}

pub fn fit_line(pts: &[[f64; 2]]) -> LineFit {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in pts {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // Normal = eigenvector of the smaller eigenvalue of the scatter matrix.
    let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let normal = [-phi.sin(), phi.cos()];
    let offset = normal[0] * mx + normal[1] * my;
    let rms = (pts
        .iter()
        .map(|p| (normal[0] * p[0] + normal[1] * p[1] - offset).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    LineFit { normal, offset, rms }
}

/// Algebraic (Kåsa) fit refined by Gauss–Newton on the geometric residuals
/// `|p − c| − R`. `None` for collinear input.
pub fn fit_circle(pts: &[[f64; 2]]) -> Option<CircleFit> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    // Kåsa in centered coordinates: x² + y² = 2a x + 2b y + k.
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for p in pts {
        let (x, y) = (p[0] - mx, p[1] - my);
        let row = Vector3::new(2.0 * x, 2.0 * y, 1.0);
        ata += row * row.transpose();
        atb += row * (x * x + y * y);
    }
    let sol = ata.lu().solve(&atb)?;
    let (mut a, mut b) = (sol[0], sol[1]);
    let mut r = (sol[2] + a * a + b * b).max(0.0).sqrt();
    if !r.is_finite() {
        return None;
    }
    for _ in 0..50 {
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for p in pts {
            let (dx, dy) = (p[0] - mx - a, p[1] - my - b);
            let d = dx.hypot(dy);
            if d == 0.0 {
                continue;
            }
            let j = Vector3::new(-dx / d, -dy / d, -1.0);
            let res = d - r;
            jtj += j * j.transpose();
            jtr += j * res;
        }
        let Some(step) = jtj.lu().solve(&(-jtr)) else { break };
        a += step[0];
        b += step[1];
        r += step[2];
        if step.amax() <= 1e-15 * (1.0 + r.abs()) {
            break;
        }
    }
    let r = r.abs();
    let rms = (pts
        .iter()
        .map(|p| ((p[0] - mx - a).hypot(p[1] - my - b) - r).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (r.is_finite() && rms.is_finite()).then_some(CircleFit {
        center: [a + mx, b + my],
        radius: r,
        rms,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum NilGeodesicClass {
    Vertical,
    /// Projects onto a straight line.
    Parabolic { line: LineFit },
    /// Projects onto a circle.
    Slant { circle: CircleFit },
}

impl NilGeodesicClass {
    pub fn name(&self) -> &'static str {
        match self {
            NilGeodesicClass::Vertical => "vertical",
            NilGeodesicClass::Parabolic { .. } => "parabolic",
            NilGeodesicClass::Slant { .. } => "slant",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NilClassification {
    #[serde(flatten)]
    pub class: NilGeodesicClass,
    /// Largest distance of the projection from its first point.
    pub extent: f64,
    pub line_rms: f64,
    pub circle_rms: Option<f64>,
    /// Residual of the winning model.
    pub residual: f64,
}

fn arc_length(sample: &CurveSample) -> f64 {
    sample
        .points
        .windows(2)
        .map(|w| {
            let a = Vector::<3>::from_column_slice(&w[0]);
            let b = Vector::<3>::from_column_slice(&w[1]);
            norm(&NilChart, &(0.5 * (a + b)), &(b - a))
        })
        .sum()
}

/// Projects a sampled geodesic to the `(x, y)`-plane and chooses between a
/// point, a line and a circle.
pub fn classify_nil_geodesic(sample: &CurveSample) -> Result<NilClassification> {
    if sample.dim != 3 || sample.len() < 5 {
        return Err(GeoError::InvalidArgument(
            "need a 3-dimensional sample with at least 5 points".into(),
        ));
    }
    let len = arc_length(sample);
    if len < 4.0 - 1e-9 {
        return Err(GeoError::InvalidArgument(format!(
            "sample covers arc length {len}, need at least 4"
        )));
    }
    let pts: Vec<[f64; 2]> = sample.points.iter().map(|p| [p[0], p[1]]).collect();
    let extent = pts
        .iter()
        .map(|p| (p[0] - pts[0][0]).hypot(p[1] - pts[0][1]))
        .fold(0.0, f64::max);
    if extent < VERTICAL_EXTENT {
        return Ok(NilClassification {
            class: NilGeodesicClass::Vertical,
            extent,
            line_rms: 0.0,
            circle_rms: None,
            residual: extent,
        });
    }
    let line = fit_line(&pts);
    let circle = fit_circle(&pts);
    let circle_rms = circle.map(|c| c.rms);
    let (class, residual) = match circle {
        Some(c) if c.rms < CIRCLE_PREFERENCE * line.rms && c.radius < MAX_RADIUS => {
            (NilGeodesicClass::Slant { circle: c }, c.rms)
        }
        _ => (NilGeodesicClass::Parabolic { line }, line.rms),
    };
    if !(residual < FIT_TOL) {
        return Err(GeoError::Unclassifiable(format!(
            "line residual {:e}, circle residual {:?} (integration error?)",
            line.rms, circle_rms
        )));
    }
    Ok(NilClassification {
        class,
        extent,
        line_rms: line.rms,
        circle_rms,
        residual,
    })
}

/// Parameters in `(0, t_max]` at which the unwrapped angle about `center`
/// passes `target + 2πk` for some integer `k`, refined by secant steps on
/// the interpolated curve.
fn angle_crossings(sample: &CurveSample, center: [f64; 2], target: f64) -> Result<Vec<f64>> {
    let raw = |p: &[f64]| (p[1] - center[1]).atan2(p[0] - center[0]);
    let mut unwrapped = Vec::with_capacity(sample.len());
    let mut acc = raw(&sample.points[0]);
    let mut prev = acc;
    for p in &sample.points {
        let a = raw(p);
        let mut d = a - prev;
        d -= (d / TAU).round() * TAU;
        acc += d;
        prev = a;
        unwrapped.push(acc);
    }
    let mut out = Vec::new();
    for i in 1..sample.len() {
        let (a0, a1) = (unwrapped[i - 1] - target, unwrapped[i] - target);
        let (k0, k1) = ((a0 / TAU).floor(), (a1 / TAU).floor());
        if k0 == k1 || (i == 1 && (a0 - k0.max(k1) * TAU).abs() < 1e-12) {
            continue;
        }
        let level = target + k0.max(k1) * TAU;
        let reference = unwrapped[i - 1];
        let phase = |t: f64| -> Result<f64> {
            let (x, _, _) = sample_jet::<3>(sample, t)?;
            let a = raw(x.as_slice());
            Ok(a + ((reference - a) / TAU).round() * TAU - level)
        };
        let (mut t0, mut t1) = (sample.params[i - 1], sample.params[i]);
        let (mut f0, mut f1) = (phase(t0)?, phase(t1)?);
        for _ in 0..40 {
            if f1 == f0 || f1.abs() < 1e-15 {
                break;
            }
            let t2 = t1 - f1 * (t1 - t0) / (f1 - f0);
            let f2 = phase(t2)?;
            (t0, f0, t1, f1) = (t1, f1, t2, f2);
        }
        out.push(t1);
    }
    Ok(out)
}

/// Heights of a slant geodesic each time its projection returns to the
/// starting angle on the fitted circle. The first entry is the start.
pub fn wrap_heights(sample: &CurveSample, circle: &CircleFit) -> Result<Vec<f64>> {
    let p0 = &sample.points[0];
    let start = (p0[1] - circle.center[1]).atan2(p0[0] - circle.center[0]);
    let mut out = vec![p0[2]];
    for t in angle_crossings(sample, circle.center, start)? {
        out.push(sample_jet::<3>(sample, t)?.0[2]);
    }
    Ok(out)
}

/// Largest deviation of consecutive differences from the first one.
pub fn arithmetic_defect(heights: &[f64]) -> Option<f64> {
    if heights.len() < 3 {
        return None;
    }
    let d0 = heights[1] - heights[0];
    Some(
        heights
            .windows(2)
            .map(|w| (w[1] - w[0] - d0).abs())
            .fold(0.0, f64::max),
    )
}

/// Integrates the unit-speed geodesic from `p` with direction `v` over
/// `[0, t]` at step `step`.
pub fn nil_geodesic(p: &NilElement, v: &Vector<3>, t: f64, step: f64) -> Result<CurveSample> {
    let tv = TangentVector::new(p.to_vector(), *v).normalized(&NilChart)?;
    let n = ((t / step).ceil() as usize).max(2);
    Ok(geodesic_integrate(&NilChart, &tv, t, n)?.to_sample())
}

/// Intersections of two slant geodesics from one point, counted at
/// shrinking height tolerances.
#[derive(Clone, Debug, Serialize)]
pub struct IntersectionWitness {
    /// The second meeting point of the two projected circles.
    pub other_point: [f64; 2],
    /// `(tolerance, count)` pairs, tolerance decreasing.
    pub counts: Vec<(f64, usize)>,
    /// Whether the last three counts agree.
    pub stable: bool,
}

fn passes(sample: &CurveSample, circle: &CircleFit, target: [f64; 2]) -> Result<Vec<f64>> {
    let start = (target[1] - circle.center[1]).atan2(target[0] - circle.center[0]);
    let p0 = &sample.points[0];
    let here = (p0[1] - circle.center[1]).atan2(p0[0] - circle.center[0]);
    let mut heights = Vec::new();
    if (here - start).abs() < 1e-12 {
        heights.push(p0[2]);
    }
    for t in angle_crossings(sample, circle.center, start)? {
        heights.push(sample_jet::<3>(sample, t)?.0[2]);
    }
    Ok(heights)
}

/// Both slants start at `p`; their projections meet at `p` and at one
/// other point, so every intersection lies over one of the two. Counts
/// pairs of passes at equal height (excluding the shared start) over
/// `t ∈ [0, t_max]`.
pub fn slant_intersection_witness(
    p: &NilElement,
    v1: &Vector<3>,
    v2: &Vector<3>,
    t_max: f64,
) -> Result<IntersectionWitness> {
    let s1 = nil_geodesic(p, v1, t_max, 1e-3)?;
    let s2 = nil_geodesic(p, v2, t_max, 1e-3)?;
    let circle = |s: &CurveSample| match classify_nil_geodesic(s)?.class {
        NilGeodesicClass::Slant { circle } => Ok(circle),
        other => Err(GeoError::InvalidArgument(format!("expected a slant, got {}", other.name()))),
    };
    let (c1, c2) = (circle(&s1)?, circle(&s2)?);
    // The common chord of two circles through p is perpendicular to the
    // line of centers; reflect p across that line.
    let (dx, dy) = (c2.center[0] - c1.center[0], c2.center[1] - c1.center[1]);
    let dd = dx * dx + dy * dy;
    if dd < 1e-18 {
        return Err(GeoError::SameGeodesic);
    }
    let (px, py) = (p.x - c1.center[0], p.y - c1.center[1]);
    let along = (px * dx + py * dy) / dd;
    let foot = [c1.center[0] + along * dx, c1.center[1] + along * dy];
    let other = [2.0 * foot[0] - p.x, 2.0 * foot[1] - p.y];
    if (other[0] - p.x).hypot(other[1] - p.y) < 1e-9 {
        return Err(GeoError::Degenerate("projected circles are tangent".into()));
    }
    let at_p = (passes(&s1, &c1, [p.x, p.y])?, passes(&s2, &c2, [p.x, p.y])?);
    let at_q = (passes(&s1, &c1, other)?, passes(&s2, &c2, other)?);
    let tols = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let counts: Vec<(f64, usize)> = tols
        .iter()
        .map(|&tol| {
            let mut n = 0;
            for (i, a) in at_p.0.iter().enumerate() {
                for (j, b) in at_p.1.iter().enumerate() {
                    if (i, j) != (0, 0) && (a - b).abs() < tol {
                        n += 1;
                    }
                }
            }
            for a in &at_q.0 {
                for b in &at_q.1 {
                    if (a - b).abs() < tol {
                        n += 1;
                    }
                }
            }
            (tol, n)
        })
        .collect();
    let k = counts.len();
    let stable = counts[k - 1].1 == counts[k - 2].1 && counts[k - 2].1 == counts[k - 3].1;
    Ok(IntersectionWitness {
        other_point: other,
        counts,
        stable,
    })
}
