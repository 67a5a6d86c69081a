use std::f64::consts::TAU;

use num_rational::Rational64;
use serde::Serialize;

use super::geodesic::{cylinder_slope, BaseData, GeodesicClass, ProductGeodesic};
use super::guaranteed::on_cylinder_geodesic;
use super::rational::{near_rational, MAX_DENOMINATOR, RATIONAL_TOL};
use crate::error::{GeoError, Result};
use crate::geometry_core::{GeometryId, Vector};

/// Outcome of [`count_intersections`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum IntersectionCount {
    /// Number of intersection points with height in the window.
    Finite { count: usize },
    /// The full intersection set is infinite.
    Infinite,
    /// The slopes are floats too close to a rational ratio to decide.
    Undetermined { ratio: f64 },
}

const TOL: f64 = 1e-9;

fn in_window(h: f64, window: (f64, f64)) -> bool {
    h >= window.0 && h <= window.1
}

/// Counts the intersection points of two cylinder or `S²×ℝ` geodesics.
///
/// Finite intersections are counted inside the height window; infinite
/// families are reported as such. Slopes supplied as exact rationals are
/// compared exactly; float slope ratios within `1e-12` of a rational with
/// denominator at most `10⁶` are undetermined.
pub fn count_intersections(
    g1: &ProductGeodesic,
    g2: &ProductGeodesic,
    window: (f64, f64),
) -> Result<IntersectionCount> {
    if g1.geometry != g2.geometry {
        return Err(GeoError::InvalidArgument("geodesics live in different spaces".into()));
    }
    match g1.geometry {
        GeometryId::Cylinder => cylinder_count(g1, g2, window),
        GeometryId::S2xR => s2xr_count(g1, g2, window),
        other => Err(GeoError::Unsupported(format!("intersection counting in {other}"))),
    }
}

fn finite(count: usize) -> Result<IntersectionCount> {
    Ok(IntersectionCount::Finite { count })
}

fn cylinder_count(
    g1: &ProductGeodesic,
    g2: &ProductGeodesic,
    window: (f64, f64),
) -> Result<IntersectionCount> {
    use GeodesicClass::*;
    let on1 = |g: &ProductGeodesic| on_cylinder_geodesic(g1, &g.at(0.0));
    match (g1.class, g2.class) {
        (Horizontal, Horizontal) | (Vertical, Vertical) => {
            if on1(g2) {
                Err(GeoError::SameGeodesic)
            } else {
                finite(0)
            }
        }
        (Horizontal, _) => finite(usize::from(in_window(g1.height, window))),
        (_, Horizontal) => finite(usize::from(in_window(g2.height, window))),
        (Vertical, Slant) | (Slant, Vertical) => Ok(IntersectionCount::Infinite),
        (Slant, Slant) => {
            let equal = match (g1.exact_slope(), g2.exact_slope()) {
                (Some(a), Some(b)) => {
                    let sign = |g: &ProductGeodesic| match g.base {
                        BaseData::Circle { direction, .. } => direction as i64,
                        _ => 1,
                    };
                    a * sign(g1) == b * sign(g2)
                }
                _ => {
                    let (a, b) = (cylinder_slope(g1)?, cylinder_slope(g2)?);
                    (a - b).abs() <= RATIONAL_TOL * a.abs().max(1.0)
                }
            };
            if !equal {
                Ok(IntersectionCount::Infinite)
            } else if on1(g2) {
                Err(GeoError::SameGeodesic)
            } else {
                finite(0)
            }
        }
    }
}

struct Helix {
    p: Vector<3>,
    t: Vector<3>,
    normal: Vector<3>,
    height: f64,
    /// Height gained per radian of base angle.
    slope: f64,
    exact: Option<Rational64>,
}

fn helix(g: &ProductGeodesic) -> Helix {
    let BaseData::Sphere { point, tangent } = g.base else {
        unreachable!("S²×ℝ geodesics have sphere base data");
    };
    let p = Vector::<3>::from(point);
    let t = Vector::<3>::from(tangent);
    Helix {
        p,
        t,
        normal: p.cross(&t),
        height: g.height,
        slope: g.speeds[1] / g.speeds[0],
        exact: g.exact_slope(),
    }
}

impl Helix {
    fn angle_of(&self, y: &Vector<3>) -> f64 {
        self.t.dot(y).atan2(self.p.dot(y))
    }

    fn height_over(&self, y: &Vector<3>) -> f64 {
        self.height + self.slope * self.angle_of(y)
    }

    fn passes_over(&self, y: &Vector<3>) -> bool {
        self.normal.dot(y).abs() <= TOL
    }
}

fn s2xr_count(g1: &ProductGeodesic, g2: &ProductGeodesic, window: (f64, f64)) -> Result<IntersectionCount> {
    use GeodesicClass::*;
    let base = |g: &ProductGeodesic| -> Vector<3> {
        let BaseData::Sphere { point, .. } = g.base else { unreachable!() };
        Vector::<3>::from(point)
    };
    let circle_normal = |g: &ProductGeodesic| helix(g).normal;
    match (g1.class, g2.class) {
        (Horizontal, Horizontal) => {
            if (g1.height - g2.height).abs() > TOL {
                return finite(0);
            }
            if circle_normal(g1).cross(&circle_normal(g2)).norm() <= TOL {
                return Err(GeoError::SameGeodesic);
            }
            finite(if in_window(g1.height, window) { 2 } else { 0 })
        }
        (Vertical, Vertical) => {
            if (base(g1) - base(g2)).norm() <= TOL {
                Err(GeoError::SameGeodesic)
            } else {
                finite(0)
            }
        }
        (Horizontal, Vertical) | (Vertical, Horizontal) => {
            let (h, v) = if g1.class == Horizontal { (g1, g2) } else { (g2, g1) };
            let hit = circle_normal(h).dot(&base(v)).abs() <= TOL && in_window(h.height, window);
            finite(usize::from(hit))
        }
        (Horizontal, Slant) | (Slant, Horizontal) => {
            let (h, s) = if g1.class == Horizontal { (g1, g2) } else { (g2, g1) };
            let t = (h.height - s.height) / s.speeds[1];
            let p = s.at(t);
            let y = Vector::<3>::new(p[0], p[1], p[2]);
            let hit = circle_normal(h).dot(&y).abs() <= TOL && in_window(h.height, window);
            finite(usize::from(hit))
        }
        (Vertical, Slant) | (Slant, Vertical) => {
            let (v, s) = if g1.class == Vertical { (g1, g2) } else { (g2, g1) };
            if helix(s).passes_over(&base(v)) {
                Ok(IntersectionCount::Infinite)
            } else {
                finite(0)
            }
        }
        (Slant, Slant) => slant_slant(&helix(g1), &helix(g2), window),
    }
}

fn slant_slant(h1: &Helix, h2: &Helix, window: (f64, f64)) -> Result<IntersectionCount> {
    let axis = h1.normal.cross(&h2.normal);
    if axis.norm() <= TOL {
        // Same great circle: compare slopes in a common orientation.
        let sigma = h1.normal.dot(&h2.normal).signum();
        let equal = match (h1.exact, h2.exact) {
            (Some(a), Some(b)) => a == b * Rational64::from_integer(sigma as i64),
            _ => (h1.slope - sigma * h2.slope).abs() <= RATIONAL_TOL * h1.slope.abs().max(1.0),
        };
        if !equal {
            return Ok(IntersectionCount::Infinite);
        }
        let period = TAU * h1.slope.abs();
        let r = (h1.height_over(&h2.p) - h2.height).rem_euclid(period);
        return if r.min(period - r) <= TOL {
            Err(GeoError::SameGeodesic)
        } else {
            finite(0)
        };
    }
    let y = axis.normalize();
    let ratio = h1.slope / h2.slope;
    let near = |x: f64| near_rational(x, MAX_DENOMINATOR, RATIONAL_TOL).is_some();
    let exact_ratio = match (h1.exact, h2.exact) {
        (Some(a), Some(b)) => Some(a / b),
        (Some(_), None) if near(h2.slope) => return Ok(IntersectionCount::Undetermined { ratio }),
        (None, Some(_)) if near(h1.slope) => return Ok(IntersectionCount::Undetermined { ratio }),
        (Some(_), None) | (None, Some(_)) => None,
        (None, None) => {
            if near(h1.slope) || near(h2.slope) || near(ratio) {
                return Ok(IntersectionCount::Undetermined { ratio });
            }
            None
        }
    };
    let mut count = 0;
    for y in [y, -y] {
        let (a1, a2) = (h1.height_over(&y), h2.height_over(&y));
        let (r1, r2) = (TAU * h1.slope, TAU * h2.slope);
        if let Some(q) = exact_ratio {
            // k r1 − m r2 = a2 − a1 with r1 = (P/Q) r2: solvable iff
            // Q (a2 − a1) / r2 is an integer, and then for infinitely many k.
            let n = *q.denom() as f64 * (a2 - a1) / r2;
            if (n - n.round()).abs() <= TOL * n.abs().max(1.0) {
                return Ok(IntersectionCount::Infinite);
            }
            continue;
        }
        let (lo, hi) = (
            ((window.0 - a1) / r1).min((window.1 - a1) / r1).floor() as i64,
            ((window.0 - a1) / r1).max((window.1 - a1) / r1).ceil() as i64,
        );
        for k in lo..=hi {
            let h = a1 + k as f64 * r1;
            if !in_window(h, window) {
                continue;
            }
            let m = ((h - a2) / r2).round();
            if (a2 + m * r2 - h).abs() <= TOL * h.abs().max(1.0) {
                count += 1;
            }
        }
    }
    finite(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2(point: [f64; 3], tangent: [f64; 3], h: f64, speeds: [f64; 2]) -> ProductGeodesic {
        ProductGeodesic::s2xr(point, tangent, h, speeds).unwrap()
    }

    const W: (f64, f64) = (-100.0, 100.0);

    #[test]
    fn horizontal_great_circles_meet_twice() {
        let a = s2([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.0, [1.0, 0.0]);
        let b = s2([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 0.0, [1.0, 0.0]);
        assert_eq!(count_intersections(&a, &b, W).unwrap(), IntersectionCount::Finite { count: 2 });
        assert_eq!(count_intersections(&a, &a, W).unwrap_err(), GeoError::SameGeodesic);
    }

    #[test]
    fn slant_and_verticals() {
        let s = s2([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.0, [1.0, 0.3]);
        let on_path = s2([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], 0.0, [0.0, 1.0]);
        let off_path = s2([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], 0.0, [0.0, 1.0]);
        assert_eq!(count_intersections(&s, &on_path, W).unwrap(), IntersectionCount::Infinite);
        assert_eq!(count_intersections(&s, &off_path, W).unwrap(), IntersectionCount::Finite { count: 0 });
    }

    #[test]
    fn rational_and_irrational_slants_from_one_point() {
        let r = s2([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.0, [1.0, 0.5])
            .with_exact_slope(Rational64::new(1, 2))
            .unwrap();
        let i = s2([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 0.0, [1.0, 2f64.sqrt()]);
        assert_eq!(count_intersections(&r, &i, W).unwrap(), IntersectionCount::Finite { count: 1 });
    }

    #[test]
    fn rational_slants_resonate() {
        let a = s2([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.0, [1.0, 1.0])
            .with_exact_slope(Rational64::new(1, 1))
            .unwrap();
        let b = s2([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 0.0, [1.0, 1.0])
            .with_exact_slope(Rational64::new(1, 3))
            .unwrap();
        assert_eq!(count_intersections(&a, &b, W).unwrap(), IntersectionCount::Infinite);
    }

    #[test]
    fn float_rational_ratio_is_undetermined() {
        let a = s2([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.0, [1.0, 0.5]);
        let b = s2([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 0.0, [1.0, 0.25]);
        assert!(matches!(count_intersections(&a, &b, W).unwrap(), IntersectionCount::Undetermined { .. }));
        let c = s2([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.0, [1.0, 2f64.sqrt()]);
        let d = s2([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 0.0, [1.0, 2.0 * 2f64.sqrt()]);
        assert!(matches!(count_intersections(&c, &d, W).unwrap(), IntersectionCount::Undetermined { .. }));
    }

    #[test]
    fn cylinder_cases() {
        let h = ProductGeodesic::cylinder(0.0, 0.0, 1.0, [1.0, 0.0]).unwrap();
        let v = ProductGeodesic::cylinder(0.2, 0.0, 1.0, [0.0, 1.0]).unwrap();
        let s1 = ProductGeodesic::cylinder(0.0, 0.0, 1.0, [1.0, 1.0]).unwrap();
        let s2 = ProductGeodesic::cylinder(0.0, 0.5, 1.0, [1.0, 1.0]).unwrap();
        let s3 = ProductGeodesic::cylinder(0.0, 0.0, 1.0, [1.0, 2.0]).unwrap();
        assert_eq!(count_intersections(&h, &v, W).unwrap(), IntersectionCount::Finite { count: 1 });
        assert_eq!(count_intersections(&v, &s1, W).unwrap(), IntersectionCount::Infinite);
        assert_eq!(count_intersections(&s1, &s2, W).unwrap(), IntersectionCount::Finite { count: 0 });
        assert_eq!(count_intersections(&s1, &s3, W).unwrap(), IntersectionCount::Infinite);
        let shifted = ProductGeodesic::cylinder(0.5, 0.5, 1.0, [1.0, 1.0]).unwrap();
        assert_eq!(count_intersections(&s1, &shifted, W).unwrap_err(), GeoError::SameGeodesic);
    }
}
