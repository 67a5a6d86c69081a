use serde::Serialize;

use super::geodesic::{any_tangent, CylinderPoint, GeodesicClass, ProductGeodesic};
use crate::error::{GeoError, Result};
use crate::geometry_core::{GeometryId, Vector};

/// Spaces for which guaranteed sets are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GuaranteedGeometry {
    Cylinder,
    Sphere,
    S2xR,
}

impl TryFrom<GeometryId> for GuaranteedGeometry {
    type Error = GeoError;
    fn try_from(g: GeometryId) -> Result<Self> {
        match g {
            GeometryId::Cylinder => Ok(GuaranteedGeometry::Cylinder),
            GeometryId::S2xR => Ok(GuaranteedGeometry::S2xR),
            other => Err(GeoError::Unsupported(format!("guaranteed sets in {other}"))),
        }
    }
}

/// The intersection of all geodesics through a point set.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GuaranteedSet {
    /// A whole geodesic.
    Geodesic { geodesic: ProductGeodesic },
    /// A great circle of the unit sphere, given by its unit normal.
    GreatCircle { normal: [f64; 3] },
    /// The points `geodesic.at(n · spacing)`, `n ∈ ℤ`.
    Lattice { geodesic: ProductGeodesic, spacing: f64 },
    /// Finitely many points; `truncated` when found by a bounded search.
    Finite { points: Vec<Vec<f64>>, truncated: bool },
}

impl GuaranteedSet {
    /// Lattice points with `|n| ≤ n_max` (cover coordinates on the cylinder).
    pub fn lattice_points(&self, n_max: i64) -> Option<Vec<Vec<f64>>> {
        match self {
            GuaranteedSet::Lattice { geodesic, spacing } => Some(
                (-n_max..=n_max)
                    .map(|n| geodesic.at(n as f64 * spacing))
                    .collect(),
            ),
            _ => None,
        }
    }
}

/// Search bound on wraps and lattice indices for three or more points.
pub const ENUMERATION_BOUND: i64 = 50;

/// Guaranteed set `G(P)` of a finite point set. Cylinder points are
/// `[r1, r2]` (any lift of the circle coordinate), sphere points `[x, y, z]`,
/// `S²×ℝ` points `[x, y, z, h]`.
pub fn guaranteed_set(points: &[Vec<f64>], geometry: GuaranteedGeometry) -> Result<GuaranteedSet> {
    if points.is_empty() {
        return Err(GeoError::InvalidArgument("need at least one point".into()));
    }
    let arity = match geometry {
        GuaranteedGeometry::Cylinder => 2,
        GuaranteedGeometry::Sphere => 3,
        GuaranteedGeometry::S2xR => 4,
    };
    if points.iter().any(|p| p.len() != arity || p.iter().any(|c| !c.is_finite())) {
        return Err(GeoError::InvalidArgument(format!("points must have {arity} finite coordinates")));
    }
    match geometry {
        GuaranteedGeometry::Cylinder => cylinder_set(points),
        GuaranteedGeometry::Sphere => sphere_set(points),
        GuaranteedGeometry::S2xR => s2xr_set(points),
    }
}

const SAME: f64 = 1e-12;

fn circle_gap(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(1.0);
    if d > 0.5 { d - 1.0 } else { d }
}

/// Whether the cylinder point `p` lies on `g`.
pub fn on_cylinder_geodesic(g: &ProductGeodesic, p: &[f64]) -> bool {
    let q = g.at(0.0);
    let v = g.initial_velocity();
    match g.class {
        GeodesicClass::Horizontal => (p[1] - q[1]).abs() <= SAME,
        GeodesicClass::Vertical => circle_gap(q[0], p[0]).abs() <= SAME,
        GeodesicClass::Slant => {
            let t = (p[1] - q[1]) / v[1];
            circle_gap(q[0] + v[0] * t, p[0]).abs() <= 1e-10
        }
    }
}

fn cylinder_set(points: &[Vec<f64>]) -> Result<GuaranteedSet> {
    let a = &points[0];
    let distinct: Vec<&Vec<f64>> = points
        .iter()
        .filter(|p| CylinderPoint::new(p[0], p[1]).distance(&CylinderPoint::new(a[0], a[1])) > SAME)
        .collect();
    let Some(b) = distinct.first() else {
        return Ok(GuaranteedSet::Finite { points: vec![a.clone()], truncated: false });
    };
    if points.len() == 2 || distinct.len() == 1 {
        let dh = b[1] - a[1];
        if dh.abs() <= SAME {
            return Ok(GuaranteedSet::Geodesic {
                geodesic: ProductGeodesic::cylinder(a[0], a[1], 1.0, [1.0, 0.0])?,
            });
        }
        let gap = circle_gap(a[0], b[0]);
        let geodesic = if gap.abs() <= SAME {
            ProductGeodesic::cylinder(a[0], a[1], 1.0, [0.0, dh])?
        } else {
            ProductGeodesic::cylinder(a[0], a[1], 1.0, [gap, dh])?
        };
        return Ok(GuaranteedSet::Lattice { geodesic, spacing: gap.hypot(dh) });
    }
    // Three or more points: keep the lifts through the first two that also
    // contain the rest. Lifts `k` and `j` share exactly the points at
    // fractions `s` of the segment with `s (k − j) ∈ ℤ`.
    let gap = circle_gap(a[0], b[0]);
    let dh = b[1] - a[1];
    if dh.abs() <= SAME {
        let g = ProductGeodesic::cylinder(a[0], a[1], 1.0, [1.0, 0.0])?;
        return Ok(if points.iter().all(|p| on_cylinder_geodesic(&g, p)) {
            GuaranteedSet::Geodesic { geodesic: g }
        } else {
            GuaranteedSet::Finite { points: points.to_vec(), truncated: false }
        });
    }
    let lifts: Vec<i64> = (-ENUMERATION_BOUND..=ENUMERATION_BOUND)
        .filter(|&k| {
            let du = gap + k as f64;
            let g = ProductGeodesic::cylinder(a[0], a[1], 1.0, [du, dh]).expect("nonzero speeds");
            points.iter().all(|p| on_cylinder_geodesic(&g, p))
        })
        .collect();
    match lifts.as_slice() {
        [] => Ok(GuaranteedSet::Finite { points: points.to_vec(), truncated: true }),
        [k] => Ok(GuaranteedSet::Geodesic {
            geodesic: ProductGeodesic::cylinder(a[0], a[1], 1.0, [gap + *k as f64, dh])?,
        }),
        [k0, rest @ ..] => {
            let d = rest.iter().fold(0i64, |g, k| gcd(g, k - k0));
            let du = gap + *k0 as f64;
            Ok(GuaranteedSet::Lattice {
                geodesic: ProductGeodesic::cylinder(a[0], a[1], 1.0, [du, dh])?,
                spacing: du.hypot(dh) / d as f64,
            })
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn unit3(p: &[f64]) -> Result<Vector<3>> {
    let v = Vector::<3>::new(p[0], p[1], p[2]);
    let n = v.norm();
    if !(n > 0.0) {
        return Err(GeoError::OutOfChart(p.to_vec()));
    }
    Ok(v / n)
}

fn sphere_set(points: &[Vec<f64>]) -> Result<GuaranteedSet> {
    let xs: Vec<Vector<3>> = points.iter().map(|p| unit3(p)).collect::<Result<_>>()?;
    let x = xs[0];
    let off_axis: Vec<&Vector<3>> = xs.iter().filter(|y| x.cross(y).norm() > SAME).collect();
    let Some(y) = off_axis.first() else {
        let mut pts = vec![x, -x];
        for q in &xs {
            if pts.iter().all(|p| (p - q).norm() > SAME) {
                pts.push(*q);
            }
        }
        return Ok(GuaranteedSet::Finite {
            points: pts.iter().map(|p| p.iter().copied().collect()).collect(),
            truncated: false,
        });
    };
    let n = x.cross(y).normalize();
    if xs.iter().all(|q| n.dot(q).abs() <= 1e-12) {
        Ok(GuaranteedSet::GreatCircle { normal: n.into() })
    } else {
        Ok(GuaranteedSet::Finite {
            points: points.to_vec(),
            truncated: false,
        })
    }
}

fn s2xr_set(points: &[Vec<f64>]) -> Result<GuaranteedSet> {
    let pts: Vec<(Vector<3>, f64)> =
        points.iter().map(|p| Ok((unit3(p)?, p[3]))).collect::<Result<_>>()?;
    let (x, h1) = pts[0];
    let same = |p: &(Vector<3>, f64)| (p.0 - x).norm() <= SAME && (p.1 - h1).abs() <= SAME;
    let Some(&(y, h2)) = pts.iter().find(|p| !same(p)) else {
        return Ok(GuaranteedSet::Finite {
            points: vec![points[0].clone()],
            truncated: false,
        });
    };
    if pts.len() > 2 && pts.iter().filter(|p| !same(p)).any(|p| (p.0 - y).norm() > SAME || p.1 != h2) {
        return Err(GeoError::Unsupported(
            "guaranteed sets of three or more distinct points in S²×ℝ".into(),
        ));
    }
    let dh = h2 - h1;
    let cross = x.cross(&y);
    let antipodal = cross.norm() <= SAME && x.dot(&y) < 0.0;
    let coincident = cross.norm() <= SAME && x.dot(&y) > 0.0;
    if coincident {
        // Same base point: the vertical line and every helix through both.
        let geodesic = ProductGeodesic::s2xr(x.into(), any_tangent(&x).into(), h1, [0.0, dh])?;
        return Ok(GuaranteedSet::Lattice { geodesic, spacing: dh.abs() });
    }
    if dh.abs() <= SAME {
        if antipodal {
            let to_vec = |v: Vector<3>, h: f64| vec![v[0], v[1], v[2], h];
            return Ok(GuaranteedSet::Finite {
                points: vec![to_vec(x, h1), to_vec(y, h1)],
                truncated: false,
            });
        }
        let t = (y - x * x.dot(&y)).normalize();
        return Ok(GuaranteedSet::Geodesic {
            geodesic: ProductGeodesic::s2xr(x.into(), t.into(), h1, [1.0, 0.0])?,
        });
    }
    // Different heights: the steepest helix through both, sampled every
    // time it passes over the image of the step from x to y.
    let (t, theta) = if antipodal {
        (any_tangent(&x), std::f64::consts::PI)
    } else {
        ((y - x * x.dot(&y)).normalize(), cross.norm().atan2(x.dot(&y)))
    };
    let geodesic = ProductGeodesic::s2xr(x.into(), t.into(), h1, [theta, dh])?;
    Ok(GuaranteedSet::Lattice {
        geodesic,
        spacing: theta.hypot(dh),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product_spaces::cylinder_slope;

    #[test]
    fn vertical_pair_gives_integers() {
        let g = guaranteed_set(&[vec![0.0, 0.0], vec![0.0, 1.0]], GuaranteedGeometry::Cylinder).unwrap();
        let pts = g.lattice_points(3).unwrap();
        for (i, p) in pts.iter().enumerate() {
            assert!(p[0].abs() < 1e-15 && (p[1] - (i as f64 - 3.0)).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn same_height_gives_horizontal_circle() {
        let g = guaranteed_set(&[vec![0.0, 0.0], vec![0.3, 0.0]], GuaranteedGeometry::Cylinder).unwrap();
        let GuaranteedSet::Geodesic { geodesic } = g else { panic!("{g:?}") };
        assert_eq!(geodesic.class, GeodesicClass::Horizontal);
        assert_eq!(geodesic.height, 0.0);
    }

    #[test]
    fn general_pair_uses_steepest_lift() {
        let g = guaranteed_set(&[vec![0.1, 0.0], vec![0.8, 2.0]], GuaranteedGeometry::Cylinder).unwrap();
        let GuaranteedSet::Lattice { geodesic, .. } = &g else { panic!() };
        assert!((cylinder_slope(geodesic).unwrap() - 2.0 / (-0.3)).abs() < 1e-12);
        let pts = g.lattice_points(2).unwrap();
        assert!((pts[3][1] - 2.0).abs() < 1e-12);
        assert!(circle_gap(pts[3][0], 0.8).abs() < 1e-12);
    }

    #[test]
    fn sphere_point_and_antipode() {
        let g = guaranteed_set(&[vec![0.0, 0.0, 1.0]], GuaranteedGeometry::Sphere).unwrap();
        assert_eq!(
            g,
            GuaranteedSet::Finite { points: vec![vec![0.0, 0.0, 1.0], vec![-0.0, -0.0, -1.0]], truncated: false }
        );
    }

    #[test]
    fn s2xr_same_base_point() {
        let g = guaranteed_set(&[vec![1.0, 0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0, 0.5]], GuaranteedGeometry::S2xR).unwrap();
        let pts = g.lattice_points(2).unwrap();
        assert!((pts[4][3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn s2xr_helix_lattice_contains_both_points() {
        let a = vec![1.0, 0.0, 0.0, 0.0];
        let b = vec![0.0, 1.0, 0.0, 0.4];
        let g = guaranteed_set(&[a.clone(), b.clone()], GuaranteedGeometry::S2xR).unwrap();
        let pts = g.lattice_points(1).unwrap();
        for (p, q) in pts[1..].iter().zip([&a, &b]) {
            assert!(p.iter().zip(q.iter()).all(|(x, y)| (x - y).abs() < 1e-12), "{p:?} {q:?}");
        }
    }

    #[test]
    fn three_cylinder_points() {
        // Lifts k ≡ 5 (mod 10) through (0,0), (0,1) also pass (0.5, 0.3);
        // their common points are every tenth of the way up.
        let g = guaranteed_set(
            &[vec![0.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.3]],
            GuaranteedGeometry::Cylinder,
        )
        .unwrap();
        let GuaranteedSet::Lattice { geodesic, spacing } = &g else { panic!("{g:?}") };
        let step = geodesic.at(*spacing);
        assert!((step[1] - 0.1).abs() < 1e-12, "{step:?}");
        let generic = guaranteed_set(
            &[vec![0.0, 0.0], vec![0.0, 1.0], vec![0.37, 0.123456789]],
            GuaranteedGeometry::Cylinder,
        )
        .unwrap();
        assert!(matches!(generic, GuaranteedSet::Finite { truncated: true, .. }));
    }
}
