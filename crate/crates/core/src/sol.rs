//! Sol: `ℝ³` with `(x, y, z)(a, b, c) = (e^{−z} a + x, e^{z} b + y, c + z)`
//! and metric `e^{2z} dx² + e^{−2z} dy² + dz²`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::geometry_core::{
    chord_residual, Chart, geodesic_integrate, ChordOptions, ChordReport, ParamSurface, SolChart,
    TangentVector, Vector,
};
use crate::hyperbolic_plane::half_plane_distance;
use crate::hyperbolic_plane::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolElement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SolElement {
    pub const IDENTITY: SolElement = SolElement { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        SolElement { x, y, z }
    }

    pub fn from_vector(p: &Vector<3>) -> Self {
        SolElement::new(p[0], p[1], p[2])
    }

    pub fn to_vector(&self) -> Vector<3> {
        Vector::<3>::new(self.x, self.y, self.z)
    }
}

impl fmt::Display for SolElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

pub fn sol_mul(g: &SolElement, h: &SolElement) -> SolElement {
    SolElement::new(
        (-g.z).exp() * h.x + g.x,
        g.z.exp() * h.y + g.y,
        h.z + g.z,
    )
}

pub fn sol_inv(g: &SolElement) -> SolElement {
    SolElement::new(-g.z.exp() * g.x, -(-g.z).exp() * g.y, -g.z)
}

pub fn left_translation(g: &SolElement, p: &SolElement) -> SolElement {
    sol_mul(g, p)
}

/// Which coordinate is held fixed on a totally geodesic plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneAxis {
    X,
    Y,
}

impl fmt::Display for PlaneAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlaneAxis::X => "x",
            PlaneAxis::Y => "y",
        })
    }
}

/// Half-plane coordinates on `{x = c}` (`u = y`, `v = e^z`) or on `{y = c}`
/// (`u = x`, `v = e^{−z}`). Both pull the metric back to `(du² + dv²)/v²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TgPlane {
    pub which: PlaneAxis,
    pub c: f64,
}

pub fn tg_plane_chart(which: PlaneAxis, c: f64) -> TgPlane {
    TgPlane { which, c }
}

impl TgPlane {
    pub fn embed(&self, u: f64, v: f64) -> Result<SolElement> {
        if !(v > 0.0) || !v.is_finite() || !u.is_finite() {
            return Err(GeoError::OutOfChart(vec![u, v]));
        }
        Ok(match self.which {
            PlaneAxis::X => SolElement::new(self.c, u, v.ln()),
            PlaneAxis::Y => SolElement::new(u, self.c, -v.ln()),
        })
    }

    /// Half-plane coordinates of `p`, ignoring the fixed coordinate.
    pub fn coords(&self, p: &SolElement) -> [f64; 2] {
        match self.which {
            PlaneAxis::X => [p.y, p.z.exp()],
            PlaneAxis::Y => [p.x, (-p.z).exp()],
        }
    }

    pub fn contains(&self, p: &SolElement, tol: f64) -> bool {
        let fixed = match self.which {
            PlaneAxis::X => p.x,
            PlaneAxis::Y => p.y,
        };
        (fixed - self.c).abs() <= tol
    }

    /// Metric induced on `(u, v)` through the exact differential of
    /// [`TgPlane::embed`].
    pub fn pullback_metric(&self, u: f64, v: f64) -> Result<[[f64; 2]; 2]> {
        let p = self.embed(u, v)?.to_vector();
        let (du, dv) = match self.which {
            PlaneAxis::X => (Vector::<3>::new(0.0, 1.0, 0.0), Vector::<3>::new(0.0, 0.0, 1.0 / v)),
            PlaneAxis::Y => (Vector::<3>::new(1.0, 0.0, 0.0), Vector::<3>::new(0.0, 0.0, -1.0 / v)),
        };
        let g = SolChart.metric(&p);
        let ip = |a: &Vector<3>, b: &Vector<3>| (a.transpose() * g * b)[(0, 0)];
        Ok([[ip(&du, &du), ip(&du, &dv)], [ip(&dv, &du), ip(&dv, &dv)]])
    }

    /// The patch `|u| ≤ half_width`, `|ln v| ≤ half_width`, parameterized by
    /// `(u, ln v)`.
    pub fn patch(&self, half_width: f64) -> ParamSurface<3> {
        let plane = *self;
        ParamSurface::new(
            format!("{}={}", self.which, self.c),
            [-half_width, -half_width],
            [half_width, half_width],
            move |s| {
                plane
                    .embed(s[0], s[1].exp())
                    .expect("exp is positive")
                    .to_vector()
            },
        )
    }
}

/// Default half-width of surface patches in `u` and `ln v`.
pub const PATCH_HALF_WIDTH: f64 = 2.0;

/// Non-total-geodesy threshold for chord residuals.
pub const NOT_TOTALLY_GEODESIC: f64 = 1e-2;

/// The horizontal plane `{z = c}` over `|x|, |y| ≤ half_width`.
pub fn z_plane(c: f64, half_width: f64) -> ParamSurface<3> {
    ParamSurface::new(
        format!("z={c}"),
        [-half_width, -half_width],
        [half_width, half_width],
        move |s| Vector::<3>::new(s[0], s[1], c),
    )
}

/// One of the eight isometries fixing the origin: `(±x, ±y, z)` or
/// `(±y, ±x, −z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StabilizerIsometry {
    pub swap: bool,
    pub sx: i8,
    pub sy: i8,
}

impl StabilizerIsometry {
    pub const IDENTITY: StabilizerIsometry = StabilizerIsometry { swap: false, sx: 1, sy: 1 };

    /// Elements indexed by code `0..8`: bit 2 = swap, bit 1 = negate the
    /// second output, bit 0 = negate the first output.
    pub fn from_code(code: u8) -> Result<Self> {
        if code >= 8 {
            return Err(GeoError::InvalidArgument(format!("stabilizer code {code} is not in 0..8")));
        }
        Ok(StabilizerIsometry {
            swap: code & 4 != 0,
            sx: if code & 1 != 0 { -1 } else { 1 },
            sy: if code & 2 != 0 { -1 } else { 1 },
        })
    }

    pub fn code(&self) -> u8 {
        (self.swap as u8) << 2 | ((self.sy < 0) as u8) << 1 | (self.sx < 0) as u8
    }

    pub fn all() -> [StabilizerIsometry; 8] {
        std::array::from_fn(|i| Self::from_code(i as u8).expect("code below 8"))
    }

    /// The signed permutation acting on `(x, y)`.
    fn matrix(&self) -> [[i8; 2]; 2] {
        if self.swap {
            [[0, self.sx], [self.sy, 0]]
        } else {
            [[self.sx, 0], [0, self.sy]]
        }
    }

    fn from_matrix(m: [[i8; 2]; 2]) -> Self {
        if m[0][0] == 0 {
            StabilizerIsometry { swap: true, sx: m[0][1], sy: m[1][0] }
        } else {
            StabilizerIsometry { swap: false, sx: m[0][0], sy: m[1][1] }
        }
    }

    pub fn apply(&self, p: &SolElement) -> SolElement {
        if self.swap {
            SolElement::new(self.sx as f64 * p.y, self.sy as f64 * p.x, -p.z)
        } else {
            SolElement::new(self.sx as f64 * p.x, self.sy as f64 * p.y, p.z)
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &StabilizerIsometry) -> StabilizerIsometry {
        let (a, b) = (self.matrix(), other.matrix());
        let mut m = [[0i8; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                *out = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::from_matrix(m)
    }

    pub fn inverse(&self) -> StabilizerIsometry {
        let m = self.matrix();
        Self::from_matrix([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }
}

pub fn stabilizer_apply(s: &StabilizerIsometry, p: &SolElement) -> SolElement {
    s.apply(p)
}

/// Composition table: entry `[i][j]` is the code of `g_i ∘ g_j`.
pub fn composition_table() -> [[u8; 8]; 8] {
    let all = StabilizerIsometry::all();
    std::array::from_fn(|i| std::array::from_fn(|j| all[i].compose(&all[j]).code()))
}

/// Chord-containment residual of a surface patch in Sol.
pub fn totally_geodesic_residual(surface: &ParamSurface<3>, opts: &ChordOptions) -> Result<ChordReport> {
    if opts.grid < 10 {
        return Err(GeoError::InvalidArgument(format!(
            "grid resolution {} is below 10×10",
            opts.grid
        )));
    }
    chord_residual(&SolChart, surface, opts)
}

/// Lower bound for the distance between two points of Sol: both projections
/// `(x, z)` and `(y, z)` onto hyperbolic planes are 1-Lipschitz.
pub fn distance_lower_bound(p: &SolElement, q: &SolElement) -> f64 {
    let hx = half_plane_distance(C64::new(p.x, (-p.z).exp()), C64::new(q.x, (-q.z).exp()));
    let hy = half_plane_distance(C64::new(p.y, p.z.exp()), C64::new(q.y, q.z.exp()));
    hx.max(hy)
}

/// Outcome of the sampled no-return check for one geodesic.
#[derive(Clone, Debug, Serialize)]
pub struct ReturnCheck {
    pub velocity: [f64; 3],
    /// Distance proxy at its first local minimum in `[t_start, t_end]`.
    pub first_minimum: f64,
    pub first_minimum_t: f64,
    /// Smallest proxy value after the first minimum.
    pub later_minimum: f64,
    pub holds: bool,
}

/// Follows the geodesic from the identity with direction `v` over
/// `[t_start, t_end]` and checks that the distance proxy to the identity
/// never drops below its first local minimum.
pub fn return_check(v: &Vector<3>, t_start: f64, t_end: f64, step: f64) -> Result<ReturnCheck> {
    let tv = TangentVector::new(Vector::<3>::zeros(), *v).normalized(&SolChart)?;
    let n = ((t_end / step).ceil() as usize).max(2);
    let traj = geodesic_integrate(&SolChart, &tv, t_end, n)?;
    let d: Vec<(f64, f64)> = traj
        .params
        .iter()
        .zip(&traj.points)
        .filter(|(t, _)| **t >= t_start)
        .map(|(t, p)| (*t, distance_lower_bound(&SolElement::IDENTITY, &SolElement::from_vector(p))))
        .collect();
    if d.len() < 3 {
        return Err(GeoError::InvalidArgument("window contains fewer than 3 samples".into()));
    }
    let first = (1..d.len() - 1)
        .find(|&i| d[i].1 <= d[i - 1].1 && d[i].1 <= d[i + 1].1)
        .unwrap_or(0);
    let first = if d[0].1 <= d[first].1 { 0 } else { first };
    let later = d[first + 1..].iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    Ok(ReturnCheck {
        velocity: [tv.components[0], tv.components[1], tv.components[2]],
        first_minimum: d[first].1,
        first_minimum_t: d[first].0,
        later_minimum: later,
        holds: later >= d[first].1 - 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry_core::Matrix;
    use crate::hyperbolic_plane::{classify_curve, CurveKind, Model};
    use crate::geometry_core::CurveSample;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn s(x: f64, y: f64, z: f64) -> SolElement {
        SolElement::new(x, y, z)
    }

    #[test]
    fn group_law_examples() {
        let p = sol_mul(&s(0.0, 0.0, 1.0), &s(1.0, 1.0, 0.0));
        assert!((p.x - (-1f64).exp()).abs() < 1e-15 && (p.y - E).abs() < 1e-15 && p.z == 1.0);
        let g = s(0.3, -2.0, 0.7);
        assert_eq!(sol_mul(&g, &SolElement::IDENTITY), g);
        assert_eq!(sol_mul(&s(0.0, 0.0, 0.5), &s(0.0, 0.0, 1.25)), s(0.0, 0.0, 1.75));
    }

    fn pullback_defect(f: impl Fn(&SolElement) -> SolElement, p: &Vector<3>) -> f64 {
        let h = 1e-5;
        let cols: Vec<Vector<3>> = (0..3)
            .map(|k| {
                let mut d = Vector::<3>::zeros();
                d[k] = h;
                (f(&SolElement::from_vector(&(p + d))).to_vector()
                    - f(&SolElement::from_vector(&(p - d))).to_vector())
                    / (2.0 * h)
            })
            .collect();
        let j = Matrix::<3>::from_columns(&cols);
        let q = f(&SolElement::from_vector(p)).to_vector();
        let g = SolChart.metric(p);
        (j.transpose() * SolChart.metric(&q) * j - g).amax() / g.amax()
    }

    proptest! {
        #[test]
        fn group_axioms(a in prop::array::uniform3(-2.0f64..2.0),
                        b in prop::array::uniform3(-2.0f64..2.0),
                        c in prop::array::uniform3(-2.0f64..2.0)) {
            let (a, b, c) = (s(a[0], a[1], a[2]), s(b[0], b[1], b[2]), s(c[0], c[1], c[2]));
            let l = sol_mul(&sol_mul(&a, &b), &c).to_vector();
            let r = sol_mul(&a, &sol_mul(&b, &c)).to_vector();
            prop_assert!((l - r).amax() < 1e-12);
            prop_assert!(sol_mul(&a, &sol_inv(&a)).to_vector().amax() < 1e-12);
            prop_assert!(sol_mul(&sol_inv(&a), &a).to_vector().amax() < 1e-12);
        }

        #[test]
        fn translations_and_stabilizer_are_isometries(g in prop::array::uniform3(-2.0f64..2.0),
                                                      p in prop::array::uniform3(-2.0f64..2.0),
                                                      code in 0u8..8) {
            let g = s(g[0], g[1], g[2]);
            let p = Vector::<3>::new(p[0], p[1], p[2]);
            prop_assert!(pullback_defect(|q| left_translation(&g, q), &p) < 1e-9);
            let st = StabilizerIsometry::from_code(code).unwrap();
            prop_assert!(pullback_defect(|q| st.apply(q), &p) < 1e-9);
        }

        #[test]
        fn plane_charts_pull_back_to_half_plane(u in -3.0f64..3.0, v in 0.1f64..5.0, c in -2.0f64..2.0) {
            for which in [PlaneAxis::X, PlaneAxis::Y] {
                let plane = tg_plane_chart(which, c);
                // Fourth-order central differences with a step scaled to v.
                let h = 1e-3 * v;
                let f = |a: f64, b: f64| plane.embed(a, b).unwrap().to_vector();
                let d = |e: [f64; 2]| {
                    let at = |k: f64| f(u + k * h * e[0], v + k * h * e[1]);
                    (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h)
                };
                let (du, dv) = (d([1.0, 0.0]), d([0.0, 1.0]));
                let g = SolChart.metric(&f(u, v));
                let fd = [
                    (du.transpose() * g * du)[(0, 0)],
                    (du.transpose() * g * dv)[(0, 0)],
                    (dv.transpose() * g * dv)[(0, 0)],
                ];
                let exact = plane.pullback_metric(u, v).unwrap();
                let w = 1.0 / (v * v);
                for (got, want) in [(fd[0], w), (fd[1], 0.0), (fd[2], w), (exact[0][0], w), (exact[0][1], 0.0), (exact[1][1], w)] {
                    prop_assert!((got - want).abs() <= 1e-10 * w, "{got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn plane_chart_examples() {
        let x0 = tg_plane_chart(PlaneAxis::X, 0.0);
        assert_eq!(x0.embed(0.0, 1.0).unwrap(), SolElement::IDENTITY);
        let p = x0.embed(2.0, E).unwrap();
        assert!(p.x == 0.0 && p.y == 2.0 && (p.z - 1.0).abs() < 1e-15);
        assert!(matches!(x0.embed(0.0, 0.0), Err(GeoError::OutOfChart(_))));
        assert!(x0.embed(0.0, -1.0).is_err());
        let y1 = tg_plane_chart(PlaneAxis::Y, 1.0);
        let q = y1.embed(0.5, E).unwrap();
        assert!(q.x == 0.5 && q.y == 1.0 && (q.z + 1.0).abs() < 1e-15);
        let back = y1.coords(&q);
        assert!((back[0] - 0.5).abs() < 1e-15 && (back[1] - E).abs() < 1e-15);
    }

    #[test]
    fn stabilizer_examples() {
        assert_eq!(StabilizerIsometry::IDENTITY.apply(&s(1.0, 2.0, 3.0)), s(1.0, 2.0, 3.0));
        let swap = StabilizerIsometry { swap: true, sx: 1, sy: 1 };
        assert_eq!(stabilizer_apply(&swap, &s(1.0, 2.0, 3.0)), s(2.0, 1.0, -3.0));
        let on_x0 = tg_plane_chart(PlaneAxis::X, 0.0).embed(0.7, 2.0).unwrap();
        assert!(tg_plane_chart(PlaneAxis::Y, 0.0).contains(&swap.apply(&on_x0), 0.0));
        let on_y0 = tg_plane_chart(PlaneAxis::Y, 0.0).embed(-0.2, 0.4).unwrap();
        assert!(tg_plane_chart(PlaneAxis::X, 0.0).contains(&swap.apply(&on_y0), 0.0));
    }

    #[test]
    fn stabilizer_is_dihedral_of_order_eight() {
        let all = StabilizerIsometry::all();
        let table = composition_table();
        let probe = s(0.3, -1.1, 0.8);
        for (i, a) in all.iter().enumerate() {
            assert_eq!(a.code() as usize, i);
            for (j, b) in all.iter().enumerate() {
                let c = StabilizerIsometry::from_code(table[i][j]).unwrap();
                assert_eq!(c.apply(&probe), a.apply(&b.apply(&probe)));
            }
            assert_eq!(a.compose(&a.inverse()), StabilizerIsometry::IDENTITY);
        }
        // Non-abelian with an element of order 4, as D4 must be.
        let r = StabilizerIsometry { swap: true, sx: -1, sy: 1 };
        let orders: Vec<usize> = all
            .iter()
            .map(|g| (1..=8).find(|&k| (1..k).fold(*g, |acc, _| acc.compose(g)) == StabilizerIsometry::IDENTITY).unwrap())
            .collect();
        assert!(orders.contains(&4));
        assert_ne!(r.compose(&all[1]), all[1].compose(&r));
        assert!(orders.iter().all(|o| 8 % o == 0));
    }

    #[test]
    fn stabilizer_keeps_vertical_lines_vertical() {
        for st in StabilizerIsometry::all() {
            let a = st.apply(&s(0.4, -0.9, -1.0));
            let b = st.apply(&s(0.4, -0.9, 2.5));
            assert!(a.x == b.x && a.y == b.y);
        }
    }

    fn trace(p: [f64; 3], v: [f64; 3], t: f64) -> CurveSample {
        let tv = TangentVector::<3>::from_slices(&p, &v).unwrap().normalized(&SolChart).unwrap();
        geodesic_integrate(&SolChart, &tv, t, (t / 1e-3) as usize).unwrap().to_sample()
    }

    #[test]
    fn vertical_geodesics_stay_vertical() {
        for sign in [1.0, -1.0] {
            let smp = trace([0.5, -0.3, 0.0], [0.0, 0.0, sign], 10.0);
            for p in &smp.points {
                assert!((p[0] - 0.5).abs() <= 1e-10 && (p[1] + 0.3).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn geodesics_tangent_to_x_plane_are_hyperbolic_geodesics() {
        let smp = trace([0.0, 0.2, 0.1], [0.0, 1.0, 0.6], 3.0);
        assert!(smp.points.iter().all(|p| p[0].abs() <= 1e-8));
        let plane = tg_plane_chart(PlaneAxis::X, 0.0);
        let hp = smp.map_points(|p| plane.coords(&SolElement::new(p[0], p[1], p[2])).to_vec());
        let c = classify_curve(&hp, Model::HalfPlane).unwrap();
        assert_eq!(c.kind, Some(CurveKind::Geodesic), "{c:?}");
    }

    #[test]
    fn tg_planes_contain_chords_and_z_plane_does_not() {
        let opts = ChordOptions { n_pairs: 8, ..Default::default() };
        for plane in [tg_plane_chart(PlaneAxis::X, 0.0), tg_plane_chart(PlaneAxis::Y, 0.5)] {
            let r = totally_geodesic_residual(&plane.patch(PATCH_HALF_WIDTH), &opts).unwrap();
            assert_eq!(r.nonconverged, 0);
            assert!(r.max < 1e-6, "{}: {}", r.surface, r.max);
        }
        let r = totally_geodesic_residual(&z_plane(0.0, PATCH_HALF_WIDTH), &opts).unwrap();
        assert!(r.max > NOT_TOTALLY_GEODESIC, "{}", r.max);
    }

    #[test]
    fn a_single_geodesic_is_totally_geodesic() {
        let line = ParamSurface::<3>::new("vertical line", [-1.0, 0.0], [1.0, 1.0], |s| {
            Vector::<3>::new(0.2, 0.1, s[0])
        });
        let r = totally_geodesic_residual(&line, &ChordOptions { n_pairs: 6, ..Default::default() }).unwrap();
        assert!(r.max < 1e-9, "{}", r.max);
    }

    #[test]
    fn coarse_grids_are_rejected() {
        let opts = ChordOptions { grid: 5, ..Default::default() };
        assert!(totally_geodesic_residual(&z_plane(0.0, 1.0), &opts).is_err());
    }

    #[test]
    fn projections_bound_distance_from_below() {
        // Along the vertical geodesic the bound is exact.
        let d = distance_lower_bound(&SolElement::IDENTITY, &s(0.0, 0.0, 1.5));
        assert!((d - 1.5).abs() < 1e-12);
        let d = distance_lower_bound(&s(1.0, 0.0, 0.0), &s(-1.0, 0.0, 0.0));
        assert!(d > 0.0 && d <= 2.0);
    }

    #[test]
    fn generic_geodesics_do_not_come_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let mut failures = Vec::new();
        for seed in 0..10 {
            let v = loop {
                let v = Vector::<3>::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-0.8..0.8));
                if v[0].abs() > 0.1 && v[1].abs() > 0.1 {
                    break v;
                }
            };
            let r = return_check(&v, 1.0, 50.0, 1e-2).unwrap();
            if !r.holds {
                failures.push((seed, r));
            }
        }
        assert!(failures.is_empty(), "{failures:?}");
    }
}
