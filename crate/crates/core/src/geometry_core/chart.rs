use std::fmt;
use std::str::FromStr;

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

pub type Vector<const N: usize> = SVector<f64, N>;
pub type Matrix<const N: usize> = SMatrix<f64, N, N>;

/// Relative step of the central-difference Christoffel stencil.
pub const FD_STEP: f64 = 1e-5;

/// The eight model spaces handled by the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeometryId {
    #[serde(rename = "h2xr")]
    H2xR,
    #[serde(rename = "s2xr")]
    S2xR,
    #[serde(rename = "cylinder")]
    Cylinder,
    #[serde(rename = "sl2r")]
    Sl2r,
    #[serde(rename = "nil")]
    Nil,
    #[serde(rename = "sol")]
    Sol,
    #[serde(rename = "h2")]
    H2,
    #[serde(rename = "e2")]
    E2,
}

impl GeometryId {
    pub const ALL: [GeometryId; 8] = [
        GeometryId::H2xR,
        GeometryId::S2xR,
        GeometryId::Cylinder,
        GeometryId::Sl2r,
        GeometryId::Nil,
        GeometryId::Sol,
        GeometryId::H2,
        GeometryId::E2,
    ];

    /// Number of chart coordinates. `S²×ℝ` is carried in ambient form
    /// `(x, y, z, h)` with `(x, y, z)` on the unit sphere.
    pub fn coords(self) -> usize {
        match self {
            GeometryId::H2 | GeometryId::E2 | GeometryId::Cylinder => 2,
            GeometryId::S2xR => 4,
            _ => 3,
        }
    }

    /// Manifold dimension.
    pub fn dim(self) -> usize {
        match self {
            GeometryId::H2 | GeometryId::E2 | GeometryId::Cylinder => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeometryId::H2xR => "h2xr",
            GeometryId::S2xR => "s2xr",
            GeometryId::Cylinder => "cylinder",
            GeometryId::Sl2r => "sl2r",
            GeometryId::Nil => "nil",
            GeometryId::Sol => "sol",
            GeometryId::H2 => "h2",
            GeometryId::E2 => "e2",
        }
    }
}

impl fmt::Display for GeometryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeometryId {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        GeometryId::ALL
            .into_iter()
            .find(|g| g.name() == key)
            .or(match key.as_str() {
                "hyp2xr" | "h2r" => Some(GeometryId::H2xR),
                "sl2" | "sltilde" => Some(GeometryId::Sl2r),
                "s1xr" => Some(GeometryId::Cylinder),
                _ => None,
            })
            .ok_or_else(|| GeoError::Parse(format!("unknown geometry `{s}`")))
    }
}

/// Christoffel symbols of the second kind, indexed `[k][i][j]` for `Γ^k_ij`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Christoffel<const N: usize> {
    pub symbols: [[[f64; N]; N]; N],
}

impl<const N: usize> Christoffel<N> {
    pub fn zero() -> Self {
        Christoffel {
            symbols: [[[0.0; N]; N]; N],
        }
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.symbols[k][i][j]
    }

    /// `Γ^k_ij a^i b^j`.
    pub fn contract(&self, a: &Vector<N>, b: &Vector<N>) -> Vector<N> {
        let mut out = Vector::<N>::zeros();
        for k in 0..N {
            let mut acc = 0.0;
            for i in 0..N {
                for j in 0..N {
                    acc += self.symbols[k][i][j] * a[i] * b[j];
                }
            }
            out[k] = acc;
        }
        out
    }

    /// Levi-Civita formula from the metric and its coordinate partials
    /// (`partials[m] = ∂_m g`).
    pub fn from_metric(g: &Matrix<N>, partials: &[Matrix<N>; N]) -> Option<Self> {
        let ginv = g.try_inverse()?;
        let mut first = [[[0.0; N]; N]; N];
        for l in 0..N {
            for i in 0..N {
                for j in 0..N {
                    first[l][i][j] =
                        0.5 * ((partials[i][(j, l)] + partials[j][(i, l)]) - partials[l][(i, j)]);
                }
            }
        }
        let mut symbols = [[[0.0; N]; N]; N];
        for (k, row) in symbols.iter_mut().enumerate() {
            for i in 0..N {
                for j in 0..N {
                    let mut acc = 0.0;
                    for (l, lowered) in first.iter().enumerate() {
                        acc += ginv[(k, l)] * lowered[i][j];
                    }
                    row[i][j] = acc;
                }
            }
        }
        Some(Christoffel { symbols })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for k in 0..N {
            for i in 0..N {
                for j in 0..N {
                    m = m.max((self.symbols[k][i][j] - other.symbols[k][i][j]).abs());
                }
            }
        }
        m
    }
}

/// A coordinate chart with a Riemannian metric.
///
/// Charts that know the partial derivatives of their metric in closed form
/// return them from [`Chart::metric_partials`]; everything else falls back to
/// central differences.
pub trait Chart<const N: usize>: Send + Sync {
    fn id(&self) -> GeometryId;

    fn metric(&self, p: &Vector<N>) -> Matrix<N>;

    fn metric_partials(&self, _p: &Vector<N>) -> Option<[Matrix<N>; N]> {
        None
    }

    /// Coordinate distance from `p` to the edge of the chart domain.
    fn boundary_margin(&self, _p: &Vector<N>) -> f64 {
        f64::INFINITY
    }

    fn contains(&self, p: &Vector<N>) -> bool {
        p.iter().all(|c| c.is_finite()) && self.boundary_margin(p) > 0.0
    }
}

fn out_of_chart<const N: usize>(p: &Vector<N>) -> GeoError {
    GeoError::OutOfChart(p.iter().copied().collect())
}

pub fn metric_tensor<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    p: &Vector<N>,
) -> Result<Matrix<N>> {
    if !chart.contains(p) {
        return Err(out_of_chart(p));
    }
    Ok(chart.metric(p))
}

pub fn inner<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    p: &Vector<N>,
    a: &Vector<N>,
    b: &Vector<N>,
) -> f64 {
    (a.transpose() * chart.metric(p) * b)[(0, 0)]
}

pub fn norm<C: Chart<N> + ?Sized, const N: usize>(chart: &C, p: &Vector<N>, a: &Vector<N>) -> f64 {
    inner(chart, p, a, a).max(0.0).sqrt()
}

/// Christoffel symbols at `p`: closed form when the chart registers metric
/// partials, central differences otherwise.
pub fn christoffel<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    p: &Vector<N>,
) -> Result<Christoffel<N>> {
    if !chart.contains(p) {
        return Err(out_of_chart(p));
    }
    match chart.metric_partials(p) {
        Some(partials) => {
            Christoffel::from_metric(&chart.metric(p), &partials).ok_or_else(|| out_of_chart(p))
        }
        None => christoffel_fd(chart, p),
    }
}

/// Christoffel symbols from central differences of the metric with step
/// `FD_STEP · max(1, |p|∞)`.
pub fn christoffel_fd<C: Chart<N> + ?Sized, const N: usize>(
    chart: &C,
    p: &Vector<N>,
) -> Result<Christoffel<N>> {
    if !chart.contains(p) {
        return Err(out_of_chart(p));
    }
    let h = FD_STEP * p.amax().max(1.0);
    if chart.boundary_margin(p) <= 2.0 * h {
        return Err(GeoError::StencilBoundary(p.iter().copied().collect()));
    }
    let partials: [Matrix<N>; N] = std::array::from_fn(|m| {
        let mut e = Vector::<N>::zeros();
        e[m] = h;
        (chart.metric(&(p + e)) - chart.metric(&(p - e))) / (2.0 * h)
    });
    Christoffel::from_metric(&chart.metric(p), &partials).ok_or_else(|| out_of_chart(p))
}

/// Euclidean plane.
#[derive(Clone, Copy, Debug, Default)]
pub struct E2Chart;

impl Chart<2> for E2Chart {
    fn id(&self) -> GeometryId {
        GeometryId::E2
    }
    fn metric(&self, _p: &Vector<2>) -> Matrix<2> {
        Matrix::<2>::identity()
    }
    fn metric_partials(&self, _p: &Vector<2>) -> Option<[Matrix<2>; 2]> {
        Some([Matrix::<2>::zeros(); 2])
    }
}

/// The cylinder `S¹×ℝ` of circumference 1, in universal-cover coordinates
/// `(r1, r2)`; the circle coordinate is reduced mod 1 only when reporting.
#[derive(Clone, Copy, Debug, Default)]
pub struct CylinderChart;

impl Chart<2> for CylinderChart {
    fn id(&self) -> GeometryId {
        GeometryId::Cylinder
    }
    fn metric(&self, _p: &Vector<2>) -> Matrix<2> {
        Matrix::<2>::identity()
    }
    fn metric_partials(&self, _p: &Vector<2>) -> Option<[Matrix<2>; 2]> {
        Some([Matrix::<2>::zeros(); 2])
    }
}

/// Upper half-plane `(u, v)`, `v > 0`, metric `(du² + dv²)/v²`.
#[derive(Clone, Copy, Debug, Default)]
pub struct H2Chart;

impl Chart<2> for H2Chart {
    fn id(&self) -> GeometryId {
        GeometryId::H2
    }
    fn metric(&self, p: &Vector<2>) -> Matrix<2> {
        Matrix::<2>::identity() / (p[1] * p[1])
    }
    fn metric_partials(&self, p: &Vector<2>) -> Option<[Matrix<2>; 2]> {
        let v = p[1];
        Some([
            Matrix::<2>::zeros(),
            Matrix::<2>::identity() * (-2.0 / (v * v * v)),
        ])
    }
    fn boundary_margin(&self, p: &Vector<2>) -> f64 {
        p[1]
    }
}

/// `H²×ℝ` as half-plane × line: `(u, v, h)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct H2xRChart;

impl Chart<3> for H2xRChart {
    fn id(&self) -> GeometryId {
        GeometryId::H2xR
    }
    fn metric(&self, p: &Vector<3>) -> Matrix<3> {
        let w = 1.0 / (p[1] * p[1]);
        Matrix::<3>::from_diagonal(&Vector::<3>::new(w, w, 1.0))
    }
    fn metric_partials(&self, p: &Vector<3>) -> Option<[Matrix<3>; 3]> {
        let d = -2.0 / (p[1] * p[1] * p[1]);
        Some([
            Matrix::<3>::zeros(),
            Matrix::<3>::from_diagonal(&Vector::<3>::new(d, d, 0.0)),
            Matrix::<3>::zeros(),
        ])
    }
    fn boundary_margin(&self, p: &Vector<3>) -> f64 {
        p[1]
    }
}

/// Universal cover of the unit tangent bundle of `H²` in coordinates
/// `(u, v, θ)`: half-plane base point and unwrapped angle of the unit vector
/// measured from `∂u`. Metric `(du² + dv²)/v² + (dθ + du/v)²`; the 1-form
/// `-du/v` is the Levi-Civita transport law of the half-plane, so the fibres
/// have length 2π and the projection is a Riemannian submersion.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sl2rChart;

impl Chart<3> for Sl2rChart {
    fn id(&self) -> GeometryId {
        GeometryId::Sl2r
    }
    fn metric(&self, p: &Vector<3>) -> Matrix<3> {
        let v = p[1];
        let w = 1.0 / (v * v);
        Matrix::<3>::new(2.0 * w, 0.0, 1.0 / v, 0.0, w, 0.0, 1.0 / v, 0.0, 1.0)
    }
    fn metric_partials(&self, p: &Vector<3>) -> Option<[Matrix<3>; 3]> {
        let v = p[1];
        let v2 = v * v;
        let v3 = v2 * v;
        Some([
            Matrix::<3>::zeros(),
            Matrix::<3>::new(
                -4.0 / v3,
                0.0,
                -1.0 / v2,
                0.0,
                -2.0 / v3,
                0.0,
                -1.0 / v2,
                0.0,
                0.0,
            ),
            Matrix::<3>::zeros(),
        ])
    }
    fn boundary_margin(&self, p: &Vector<3>) -> f64 {
        p[1]
    }
}

/// Heisenberg group, metric `dx² + dy² + (dz − x dy)²`.
#[derive(Clone, Copy, Debug, Default)]
pub struct NilChart;

impl Chart<3> for NilChart {
    fn id(&self) -> GeometryId {
        GeometryId::Nil
    }
    fn metric(&self, p: &Vector<3>) -> Matrix<3> {
        let x = p[0];
        Matrix::<3>::new(1.0, 0.0, 0.0, 0.0, 1.0 + x * x, -x, 0.0, -x, 1.0)
    }
    fn metric_partials(&self, p: &Vector<3>) -> Option<[Matrix<3>; 3]> {
        let x = p[0];
        Some([
            Matrix::<3>::new(0.0, 0.0, 0.0, 0.0, 2.0 * x, -1.0, 0.0, -1.0, 0.0),
            Matrix::<3>::zeros(),
            Matrix::<3>::zeros(),
        ])
    }
}

/// Sol, metric `e^{2z} dx² + e^{-2z} dy² + dz²`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SolChart;

impl Chart<3> for SolChart {
    fn id(&self) -> GeometryId {
        GeometryId::Sol
    }
    fn metric(&self, p: &Vector<3>) -> Matrix<3> {
        let e = (2.0 * p[2]).exp();
        Matrix::<3>::from_diagonal(&Vector::<3>::new(e, 1.0 / e, 1.0))
    }
    fn metric_partials(&self, p: &Vector<3>) -> Option<[Matrix<3>; 3]> {
        let e = (2.0 * p[2]).exp();
        Some([
            Matrix::<3>::zeros(),
            Matrix::<3>::zeros(),
            Matrix::<3>::from_diagonal(&Vector::<3>::new(2.0 * e, -2.0 / e, 0.0)),
        ])
    }
}

/// The built-in three-dimensional chart for `id`, if it has one.
pub fn chart3(id: GeometryId) -> Option<&'static dyn Chart<3>> {
    match id {
        GeometryId::H2xR => Some(&H2xRChart),
        GeometryId::Sl2r => Some(&Sl2rChart),
        GeometryId::Nil => Some(&NilChart),
        GeometryId::Sol => Some(&SolChart),
        _ => None,
    }
}

/// The built-in two-dimensional chart for `id`, if it has one.
pub fn chart2(id: GeometryId) -> Option<&'static dyn Chart<2>> {
    match id {
        GeometryId::E2 => Some(&E2Chart),
        GeometryId::H2 => Some(&H2Chart),
        GeometryId::Cylinder => Some(&CylinderChart),
        _ => None,
    }
}
