//! Computational toolkit for the fibered Thurston geometries.
//!
//! The crate traces geodesics in coordinate charts for `H²×ℝ`, `S²×ℝ`, the
//! cylinder `S¹×ℝ`, the universal cover of `SL₂(ℝ)`, `Nil` and `Sol` (plus
//! the flat and hyperbolic planes they are built from), constructs their
//! isometries and special maps (twisting maps, winding maps, parallel
//! transport lifts) and checks numerically whether a given bijection sends
//! geodesics onto geodesics.
//!
//! Module map:
//!
//! - [`geometry_core`]: charts, metrics, Christoffel symbols, RK4 geodesic
//!   tracing, exponential maps, shooting, curve curvature.
//! - [`hyperbolic_plane`]: models of `H²`, Möbius maps, constant-curvature
//!   curves, the Klein map and triangle defects.
//! - [`product_spaces`]: closed-form geodesics of the product geometries,
//!   cylinder slopes, twisting maps, guaranteed sets, intersection counts and
//!   the ε-ball predicate.
//! - [`sl2r`]: the unit-tangent-bundle chart of `SL₂~`, parallel transport,
//!   holonomy, geodesic classes and winding maps.
//! - [`nil`] and [`sol`]: group laws, isometries and geodesic classifiers.
//! - [`preservation_lab`]: the registry of candidate maps and the
//!   certification/falsification engine.
//! - [`cli`]: the `geolab` command-line front end.

pub mod cli;
pub mod error;
pub mod geometry_core;
pub mod hyperbolic_plane;
pub mod nil;
pub mod optimize;
pub mod preservation_lab;
pub mod product_spaces;
pub mod sl2r;
pub mod sol;

pub use error::{GeoError, Result};
pub use geometry_core::{
    CurveSample, GeometryId, TangentVector, Trajectory, Vector, DEFAULT_STEP,
};
