//! Charts, metrics, Christoffel symbols, geodesic integration and curve
//! curvature shared by every geometry.

pub mod chart;
pub mod curvature;
pub mod integrate;
pub mod sample;
pub mod shooting;
pub mod sphere;
pub mod subset;

pub use chart::{
    chart2, chart3, christoffel, christoffel_fd, inner, metric_tensor, norm, Chart, Christoffel, CylinderChart,
    E2Chart, GeometryId, H2Chart, H2xRChart, Matrix, NilChart, Sl2rChart, SolChart, Vector,
};
pub use curvature::{curve_geodesic_curvature, fornberg_weights, sample_jet};
pub use integrate::{
    exp_map, geodesic_integrate, steps_for, trace, TangentVector, Trajectory, DEFAULT_STEP,
};
pub use sample::CurveSample;
pub use shooting::{shoot, shoot_from, ShootOptions, Shot};
pub use subset::{chord_residual, ChordOptions, ChordReport, ParamSurface};
