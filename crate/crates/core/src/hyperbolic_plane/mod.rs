//! The hyperbolic plane: half-plane, disk and Klein models, Möbius
//! isometries, constant-curvature curves and triangle defects.

pub mod curves;
pub mod mobius;
pub mod model;
pub mod triangle;

pub use curves::{
    classify_curve, geodesic_between, tangent_toward, ConstantCurvatureCurve, CurveClassification,
    CurveKind, CurveParams, IdealPoint, CURVATURE_BAND,
};
pub use mobius::MobiusMap;
pub use model::{
    disk_to_half_plane, half_plane_distance, half_plane_to_disk, klein_map, H2Point, Model, C64,
};
pub use triangle::{triangle_angles, triangle_defect, triangle_holonomy_target, TriangleDefect};
