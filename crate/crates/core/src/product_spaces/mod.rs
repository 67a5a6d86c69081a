//! Product geometries `S¹×ℝ`, `H²×ℝ` and `S²×ℝ`: closed-form geodesics,
//! slopes, twisting and affine maps, guaranteed sets, intersection counts
//! and the ε-ball predicate.

pub mod epsilon;
pub mod geodesic;
pub mod guaranteed;
pub mod intersections;
pub mod rational;

pub use epsilon::{
    count_runs, epsilon_ball_components, integrate_product_s2xr, local_distance, product_from_spec,
    slant_return_witness, BallTarget, GeodesicSpec, ReturnWitness, CHART_SCAN_LENGTH,
};
pub use geodesic::{
    affine_r_map, cylinder_slope, twist_cover, twisting_map, BaseData, CylinderPoint,
    GeodesicClass, ProductGeodesic,
};
pub use guaranteed::{
    guaranteed_set, on_cylinder_geodesic, GuaranteedGeometry, GuaranteedSet, ENUMERATION_BOUND,
};
pub use intersections::{count_intersections, IntersectionCount};
pub use rational::{near_rational, MAX_DENOMINATOR, RATIONAL_TOL};
