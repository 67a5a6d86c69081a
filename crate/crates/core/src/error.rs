use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("point {0:?} lies outside the chart domain")]
    OutOfChart(Vec<f64>),
    #[error("point {0:?} is too close to the chart boundary for the difference stencil")]
    StencilBoundary(Vec<f64>),
    #[error("initial velocity is zero")]
    DegenerateVelocity,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parameter {t} outside sample range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid triangle: {0}")]
    InvalidTriangle(String),
    #[error("map is not bijective: {0}")]
    NotBijective(String),
    #[error("sample matches no geodesic class: {0}")]
    Unclassifiable(String),
    #[error("geodesics coincide")]
    SameGeodesic,
    #[error("boundary-value solve did not converge (miss {miss:e})")]
    Nonconvergence { miss: f64 },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for GeoError {
    fn from(e: std::io::Error) -> Self {
        GeoError::Io(e.to_string())
    }
}

impl From<csv::Error> for GeoError {
    fn from(e: csv::Error) -> Self {
        GeoError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for GeoError {
    fn from(e: serde_json::Error) -> Self {
        GeoError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GeoError>;
