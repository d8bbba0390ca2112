use thiserror::Error;

/// Errors produced by the geometry, hull and separator routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({x}, {y}) is not in the open upper half-plane")]
    OutsideHalfPlane { x: f64, y: f64 },

    #[error("point ({u}, {v}) is not in the open unit disk")]
    OutsideDisk { u: f64, v: f64 },

    #[error("coincident points do not determine a line")]
    CoincidentPoints,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point cloud exceeded the limit of {limit} points")]
    ResourceLimit { limit: usize },

    #[error("index {index} out of range for a cloud of {len} points")]
    Index { index: usize, len: usize },

    #[error("generator witnesses were not tracked for this cloud")]
    WitnessesNotTracked,

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("space `{0}` has no line representation")]
    UnsupportedSpace(String),

    #[error("domain too sparse: snapping radius {radius} exceeds the bound {bound}")]
    DomainTooSparse { radius: f64, bound: f64 },

    #[error("no cloud point within snap radius {radius} of domain sample {index}")]
    SnapRadiusTooSmall { index: usize, radius: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
