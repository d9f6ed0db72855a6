use thiserror::Error;

/// Errors raised by the coordinate constructions and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("unsupported polygon: {0}")]
    Unsupported(String),
    #[error("point lies on the half-plane not covered by the {0} frame")]
    WrongSide(&'static str),
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("point lies inside or on the polygon (protected region)")]
    ProtectedRegion,
    #[error("inverse map did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error("analytic derivative requested on a sector boundary")]
    BoundaryPoint,
    #[error("separability residual {0:e} above tolerance")]
    SeparabilityFailure(f64),
    #[error("eigenvalue {index} drifted by {drift:e} between refinements")]
    ConvergenceFailure { index: usize, drift: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, PolyError>;
