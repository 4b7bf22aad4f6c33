use thiserror::Error;

pub type Result<T, E = GeoError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("s must lie in (0,1), got {0}")]
    InvalidS(f64),
    #[error("normals do not positively span R^{0}; the half-space intersection is unbounded")]
    Unbounded(usize),
    #[error("half-space intersection has empty interior")]
    Empty,
    #[error("point lies outside the body (constraint {index} violated by {violation:e})")]
    PointOutside { index: usize, violation: f64 },
    #[error("point is not on the boundary (distance {0:e})")]
    PointNotOnBoundary(f64),
    #[error("degenerate body: rejection acceptance rate {0:e} below 1e-4")]
    DegenerateBody(f64),
    #[error("direction is not tangent (|u·v| = {0:e})")]
    NotTangent(f64),
    #[error("perturbed Wulff shape degenerated at t = {0}")]
    WulffDegenerate(f64),
    #[error("invalid target measure: {0}")]
    InvalidTarget(String),
    #[error("descent stalled after {iterations} iterations (kkt residual {kkt:e})")]
    Stalled { iterations: usize, kkt: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

impl GeoError {
    /// Whether the error stems from bad user input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            GeoError::InvalidS(_)
                | GeoError::Unbounded(_)
                | GeoError::Empty
                | GeoError::PointOutside { .. }
                | GeoError::PointNotOnBoundary(_)
                | GeoError::NotTangent(_)
                | GeoError::InvalidTarget(_)
                | GeoError::Invalid(_)
                | GeoError::Schema { .. }
        )
    }
}

/// Rejects `s` outside the open unit interval.
pub fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(GeoError::InvalidS(s))
    }
}
