use thiserror::Error;

pub type Result<T> = std::result::Result<T, TempusError>;

/// Failure modes shared by every module.
///
/// Numerical conditions that make a quantity undefined (a level never
/// crossed, an integral that does not converge) are distinct variants so the
/// command line can report them by name.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TempusError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("level not attained within horizon {horizon}")]
    NotAttained { horizon: f64 },
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("stationary expectation: {0}")]
    Stationary(String),
    #[error("singular reference point: |value| = {0:e}")]
    SingularReference(f64),
    #[error("conditioning error: {0}")]
    Conditioning(String),
    #[error("boundary error: {0}")]
    Boundary(String),
    #[error("window error: {0}")]
    Window(String),
    #[error("coverage error: {0}")]
    Coverage(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("partition error: {0}")]
    Partition(String),
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("degenerate distribution: {0}")]
    Degenerate(String),
    #[error("moment error: {0}")]
    Moment(String),
}

impl TempusError {
    /// Short machine-readable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            TempusError::Domain(_) => "domain",
            TempusError::Validation(_) => "validation",
            TempusError::Parameter(_) => "parameter",
            TempusError::Precondition(_) => "precondition",
            TempusError::NotAttained { .. } => "not-attained",
            TempusError::Divergent(_) => "divergent-integral",
            TempusError::Stationary(_) => "stationary",
            TempusError::SingularReference(_) => "singular-reference-point",
            TempusError::Conditioning(_) => "conditioning",
            TempusError::Boundary(_) => "boundary",
            TempusError::Window(_) => "window",
            TempusError::Coverage(_) => "coverage",
            TempusError::Resolution(_) => "resolution",
            TempusError::Partition(_) => "partition",
            TempusError::Truncation(_) => "truncation",
            TempusError::Degenerate(_) => "degenerate",
            TempusError::Moment(_) => "moment",
        }
    }
}
