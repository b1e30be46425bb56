use thiserror::Error;

/// Errors produced anywhere in the design / verify / evolve pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pole in superpotential for level {level} near x = {x:.6} (level not below ground state, or alpha too large)")]
    PoleDetected { level: String, x: f64 },

    #[error("integrator could not meet its error target for level {level} near x = {x:.6}")]
    ToleranceFailure { level: String, x: f64 },

    #[error("level {level} is not below the current ground state {ground}")]
    LevelNotBelowGround { level: String, ground: String },

    #[error("level {0} coincides with the current ground state")]
    DegenerateLevel(String),

    #[error("design step {index} (level {level}) failed: {source}")]
    DesignStep {
        index: usize,
        level: String,
        #[source]
        source: Box<Error>,
    },

    #[error("grids do not match")]
    GridMismatch,

    #[error("eigenvalue {index} did not converge; bracket [{lo}, {hi}]")]
    NonConvergence { index: usize, lo: f64, hi: f64 },

    #[error("singular linear system at row {0}")]
    Singular(usize),

    #[error("level sets of components {0} and {1} are incommensurate")]
    Incommensurate(usize, usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
