use thiserror::Error;

/// Errors raised by the simulator.
///
/// Variants are grouped by the category the CLI reports: precondition and
/// domain violations map to exit code 1, everything else is a runtime failure.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A prime-spectrum level was requested beyond the generated prime table.
    #[error("prime table holds {available} primes, level {requested} requested; extend the table")]
    ExtendTable { requested: usize, available: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The eigenfunction of the highest requested level does not decay before the grid edge.
    #[error("grid too small: |phi_{level}| = {tail:.3e} near the boundary; try xi_max >= {suggested_xi_max:.1}")]
    GridTooSmall { level: usize, tail: f64, suggested_xi_max: f64 },

    #[error("potential iteration did not converge after {} sweeps (last residual {:.3e})", .history.len(), .history.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { history: Vec<f64> },

    #[error("level {level} requested but only {available} eigenfunctions are available")]
    LevelOutOfRange { level: usize, available: usize },

    #[error("integrator step size underflow at t = {t:.6e}")]
    StepUnderflow { t: f64 },

    #[error("no resonance: {0}")]
    NoResonance(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical failure.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Precondition(_) | Error::Domain(_) | Error::NoResonance(_) | Error::Refused(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
