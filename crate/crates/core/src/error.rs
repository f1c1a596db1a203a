use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("negative degree {0} is not allowed here")]
    NegativeDegree(i64),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("cannot parse multiplicity list {input:?}: {reason}")]
    Parse { input: String, reason: String },

    /// A structural assumption of the reduction/classification theory failed.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("dimension formula misused on {system}: result {value} is negative")]
    FormulaMisuse { system: String, value: i64 },

    #[error("iteration cap {cap} exceeded while reducing {system}")]
    IterationCap { cap: usize, system: String },

    #[error("divisor classes live on different ambient spaces")]
    AmbientMismatch,

    #[error("invalid ambient space: {0}")]
    InvalidAmbient(String),

    #[error("Riemann-Roch bracket {bracket} is not divisible by 12")]
    Divisibility { bracket: i64 },

    #[error("prime {prime} must exceed degree {degree}")]
    PrimeTooSmall { prime: u64, degree: i64 },

    #[error("could not sample {wanted} points on the curve (p = {prime}, seed = {seed}) after {attempts} attempts")]
    CurveSampling {
        prime: u64,
        seed: u64,
        wanted: usize,
        attempts: usize,
    },

    #[error("invalid sweep configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Errors caused by the caller's input rather than by a failed
    /// internal consistency check.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NegativeDegree(_)
                | Error::Parse { .. }
                | Error::AmbientMismatch
                | Error::InvalidAmbient(_)
                | Error::PrimeTooSmall { .. }
                | Error::Config(_)
        )
    }
}
