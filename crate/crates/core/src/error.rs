use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty parameter vector")]
    Empty,

    /// The density of a Weibull component with shape below one is unbounded at zero.
    #[error("density diverges at t = 0 for shape {alpha} < 1")]
    DensityDiverges { alpha: f64 },

    /// Every component reverse hazard underflowed, so the log-density slope is undefined.
    #[error("reverse hazard underflows to zero at t = {t}")]
    TailUnderflow { t: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("verdicts were computed for different system pairs or grids")]
    MismatchedPair,

    #[error("expected a {expected} verdict, got {found}")]
    WrongOrder {
        expected: &'static str,
        found: &'static str,
    },

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error("unknown example id `{0}`")]
    UnknownExample(String),
}

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}
