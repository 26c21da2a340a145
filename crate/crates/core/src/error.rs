use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(&'static str),
    #[error("degenerate map: determinant {0} is not positive and finite")]
    DegenerateMap(f64),
    #[error("|cz+d| = {0:e} underflows (near-parabolic blowup)")]
    Overflow(f64),
    #[error("matrix entry {0} is not within 5e-7 of an integer")]
    NonIntegral(f64),
    #[error("reduction did not finish within {0} steps")]
    IterationLimit(usize),
    #[error("continued fraction digits unreliable beyond depth {0}")]
    DepthUnreliable(usize),
    #[error("precision exceeded: {0}")]
    PrecisionExceeded(String),
    #[error("escape window is empty for q = {q}, nu = {nu}")]
    EmptyWindow { q: u64, nu: f64 },
    #[error("growth guard violated: {0}")]
    GuardViolation(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("theta modulus is only available on the phase-zero section, got theta = {0}")]
    UnsupportedPhase(f64),
    #[error("group self-check failed: {0}")]
    SelfCheck(String),
}

impl Error {
    /// Numeric guard violations, as opposed to malformed input.
    pub fn is_numeric_guard(&self) -> bool {
        matches!(
            self,
            Error::Overflow(_)
                | Error::IterationLimit(_)
                | Error::DepthUnreliable(_)
                | Error::PrecisionExceeded(_)
                | Error::EmptyWindow { .. }
                | Error::GuardViolation(_)
        )
    }
}
