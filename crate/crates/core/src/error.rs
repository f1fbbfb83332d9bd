use thiserror::Error;

/// Errors produced by the numerical routines, the system registry and the cipher.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series failed to reach its truncation tolerance.
    #[error("series did not converge after {terms} terms (last term {last_term:e})")]
    Convergence { terms: usize, last_term: f64 },

    /// The vector field produced a NaN.
    #[error("vector field returned NaN at step {step} (t = {time})")]
    Numeric { step: usize, time: f64 },

    /// Bad system, parameter or scheme configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("symbol {symbol:?} at position {position} is not representable in the {codec} codec")]
    Encoding {
        symbol: char,
        position: usize,
        codec: &'static str,
    },

    #[error("code {code} at position {position} is outside 0..{modulus}")]
    Decoding {
        code: u64,
        position: usize,
        modulus: u64,
    },

    #[error("key source exhausted: {needed} keys needed, {available} available")]
    KeyExhausted { needed: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
