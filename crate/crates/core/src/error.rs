use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error(
        "symbol {symbol} at position {position} is out of range for an alphabet of size {alphabet}"
    )]
    InvalidWord {
        symbol: usize,
        position: usize,
        alphabet: usize,
    },

    #[error("value {value} is outside the domain {domain}")]
    Domain { value: f64, domain: String },

    #[error("alphabet mismatch: system has {system} symbols, probability vector has {probs}")]
    AlphabetMismatch { system: usize, probs: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "cover at depth {depth} needs {needed} intervals, budget is {budget}; lower the depth"
    )]
    CoverBudget {
        depth: usize,
        needed: u64,
        budget: u64,
    },

    #[error("node budget of {budget} exhausted; overlap count lies in [{lower}, {upper}]")]
    NodeBudget { budget: u64, lower: u64, upper: u64 },

    #[error("Lyapunov exponent must be negative, got {0}")]
    InvalidExponent(f64),

    #[error("overlap number {value} is outside [1, {max}]")]
    InvalidOverlap { value: f64, max: f64 },

    #[error("radius grid too fine: {empty_fraction:.3} of centers have empty balls at r = {r_lo}; try r_lo >= {suggested_r_lo}")]
    GridTooFine {
        r_lo: f64,
        empty_fraction: f64,
        suggested_r_lo: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
