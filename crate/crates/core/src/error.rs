use thiserror::Error;

/// Errors produced by the fractalab kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid word: letter {letter} out of range 1..={m}")]
    InvalidWord { letter: u32, m: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("map {index} is not a contraction (sampled operator norm {norm:.6})")]
    NotContraction { index: usize, norm: f64 },

    #[error("map {index} does not send the bounding ball into itself")]
    EscapesBoundingBall { index: usize },

    #[error("attractor has zero diameter (all maps share a fixed point)")]
    DegenerateAttractor,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Word enumeration would exceed the configured budget. `partial` carries
    /// whatever ladder values were computed before stopping.
    #[error("word budget {budget} exceeded (requested {requested}, depth reached {depth_reached})")]
    BudgetExceeded {
        budget: u64,
        requested: u64,
        depth_reached: usize,
        partial: Vec<f64>,
    },

    #[error("inconclusive: {reason}")]
    Inconclusive { reason: String, ladder: Vec<f64> },

    #[error("only {usable} usable scales, need at least 3")]
    InsufficientScales { usable: usize },

    #[error("region carries zero empirical mass")]
    ZeroMass,

    #[error("empty input")]
    EmptyInput,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
