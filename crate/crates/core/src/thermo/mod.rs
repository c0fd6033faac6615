//! Pressure, conformality dimension, Gibbs weights and Lyapunov exponents.

mod dimension;
mod ergodic;
mod gibbs;
mod ladder;
mod pressure;

pub use dimension::{
    conformality_dimension, conformality_dimension_with, similarity_dimension, DimensionEstimate,
    DimensionMethod, DimensionOptions, DEFAULT_CERTIFY_WIDTH,
};
pub use ergodic::{
    lyapunov_exponent, weak_conformality_diagnostic, ConformalityDefect, ErgodicStats,
    LyapunovMethod, MIN_LYAPUNOV_LENGTH,
};
pub use gibbs::{gibbs_consistency, gibbs_weights, GibbsConsistency, GibbsWeights};
pub use ladder::{affordable_depth, LogDiameters};
pub use pressure::{
    pressure, pressure_enumerated, pressure_with_budget, similarity_pressure, PressureEstimate,
    PressureMethod,
};
