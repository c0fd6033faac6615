use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::thermo::{conformality_dimension, pressure};

/// Depth of the pressure ladder used for the sign checks.
const SIGN_DEPTH: usize = 12;

/// Critical exponent `dim(S)/δ` of `Σ_w |f_w(K)|^{δ s}`, with the pressure
/// signs that make the series converge above and diverge below it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesBound {
    pub delta: f64,
    pub dim: f64,
    pub value: f64,
    pub epsilon: f64,
    /// Upper end of the pressure bracket at `dim + ε` (must be < 0).
    pub pressure_above: f64,
    /// Lower end of the pressure bracket at `dim − ε` (must be > 0).
    pub pressure_below: f64,
    pub certified: bool,
}

pub fn series_upper_bound(system: &IfsSystem, delta: f64, epsilon: f64) -> Result<SeriesBound> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("δ = {delta} must be > 0")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} must be > 0")));
    }
    let dim = conformality_dimension(system, 1e-12)?.value;
    // Σ_w (|f_w(K)|^δ)^s = Σ_w |f_w(K)|^{δs} converges iff P(δs) < 0
    let above = pressure(system, dim + epsilon, SIGN_DEPTH)?.bracket[1];
    let below = pressure(system, (dim - epsilon).max(0.0), SIGN_DEPTH)?.bracket[0];
    let certified = above < 0.0 && below > 0.0;
    if !certified {
        return Err(Error::Inconclusive {
            reason: format!("pressure signs at dim ± {epsilon}: {below:.3e}, {above:.3e}"),
            ladder: vec![below, above],
        });
    }
    Ok(SeriesBound {
        delta,
        dim,
        value: dim / delta,
        epsilon,
        pressure_above: above,
        pressure_below: below,
        certified,
    })
}
