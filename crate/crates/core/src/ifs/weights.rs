use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on `Σ p_i = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Strictly positive probability vector indexed like the maps of a system.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if let Some((i, w)) = p.iter().enumerate().find(|(_, w)| !(**w > 0.0)) {
            return Err(Error::InvalidWeights(format!(
                "weight {} is {w}, must be strictly positive",
                i + 1
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        Ok(Self(p))
    }

    pub fn uniform(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    /// Normalizes arbitrary positive masses.
    pub fn normalized(masses: &[f64]) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidWeights("masses sum to zero".into()));
        }
        Self::new(masses.iter().map(|v| v / total).collect()).or_else(|_| {
            // absorb rounding into the largest entry
            let mut v: Vec<f64> = masses.iter().map(|x| x / total).collect();
            let (imax, _) = v
                .iter()
                .enumerate()
                .fold((0, f64::MIN), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
            let rest: f64 = v.iter().enumerate().filter(|(i, _)| *i != imax).map(|(_, x)| x).sum();
            v[imax] = 1.0 - rest;
            Self::new(v)
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self.0.iter().map(|p| p * p.ln()).sum::<f64>()
    }

    pub fn check_len(&self, m: usize) -> Result<()> {
        if self.0.len() != m {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {m} maps",
                self.0.len()
            )));
        }
        Ok(())
    }

    /// Cumulative table for inverse-CDF sampling.
    pub(crate) fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.0
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }
}
