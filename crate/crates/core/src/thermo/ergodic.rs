use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{attractor_sample, chain_jacobian, IfsSystem, ProbabilityVector};
use crate::linalg::{operator_norm, singular_extremes};

/// Minimal word length for the Monte Carlo Lyapunov estimate.
pub const MIN_LYAPUNOV_LENGTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LyapunovMethod {
    Exact,
    MonteCarlo,
}

/// Entropy, Lyapunov exponent and `min(h/λ, d)` of a Bernoulli measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgodicStats {
    pub weights: Vec<f64>,
    pub entropy: f64,
    pub lyapunov: f64,
    /// Standard error of the Monte Carlo mean; 0 when exact.
    pub std_error: f64,
    pub dim_formula: f64,
    pub method: LyapunovMethod,
}

pub fn lyapunov_exponent(
    system: &IfsSystem,
    weights: &ProbabilityVector,
    n_words: usize,
    length: usize,
    seed: u64,
) -> Result<ErgodicStats> {
    weights.check_len(system.len())?;
    let p = weights.as_slice();
    let entropy = weights.entropy();
    let d = system.dim() as f64;
    if let Some(ratios) = system.ratios() {
        let lyapunov = -p.iter().zip(&ratios).map(|(p, c)| p * c.ln()).sum::<f64>();
        return Ok(ErgodicStats {
            weights: p.to_vec(),
            entropy,
            lyapunov,
            std_error: 0.0,
            dim_formula: (entropy / lyapunov).min(d),
            method: LyapunovMethod::Exact,
        });
    }
    if length < MIN_LYAPUNOV_LENGTH {
        return Err(Error::InvalidParameter(format!(
            "word length {length} below {MIN_LYAPUNOV_LENGTH}"
        )));
    }
    if n_words < 2 {
        return Err(Error::InvalidParameter("need at least 2 words".into()));
    }
    let cdf = weights.cumulative();
    let log_k = system.attractor_diameter().ln();
    let samples: Vec<f64> = (0..n_words)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let letters: Vec<u32> = (0..length).map(|_| pick(&cdf, rng.gen())).collect();
            let (_, jac) = chain_jacobian(system, &letters, system.anchor());
            -(operator_norm(&jac, system.dim()).ln() + log_k) / length as f64
        })
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Ok(ErgodicStats {
        weights: p.to_vec(),
        entropy,
        lyapunov: mean,
        std_error: (var / n).sqrt(),
        dim_formula: (entropy / mean).clamp(0.0, d),
        method: LyapunovMethod::MonteCarlo,
    })
}

pub(crate) fn pick(cdf: &[f64], u: f64) -> u32 {
    let i = cdf.partition_point(|&c| c <= u);
    (i.min(cdf.len() - 1) + 1) as u32
}

/// Finite-depth weak-conformality defect.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalityDefect {
    pub k: usize,
    /// `max (log σ_max − log σ_min) / k` over the sampled (word, base point) pairs.
    pub defect: f64,
    pub samples: usize,
}

/// Base points per sampled word.
const DIAGNOSTIC_ANCHORS: usize = 4;

pub fn weak_conformality_diagnostic(
    system: &IfsSystem,
    k: usize,
    n_words: usize,
    seed: u64,
) -> Result<ConformalityDefect> {
    if k == 0 || n_words == 0 {
        return Err(Error::InvalidParameter("need k ≥ 1 and n_words ≥ 1".into()));
    }
    if system.is_similarity() {
        return Ok(ConformalityDefect {
            k,
            defect: 0.0,
            samples: 0,
        });
    }
    let mut anchors = vec![system.anchor().to_vec()];
    let cloud = attractor_sample(
        system,
        &ProbabilityVector::uniform(system.len()),
        DIAGNOSTIC_ANCHORS - 1,
        seed,
    )?;
    anchors.extend(cloud.iter().map(<[f64]>::to_vec));
    let m = system.len() as u32;
    let d = system.dim();
    let gaps: Vec<f64> = (0..n_words)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1);
            let letters: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=m)).collect();
            anchors
                .iter()
                .map(|z| {
                    let (_, jac) = chain_jacobian(system, &letters, z);
                    let (lo, hi) = singular_extremes(&jac, d);
                    (hi.ln() - lo.ln()) / k as f64
                })
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(ConformalityDefect {
        k,
        defect: gaps.into_iter().fold(0.0, f64::max),
        samples: n_words * anchors.len(),
    })
}
