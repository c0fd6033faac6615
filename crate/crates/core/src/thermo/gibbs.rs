use serde::Serialize;

use super::ladder::LogDiameters;
use super::pressure::pressure_with_budget;
use crate::error::{Error, Result};
use crate::ifs::{IfsSystem, ProbabilityVector};
use crate::numeric::{compensated_sum, level_size, log_sum_exp, word_budget};

/// `p_w = |f_w(K)|^s / e^{g_k}` over `Λᵏ`, in lexicographic word order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsWeights {
    pub s: f64,
    pub k: usize,
    pub log_normalizer: f64,
    pub weights: Vec<f64>,
}

impl GibbsWeights {
    pub fn as_probability(&self) -> Result<ProbabilityVector> {
        ProbabilityVector::new(self.weights.clone())
    }
}

/// Comparison of level-`k` weights pushed to level `2k` against the Gibbs
/// form `|f_w(K)|^s e^{−2kP(s)}` and against the direct level-`2k` weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsConsistency {
    pub s: f64,
    pub k: usize,
    pub pressure: f64,
    /// Largest `|log(|f_u(K)|·|f_v(K)| / |f_{uv}(K)|)|` over all splits.
    pub distortion: f64,
    /// A-priori bound `exp(s·distortion + 2|g_k − kP|)`.
    pub gamma: f64,
    /// Range of `pushed / (|f_w(K)|^s e^{−2kP})`.
    pub ratio_range: [f64; 2],
    /// Range of `pushed / direct`.
    pub pushed_to_direct: [f64; 2],
    pub within: bool,
}

/// Lexicographic log-diameters of level `k`.
fn lex_level(system: &IfsSystem, k: usize) -> Result<Vec<f64>> {
    let budget = word_budget();
    let count = level_size(system.len(), k);
    if count > budget {
        return Err(Error::BudgetExceeded {
            budget,
            requested: count,
            depth_reached: 0,
            partial: Vec::new(),
        });
    }
    let level = system.iterate(k)?;
    // one-letter ladder of the iterated system, which is in lexicographic order
    let ladder = LogDiameters::enumerate(&level, 1, u64::MAX)?;
    Ok(ladder.levels.into_iter().next().expect("one level"))
}

pub fn gibbs_weights(system: &IfsSystem, s: f64, k: usize) -> Result<GibbsWeights> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent s = {s} must be ≥ 0")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("depth k must be ≥ 1".into()));
    }
    let logs = lex_level(system, k)?;
    Ok(weights_from_logs(&logs, s, k))
}

fn weights_from_logs(logs: &[f64], s: f64, k: usize) -> GibbsWeights {
    let norm = log_sum_exp(logs.iter().map(|x| s * x));
    let mut weights: Vec<f64> = logs.iter().map(|x| (s * x - norm).exp()).collect();
    // renormalize so the vector sums to 1 within rounding
    let total = compensated_sum(weights.iter().copied());
    for w in &mut weights {
        *w /= total;
    }
    GibbsWeights {
        s,
        k,
        log_normalizer: norm,
        weights,
    }
}

pub fn gibbs_consistency(system: &IfsSystem, s: f64, k: usize) -> Result<GibbsConsistency> {
    let logs_k = lex_level(system, k)?;
    let logs_2k = lex_level(system, 2 * k)?;
    let level_k = weights_from_logs(&logs_k, s, k);
    let level_2k = weights_from_logs(&logs_2k, s, 2 * k);
    let p = pressure_with_budget(system, s, (2 * k).max(2), word_budget())?.value;

    let n = logs_k.len();
    let mut distortion: f64 = 0.0;
    let mut ratio = [f64::INFINITY, f64::NEG_INFINITY];
    let mut direct = [f64::INFINITY, f64::NEG_INFINITY];
    let shift = 2.0 * k as f64 * p;
    for u in 0..n {
        for v in 0..n {
            let w = u * n + v;
            distortion = distortion.max((logs_k[u] + logs_k[v] - logs_2k[w]).abs());
            let log_pushed = level_k.weights[u].ln() + level_k.weights[v].ln();
            let r = (log_pushed - (s * logs_2k[w] - shift)).exp();
            let q = (log_pushed - level_2k.weights[w].ln()).exp();
            ratio = [ratio[0].min(r), ratio[1].max(r)];
            direct = [direct[0].min(q), direct[1].max(q)];
        }
    }
    let gamma =
        (s * distortion + 2.0 * (level_k.log_normalizer - k as f64 * p).abs()).exp() * (1.0 + 1e-9);
    Ok(GibbsConsistency {
        s,
        k,
        pressure: p,
        distortion,
        gamma,
        ratio_range: ratio,
        pushed_to_direct: direct,
        within: ratio[0] >= 1.0 / gamma && ratio[1] <= gamma,
    })
}
