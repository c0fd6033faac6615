use serde::{Deserialize, Serialize};

use super::balls::{target_balls_with_rule, RadiusRule};
use super::boxcount::{limsup_box_dimension, EpsLadder, LimsupEstimate};
use crate::cutset::exact_overlap_scan;
use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::numeric::bisect_decreasing;
use crate::thermo::{similarity_dimension, similarity_pressure};

/// Horizon over which a gauge is checked to be non-increasing.
pub const GAUGE_PROBE_HORIZON: usize = 1000;
/// Word length for the exact-overlap precondition.
const OVERLAP_PROBE_DEPTH: usize = 6;

/// Closed-form non-increasing gauge `g : ℕ → (0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GaugeSpec {
    /// `g ≡ 1`.
    Constant,
    /// `g(k) = k^{−τ}` (and `g(0) = 1`).
    Power { tau: f64 },
    /// `g(k) = e^{−a k}`.
    Exponential { a: f64 },
}

impl GaugeSpec {
    pub fn eval(&self, k: usize) -> f64 {
        match *self {
            GaugeSpec::Constant => 1.0,
            GaugeSpec::Power { tau } => (k.max(1) as f64).powf(-tau),
            GaugeSpec::Exponential { a } => (-a * k as f64).exp(),
        }
    }

    /// Exponential decay rate `−lim log g(k) / k`.
    pub fn decay_rate(&self) -> f64 {
        match *self {
            GaugeSpec::Exponential { a } => a,
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            GaugeSpec::Constant => true,
            GaugeSpec::Power { tau } => tau >= 0.0 && tau.is_finite(),
            GaugeSpec::Exponential { a } => a >= 0.0 && a.is_finite(),
        };
        let monotone = (0..GAUGE_PROBE_HORIZON).all(|k| self.eval(k + 1) <= self.eval(k));
        if ok && monotone {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("gauge {self:?} is not positive non-increasing")))
        }
    }
}

/// Which branch of the entropy/ratio condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionFlags {
    /// `Σ −c_i^D log c_i^D < −2 log Σ c_i^{2D}` with `D = dim(S)`.
    pub entropy_branch: bool,
    pub equal_ratios: bool,
    /// Either branch.
    pub satisfied: bool,
    pub entropy_lhs: f64,
    pub entropy_rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BakerConfig {
    pub gauge: GaugeSpec,
    pub s_g: f64,
    pub dim: f64,
    pub condition_flags: ConditionFlags,
    /// The root test is inconclusive exactly at `s_g`.
    pub critical: bool,
    /// Whether `Σ_k k g(k)^{s_g} |K|^{s_g} (Σ c_i^{s_g})^k` converges at `s_g` itself.
    pub boundary_convergent: bool,
}

pub fn condition_flags(ratios: &[f64]) -> ConditionFlags {
    let dim = similarity_dimension(ratios);
    let lhs: f64 = ratios
        .iter()
        .map(|c| {
            let p = c.powf(dim);
            -p * p.ln()
        })
        .sum();
    let rhs = -2.0 * ratios.iter().map(|c| c.powf(2.0 * dim)).sum::<f64>().ln();
    let equal_ratios = ratios.iter().all(|c| (c - ratios[0]).abs() <= 1e-15 * ratios[0]);
    let entropy_branch = lhs < rhs;
    ConditionFlags {
        entropy_branch,
        equal_ratios,
        satisfied: entropy_branch || equal_ratios,
        entropy_lhs: lhs,
        entropy_rhs: rhs,
    }
}

/// Critical exponent of `Σ_k Σ_{|w|=k} k (|f_w(K)| g(k))^s`.
///
/// For a similarity system the inner sum is `|K|^s g(k)^s (Σ c_i^s)^k`, whose
/// k-th root tends to `e^{−a s} Σ c_i^s` (`a` the gauge's exponential rate),
/// so `s_g` solves `log Σ c_i^s = a s`.
pub fn baker_sg(system: &IfsSystem, gauge: GaugeSpec, tol: f64) -> Result<BakerConfig> {
    gauge.validate()?;
    let ratios = system
        .ratios()
        .ok_or_else(|| Error::InvalidParameter("s_g needs a similarity system".into()))?;
    let a = gauge.decay_rate();
    let root_log = |s: f64| similarity_pressure(&ratios, s) - a * s;
    let mut hi = 1.0;
    while root_log(hi) > 0.0 {
        hi *= 2.0;
    }
    let s_g = bisect_decreasing(root_log, 0.0, hi, tol.max(0.0));
    // at s_g the terms are k g(k)^s |K|^s e^{a s k}: only a power gauge with
    // τ s_g > 2 leaves a summable k^{1 − τ s_g}
    let boundary_convergent = matches!(gauge, GaugeSpec::Power { tau } if tau * s_g > 2.0);
    Ok(BakerConfig {
        gauge,
        s_g,
        dim: similarity_dimension(&ratios),
        condition_flags: condition_flags(&ratios),
        critical: true,
        boundary_convergent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompBakerReport {
    pub baker: BakerConfig,
    pub delta: f64,
    /// `dim(S)` for `δ ≤ 1`, `dim(S)/δ` otherwise.
    pub predicted: f64,
    pub estimate: LimsupEstimate,
    pub exact_overlap_pairs: usize,
    /// Hypotheses taken as given rather than checked.
    pub assumed: Vec<String>,
}

/// Box-counting experiment for balls `B(f_w(x₀), (|f_w(K)| g(|w|))^{δ s_g / dim(S)})`.
pub fn compbaker_experiment(
    system: &IfsSystem,
    x0: &[f64],
    gauge: GaugeSpec,
    delta: f64,
    r_ladder: &[f64],
    eps: EpsLadder,
) -> Result<CompBakerReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("δ = {delta} must be > 0")));
    }
    let baker = baker_sg(system, gauge, 1e-15)?;
    if !baker.condition_flags.satisfied {
        return Err(Error::InvalidParameter(
            "neither the entropy condition nor equal ratios holds".into(),
        ));
    }
    let depth = crate::thermo::affordable_depth(system.len(), crate::numeric::word_budget()).min(OVERLAP_PROBE_DEPTH);
    let overlaps = exact_overlap_scan(system, depth)?;
    if !overlaps.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "{} exact overlaps up to depth {depth}",
            overlaps.len()
        )));
    }
    let rule = RadiusRule::Gauge {
        gauge,
        exponent: delta * baker.s_g / baker.dim,
    };
    let exp = target_balls_with_rule(system, x0, delta, rule, r_ladder)?;
    let estimate = limsup_box_dimension(&exp, eps)?;
    let predicted = if delta <= 1.0 { baker.dim } else { baker.dim / delta };
    Ok(CompBakerReport {
        baker,
        delta,
        predicted,
        estimate,
        exact_overlap_pairs: 0,
        assumed: vec!["dim(mu) = dim(S)".into()],
    })
}
