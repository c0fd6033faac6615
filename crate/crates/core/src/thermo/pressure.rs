use serde::Serialize;

use super::ladder::LogDiameters;
use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::numeric::{log_sum_exp, word_budget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PressureMethod {
    ClosedForm,
    Enumerated,
}

/// Finite-depth pressure ladder with its subadditivity bracket.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub s: f64,
    /// `g_k` for `k = 1..=kmax`.
    pub gk: Vec<f64>,
    pub value: f64,
    pub bracket: [f64; 2],
    pub method: PressureMethod,
    /// Largest observed `g_{n+m} − g_n − g_m`.
    pub subadditive_defect: f64,
    /// Smallest observed `g_{n+m} − g_n − g_m`.
    pub superadditive_defect: f64,
}

impl PressureEstimate {
    pub fn kmax(&self) -> usize {
        self.gk.len()
    }

    pub fn width(&self) -> f64 {
        self.bracket[1] - self.bracket[0]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

/// `log Σ c_i^s` for a similarity system.
pub fn similarity_pressure(ratios: &[f64], s: f64) -> f64 {
    log_sum_exp(ratios.iter().map(|c| s * c.ln()))
}

/// `P(s)` from the ladder `g_1..g_kmax`, using the budget from the environment.
pub fn pressure(system: &IfsSystem, s: f64, kmax: usize) -> Result<PressureEstimate> {
    pressure_with_budget(system, s, kmax, word_budget())
}

pub fn pressure_with_budget(system: &IfsSystem, s: f64, kmax: usize, budget: u64) -> Result<PressureEstimate> {
    check_args(s, kmax)?;
    if let Some(ratios) = system.ratios() {
        let per_symbol = similarity_pressure(&ratios, s);
        let offset = s * system.attractor_diameter().ln();
        let gk: Vec<f64> = (1..=kmax).map(|k| k as f64 * per_symbol + offset).collect();
        let mut est = from_ladder(s, gk, PressureMethod::ClosedForm);
        est.value = per_symbol;
        est.bracket = [est.bracket[0].min(per_symbol), est.bracket[1].max(per_symbol)];
        return Ok(est);
    }
    let ladder = LogDiameters::enumerate(system, kmax, budget)?;
    Ok(from_ladder(s, ladder.gk(s), PressureMethod::Enumerated))
}

/// Pressure by explicit word enumeration, also for similarity systems.
pub fn pressure_enumerated(system: &IfsSystem, s: f64, kmax: usize) -> Result<PressureEstimate> {
    check_args(s, kmax)?;
    let ladder = LogDiameters::enumerate(system, kmax, word_budget())?;
    Ok(from_ladder(s, ladder.gk(s), PressureMethod::Enumerated))
}

fn check_args(s: f64, kmax: usize) -> Result<()> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent s = {s} must be ≥ 0")));
    }
    if kmax < 2 {
        return Err(Error::InvalidParameter("kmax must be ≥ 2".into()));
    }
    Ok(())
}

/// Builds the estimate from `g_1..g_kmax`.
///
/// With `C = max (g_{n+m} − g_n − g_m)`, the sequence `g_k + C` is subadditive
/// over the observed range, so `P ≤ (g_k + C)/k`; symmetrically with the
/// minimum defect for a lower bound.
pub(crate) fn from_ladder(s: f64, gk: Vec<f64>, method: PressureMethod) -> PressureEstimate {
    let (sub, sup) = defects(&gk);
    let (lo, hi) = bracket(&gk, sub, sup);
    let kmax = gk.len();
    let value = (gk[kmax - 1] / kmax as f64).clamp(lo, hi);
    PressureEstimate {
        s,
        gk,
        value,
        bracket: [lo, hi],
        method,
        subadditive_defect: sub,
        superadditive_defect: sup,
    }
}

pub(crate) fn defects(gk: &[f64]) -> (f64, f64) {
    let g = |k: usize| gk[k - 1];
    let kmax = gk.len();
    let mut sub = f64::NEG_INFINITY;
    let mut sup = f64::INFINITY;
    for n in 1..kmax {
        for m in n..=kmax - n {
            let d = g(n + m) - g(n) - g(m);
            sub = sub.max(d);
            sup = sup.min(d);
        }
    }
    (sub, sup)
}

pub(crate) fn bracket(gk: &[f64], sub: f64, sup: f64) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (i, g) in gk.iter().enumerate() {
        let k = (i + 1) as f64;
        hi = hi.min((g + sub) / k);
        lo = lo.max((g + sup) / k);
    }
    if lo > hi {
        // only possible from rounding when the defect is constant
        let mid = 0.5 * (lo + hi);
        return (mid, mid);
    }
    (lo, hi)
}
