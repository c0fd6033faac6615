use serde::Serialize;

use super::dyadic::{ContentEstimate, Cover};
use super::essential::EssentialContentEstimate;

/// Slack for floating comparisons.
const CALCULUS_TOL: f64 = 1e-12;

/// Exponent ratios tried by the power-mean check.
pub const DELTA_GRID: [f64; 5] = [1.0, 1.25, 1.5, 2.0, 4.0];

/// Number of exponents in the monotonicity grid.
pub const S_GRID_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalculusCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalculusLedger {
    pub checks: Vec<CalculusCheck>,
    pub all_passed: bool,
}

fn leq(a: f64, b: f64) -> bool {
    a <= b + CALCULUS_TOL * b.abs().max(1.0)
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> CalculusCheck {
    CalculusCheck {
        name: name.into(),
        passed,
        detail,
    }
}

/// `Σ|L|^{s/δ} ≥ (Σ|L|^s)^{1/δ}` for every `δ` in [`DELTA_GRID`]; needs `|L| ≤ 1`.
pub fn check_power_mean(cover: &Cover, s: f64) -> CalculusCheck {
    if cover.max_side() > 1.0 {
        return check("power-mean", true, "skipped: a side exceeds 1".into());
    }
    let base = cover.value(s);
    let worst = DELTA_GRID
        .iter()
        .map(|&delta| (delta, cover.value(s / delta), base.powf(1.0 / delta)))
        .find(|(_, lhs, rhs)| !leq(*rhs, *lhs));
    match worst {
        None => check("power-mean", true, format!("s = {s}, {} boxes", cover.len())),
        Some((delta, lhs, rhs)) => check(
            "power-mean",
            false,
            format!("delta = {delta}: {lhs} < {rhs}"),
        ),
    }
}

/// `s ↦ Σ|L|^s` is non-increasing on `S_GRID_POINTS` exponents in `[0, s_max]`.
pub fn check_monotone(cover: &Cover, s_max: f64) -> CalculusCheck {
    if cover.max_side() > 1.0 {
        return check("monotone-in-s", true, "skipped: a side exceeds 1".into());
    }
    let values: Vec<f64> = (0..S_GRID_POINTS)
        .map(|i| cover.value(s_max * i as f64 / (S_GRID_POINTS - 1) as f64))
        .collect();
    match values.windows(2).position(|w| !leq(w[1], w[0])) {
        None => check("monotone-in-s", true, format!("s in [0, {s_max}]")),
        Some(i) => check(
            "monotone-in-s",
            false,
            format!("step {i}: {} < {}", values[i], values[i + 1]),
        ),
    }
}

/// Structural checks on content estimates and the covers behind them.
pub fn content_calculus_check(estimates: &[ContentEstimate], essentials: &[EssentialContentEstimate]) -> CalculusLedger {
    let mut checks = Vec::new();
    for e in estimates {
        let bound = e.set_diameter.powf(e.s);
        checks.push(check(
            "bounded-by-diameter",
            leq(e.value, bound),
            format!("s = {}: {} vs |A|^s = {bound}", e.s, e.value),
        ));
        if e.s == 0.0 {
            checks.push(check(
                "zero-exponent",
                (e.value - 1.0).abs() <= CALCULUS_TOL,
                format!("value {}", e.value),
            ));
        }
        checks.push(check_power_mean(&e.cover, e.s));
        checks.push(check_monotone(&e.cover, e.s.max(1.0)));
    }
    for e in essentials {
        let bound = e.set_diameter.powf(e.s).min(e.plain_value);
        checks.push(check(
            "essential-below-plain",
            leq(e.value, bound),
            format!("s = {}, eta = {}: {} vs {bound}", e.s, e.eta, e.value),
        ));
        checks.push(check_power_mean(&e.cover, e.s));
    }
    let all_passed = checks.iter().all(|c| c.passed);
    CalculusLedger { checks, all_passed }
}
