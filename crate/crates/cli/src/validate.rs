use std::fmt;

use fractalab_core::cutset::exact_overlap_scan;
use fractalab_core::numeric::{level_size, word_budget};
use fractalab_core::targets::condition_flags;
use fractalab_core::thermo::{affordable_depth, similarity_dimension, weak_conformality_diagnostic};
use fractalab_core::{Error, IfsSpec, IfsSystem};
use serde::Serialize;

use crate::config::load_spec;

/// Depth of the exact-overlap scan.
const OVERLAP_DEPTH: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Error,
    Warning,
    Note,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub level: Level,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.level {
            Level::Error => "error",
            Level::Warning => "warning",
            Level::Note => "note",
        };
        write!(f, "{level}[{}]: {}", self.code, self.message)
    }
}

fn diag(level: Level, code: &'static str, message: String) -> Diagnostic {
    Diagnostic { level, code, message }
}

pub fn diagnostics_csv(diagnostics: &[Diagnostic]) -> String {
    let mut out = String::from("level,code,message\n");
    for d in diagnostics {
        let level = serde_json::to_value(d.level).expect("level serializes");
        out.push_str(&format!(
            "{},{},\"{}\"\n",
            level.as_str().unwrap_or_default(),
            d.code,
            d.message.replace('"', "\"\"")
        ));
    }
    out
}

/// Diagnostics for an IFS file or `gallery:<name>`; never fails.
pub fn validate_source(source: &str, kmax: Option<usize>) -> Vec<Diagnostic> {
    match load_spec(source) {
        Ok(spec) => validate_spec(&spec, kmax),
        Err(e) => vec![diag(Level::Error, "parse", format!("{e:#}"))],
    }
}

pub fn validate_spec(spec: &IfsSpec, kmax: Option<usize>) -> Vec<Diagnostic> {
    let system = match spec.build() {
        Ok(s) => s,
        Err(e) => {
            let code = match e {
                Error::NotContraction { .. } => "contraction",
                Error::EscapesBoundingBall { .. } => "bounding-ball",
                Error::Parse { .. } => "parse",
                _ => "schema",
            };
            return vec![diag(Level::Error, code, e.to_string())];
        }
    };
    let mut out = Vec::new();
    let m = system.len();
    let budget = word_budget();
    if let Some(k) = kmax {
        let words = level_size(m, k);
        if words > budget {
            out.push(diag(
                Level::Error,
                "budget",
                format!("length-{k} words: {m}^{k} = {words} exceeds the cap of {budget}"),
            ));
        } else {
            out.push(diag(Level::Note, "budget", format!("length-{k} words: {words} of {budget}")));
        }
    }
    out.push(diag(
        Level::Note,
        "budget",
        format!("full word tree affordable to depth {}", affordable_depth(m, budget)),
    ));
    match system.ratios() {
        Some(ratios) => similarity_notes(&system, &ratios, &mut out),
        None => match weak_conformality_diagnostic(&system, 8, 200, 0) {
            Ok(d) => out.push(diag(
                Level::Note,
                "conformality",
                format!("max log-distortion per symbol at length 8: {:.3e}", d.defect),
            )),
            Err(e) => out.push(diag(Level::Warning, "conformality", e.to_string())),
        },
    }
    let depth = affordable_depth(m, budget).min(OVERLAP_DEPTH);
    match exact_overlap_scan(&system, depth) {
        Ok(pairs) if pairs.is_empty() => out.push(diag(
            Level::Note,
            "overlaps",
            format!("no exact overlaps up to length {depth}"),
        )),
        Ok(pairs) => out.push(diag(
            Level::Warning,
            "overlaps",
            format!(
                "{} exact overlap pairs up to length {depth}, first {} = {}",
                pairs.len(),
                pairs[0].first,
                pairs[0].second
            ),
        )),
        Err(e) => out.push(diag(Level::Warning, "overlaps", e.to_string())),
    }
    out
}

fn similarity_notes(system: &IfsSystem, ratios: &[f64], out: &mut Vec<Diagnostic>) {
    let d = system.dim() as f64;
    let dim = similarity_dimension(ratios);
    let mass: f64 = ratios.iter().map(|c| c.powf(d)).sum();
    if mass > 1.0 + 1e-12 {
        out.push(diag(
            Level::Warning,
            "overlaps",
            format!("sum of ratios^{d} is {mass:.6} > 1: images must overlap"),
        ));
    }
    out.push(diag(Level::Note, "dimension", format!("similarity dimension {dim}")));
    if let Some(hint) = osc_hint(system) {
        out.push(diag(Level::Note, "osc", hint));
    }
    let flags = condition_flags(ratios);
    out.push(diag(
        Level::Note,
        "hypotheses",
        format!(
            "equal ratios: {}; entropy branch: {} ({:.6} vs {:.6})",
            flags.equal_ratios, flags.entropy_branch, flags.entropy_lhs, flags.entropy_rhs
        ),
    ));
}

/// On the line, disjoint open images of the convex hull give the open set
/// condition with the open hull as the witness.
fn osc_hint(system: &IfsSystem) -> Option<String> {
    let (a, b) = system.hull_interval()?;
    let mut images: Vec<(f64, f64)> = system
        .maps()
        .iter()
        .map(|f| {
            let (x, y) = (f.apply(&[a])[0], f.apply(&[b])[0]);
            (x.min(y), x.max(y))
        })
        .collect();
    images.sort_by(|p, q| p.0.total_cmp(&q.0));
    let tol = 1e-12 * (b - a);
    if images.windows(2).all(|w| w[0].1 <= w[1].0 + tol) {
        Some(format!("open set condition holds with V = ({a}, {b})"))
    } else {
        Some("hull images overlap; open set condition not established".into())
    }
}
