use serde::{Deserialize, Serialize};

use super::baker::GaugeSpec;
use crate::cutset::visit_cut_set;
use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::linalg::Point;
use crate::numeric::word_budget;

/// How a cut-set word `w` turns into a target radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadiusRule {
    /// `|f_w(K)|^δ`.
    Power { delta: f64 },
    /// `(|f_w(K)| · g(|w|))^exponent`.
    Gauge { gauge: GaugeSpec, exponent: f64 },
}

impl RadiusRule {
    pub fn radius(&self, diameter: f64, len: usize) -> f64 {
        match self {
            RadiusRule::Power { delta } => diameter.powf(*delta),
            RadiusRule::Gauge { gauge, exponent } => (diameter * gauge.eval(len)).powf(*exponent),
        }
    }
}

/// Target balls of one cut-set: sup-norm balls `B(f_w(x₀), radius)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generation {
    pub cut_radius: f64,
    pub count: usize,
    pub min_radius: f64,
    pub max_radius: f64,
    /// Flat `count × d` centers.
    #[serde(skip)]
    pub centers: Vec<f64>,
    #[serde(skip)]
    pub radii: Vec<f64>,
}

impl Generation {
    pub fn center(&self, i: usize, d: usize) -> &[f64] {
        &self.centers[i * d..(i + 1) * d]
    }
}

/// Shrinking-target experiment: base point, radius rule, and one ball family
/// per cut radius. Estimates are attached by the analysis functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetExperiment {
    pub x0: Point,
    pub delta: f64,
    pub rule: RadiusRule,
    pub dim: usize,
    pub generations: Vec<Generation>,
}

impl TargetExperiment {
    pub fn ball_count(&self) -> usize {
        self.generations.iter().map(|g| g.count).sum()
    }

    pub fn finest_radius(&self) -> f64 {
        self.generations
            .iter()
            .map(|g| g.min_radius)
            .fold(f64::INFINITY, f64::min)
    }

    /// Copy keeping generations with index `≥ g_min`.
    pub fn from_generation(&self, g_min: usize) -> TargetExperiment {
        TargetExperiment {
            generations: self.generations.iter().skip(g_min).cloned().collect(),
            ..self.clone()
        }
    }
}

/// Cut radii `rmax, rmax/2, rmax/4, …` down to `rmin`.
pub fn dyadic_ladder(rmax: f64, rmin: f64) -> Result<Vec<f64>> {
    if !(rmin > 0.0 && rmax >= rmin && rmax.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius ladder [{rmin}, {rmax}]")));
    }
    let mut out = Vec::new();
    let mut r = rmax;
    while r >= rmin * (1.0 - 1e-12) {
        out.push(r);
        r *= 0.5;
    }
    Ok(out)
}

pub fn target_balls(system: &IfsSystem, x0: &[f64], delta: f64, r_ladder: &[f64]) -> Result<TargetExperiment> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("δ = {delta} must be ≥ 0")));
    }
    target_balls_with_rule(system, x0, delta, RadiusRule::Power { delta }, r_ladder)
}

/// Builds the ball families. Radii in the ladder that reproduce the previous
/// cut-set exactly are skipped.
pub fn target_balls_with_rule(
    system: &IfsSystem,
    x0: &[f64],
    delta: f64,
    rule: RadiusRule,
    r_ladder: &[f64],
) -> Result<TargetExperiment> {
    let d = system.dim();
    if x0.len() != d || x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("x0 must be a finite point of dimension {d}")));
    }
    if r_ladder.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut ladder = r_ladder.to_vec();
    ladder.sort_by(|a, b| b.total_cmp(a));
    let budget = word_budget();
    let mut generations: Vec<Generation> = Vec::new();
    let mut last_print = None;
    for &r in &ladder {
        let mut centers = Vec::new();
        let mut radii = Vec::new();
        let mut print = Fingerprint::new();
        visit_cut_set(system, r, budget, |cell| {
            print.add(cell.letters);
            centers.extend(cell.image(system, x0));
            radii.push(rule.radius(cell.diameter, cell.letters.len()));
        })?;
        if last_print == Some(print.0) {
            continue;
        }
        last_print = Some(print.0);
        let (lo, hi) = radii
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
        generations.push(Generation {
            cut_radius: r,
            count: radii.len(),
            min_radius: lo,
            max_radius: hi,
            centers,
            radii,
        });
    }
    Ok(TargetExperiment {
        x0: x0.to_vec(),
        delta,
        rule,
        dim: d,
        generations,
    })
}

/// FNV-1a over the letter stream with separators.
struct Fingerprint(u64);

impl Fingerprint {
    fn new() -> Self {
        Fingerprint(0xcbf2_9ce4_8422_2325)
    }

    fn add(&mut self, letters: &[u32]) {
        for &l in letters.iter().chain(std::iter::once(&0)) {
            for b in l.to_le_bytes() {
                self.0 ^= b as u64;
                self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn cantor_left_endpoints() {
        let e = target_balls(&gallery::cantor(), &[0.0], 1.0, &[3f64.powi(-3)]).unwrap();
        let g = &e.generations[0];
        assert_eq!(g.count, 8);
        let mut c = g.centers.clone();
        c.sort_by(f64::total_cmp);
        let expected = [0.0, 2.0, 6.0, 8.0, 18.0, 20.0, 24.0, 26.0];
        for (x, e) in c.iter().zip(expected) {
            assert!((x - e / 27.0).abs() < 1e-15);
        }
        assert!(g.radii.iter().all(|r| (r - 1.0 / 27.0).abs() < 1e-15));
    }

    #[test]
    fn zero_delta_gives_unit_radii() {
        let e = target_balls(&gallery::cantor(), &[0.0], 0.0, &[0.1, 0.01]).unwrap();
        assert!(e.generations.iter().all(|g| g.radii.iter().all(|&r| r == 1.0)));
    }

    #[test]
    fn dyadic_squares() {
        let e = target_balls(&gallery::dyadic_twin(), &[0.0], 2.0, &[0.25]).unwrap();
        let g = &e.generations[0];
        assert_eq!(g.centers, vec![0.0, 0.25, 0.5, 0.75]);
        assert!(g.radii.iter().all(|&r| r == 0.0625));
    }

    #[test]
    fn radii_follow_the_power_rule() {
        let sys = gallery::half_quarter_quarter();
        let e = target_balls(&sys, &[0.3], 1.7, &dyadic_ladder(0.5, 1e-3).unwrap()).unwrap();
        for g in &e.generations {
            let cs = crate::cutset::cut_set(&sys, g.cut_radius).unwrap();
            for (geo, r) in cs.geometries.iter().zip(&g.radii) {
                assert!((geo.diameter.powf(1.7) - r).abs() <= 1e-12 * r);
            }
        }
    }

    #[test]
    fn repeated_cut_sets_are_dropped() {
        // 2^-j cuts of the Cantor set repeat whenever no 3^-n lies in between
        let e = target_balls(&gallery::cantor(), &[0.0], 1.0, &dyadic_ladder(0.5, 1e-3).unwrap()).unwrap();
        let counts: Vec<usize> = e.generations.iter().map(|g| g.count).collect();
        assert_eq!(counts, vec![2, 4, 8, 16, 32, 64]);
    }

    #[test]
    fn bad_inputs() {
        let s = gallery::cantor();
        assert!(target_balls(&s, &[0.0], -1.0, &[0.1]).is_err());
        assert!(target_balls(&s, &[0.0, 1.0], 1.0, &[0.1]).is_err());
        assert!(target_balls(&s, &[0.0], 1.0, &[]).is_err());
        assert!(dyadic_ladder(0.1, 0.2).is_err());
    }
}
