use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::dyadic::{optimal_cover, Cover};
use crate::error::{Error, Result};
use crate::ifs::{attractor_sample, IfsSystem, PointCloud, ProbabilityVector};
use crate::linalg::Point;

/// Largest admissible discarded mass.
pub const MAX_ETA: f64 = 0.2;

/// Where the measure is restricted before covering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    Whole,
    /// Sup-norm ball.
    Ball { center: Point, radius: f64 },
    Box { lo: Point, hi: Point },
}

impl Region {
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Region::Whole => true,
            Region::Ball { center, radius } => center.iter().zip(p).all(|(c, x)| (x - c).abs() <= *radius),
            Region::Box { lo, hi } => p.iter().zip(lo.iter().zip(hi)).all(|(x, (a, b))| *x >= *a && *x <= *b),
        }
    }

    /// Sup-norm diameter, infinite for the whole space.
    pub fn diameter(&self) -> f64 {
        match self {
            Region::Whole => f64::INFINITY,
            Region::Ball { radius, .. } => 2.0 * radius,
            Region::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).fold(0.0, f64::max),
        }
    }

    fn corner(&self) -> Option<Point> {
        match self {
            Region::Whole => None,
            Region::Ball { center, radius } => Some(center.iter().map(|c| c - radius).collect()),
            Region::Box { lo, .. } => Some(lo.clone()),
        }
    }
}

/// Content of the restricted measure after discarding at most `eta` of its
/// mass in the lightest grid cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssentialContentEstimate {
    pub s: f64,
    pub eta: f64,
    pub grid_scale: f64,
    pub value: f64,
    /// Content of every occupied cell, nothing discarded.
    pub plain_value: f64,
    /// Mass kept, relative to the region's mass.
    pub retained_mass: f64,
    /// Fraction of the sample that fell in the region.
    pub region_mass: f64,
    pub retained_cells: usize,
    pub discarded_cells: usize,
    /// Sup-norm diameter of the occupied cells.
    pub set_diameter: f64,
    pub cover: Cover,
}

impl EssentialContentEstimate {
    pub const CSV_HEADER: &'static str = "s,eta,grid_scale,value,retained_mass";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.s, self.eta, self.grid_scale, self.value, self.retained_mass
        )
    }
}

/// CSV ledger with one row per estimate.
pub fn essential_csv(rows: &[EssentialContentEstimate]) -> String {
    let mut out = String::from(EssentialContentEstimate::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn essential_content_estimate(
    system: &IfsSystem,
    weights: &ProbabilityVector,
    region: &Region,
    s: f64,
    eta: f64,
    grid_scale: f64,
    n_sample: usize,
    seed: u64,
) -> Result<EssentialContentEstimate> {
    let cloud = attractor_sample(system, weights, n_sample, seed)?;
    essential_content_from_sample(&cloud, region, s, eta, grid_scale)
}

/// As [`essential_content_estimate`] on an existing sample of the measure.
pub fn essential_content_from_sample(
    cloud: &PointCloud,
    region: &Region,
    s: f64,
    eta: f64,
    grid_scale: f64,
) -> Result<EssentialContentEstimate> {
    if !(0.0..=MAX_ETA).contains(&eta) {
        return Err(Error::InvalidParameter(format!("eta = {eta} outside [0, {MAX_ETA}]")));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent s = {s} must be ≥ 0")));
    }
    if !(grid_scale > 0.0 && grid_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("grid scale {grid_scale} must be > 0")));
    }
    if cloud.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = cloud.dim();
    let inside: Vec<&[f64]> = cloud.iter().filter(|p| region.contains(p)).collect();
    if inside.is_empty() {
        return Err(Error::ZeroMass);
    }
    let origin = region.corner().unwrap_or_else(|| {
        let mut lo = vec![f64::INFINITY; d];
        for p in &inside {
            for (l, x) in lo.iter_mut().zip(*p) {
                *l = l.min(*x);
            }
        }
        lo
    });
    let mut counts: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for p in &inside {
        let key = p
            .iter()
            .zip(&origin)
            .map(|(x, o)| ((x - o) / grid_scale).floor() as i64)
            .collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    let total = inside.len() as f64;
    let all: Vec<Vec<i64>> = counts.keys().cloned().collect();
    let plain = optimal_cover(d, &all, &origin, grid_scale, s);

    // lightest first; ties broken by cell key for determinism
    let mut by_mass: Vec<(u64, &Vec<i64>)> = counts.iter().map(|(k, c)| (*c, k)).collect();
    by_mass.sort();
    let budget = (eta * total).floor() as u64;
    let mut dropped = 0u64;
    let mut discarded = 0usize;
    for (c, _) in &by_mass {
        if dropped + c > budget || discarded + 1 == by_mass.len() {
            break;
        }
        dropped += c;
        discarded += 1;
    }
    let mut kept: Vec<Vec<i64>> = by_mass[discarded..].iter().map(|(_, k)| (*k).clone()).collect();
    kept.sort();
    let essential = optimal_cover(d, &kept, &origin, grid_scale, s);
    Ok(EssentialContentEstimate {
        s,
        eta,
        grid_scale,
        value: essential.value.min(plain.value),
        plain_value: plain.value,
        retained_mass: 1.0 - dropped as f64 / total,
        region_mass: total / cloud.len() as f64,
        retained_cells: kept.len(),
        discarded_cells: discarded,
        set_diameter: plain.set_diameter,
        cover: essential.cover,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn cantor_sample(n: usize) -> PointCloud {
        attractor_sample(&gallery::cantor(), &ProbabilityVector::uniform(2), n, 3).unwrap()
    }

    #[test]
    fn zero_eta_is_plain_content() {
        let cloud = cantor_sample(50_000);
        let s = 2f64.ln() / 3f64.ln();
        let region = Region::Box { lo: vec![0.0], hi: vec![1.0] };
        let e = essential_content_from_sample(&cloud, &region, s, 0.0, 3f64.powi(-6)).unwrap();
        assert_eq!(e.value, e.plain_value);
        assert_eq!(e.retained_mass, 1.0);
        assert_eq!(e.discarded_cells, 0);
    }

    #[test]
    fn above_dimension_decays_with_refinement() {
        let cloud = cantor_sample(200_000);
        let mut last = f64::INFINITY;
        for j in 8..=10 {
            let e = essential_content_from_sample(&cloud, &Region::Whole, 0.9, 0.05, 3f64.powi(-j)).unwrap();
            assert!(e.value <= 0.2, "{}", e.value);
            assert!(e.value < last);
            assert!(e.retained_mass >= 0.95);
            last = e.value;
        }
    }

    #[test]
    fn discarding_never_increases() {
        let cloud = cantor_sample(20_000);
        let mut last = f64::INFINITY;
        for eta in [0.0, 0.01, 0.05, 0.1, 0.2] {
            let e = essential_content_from_sample(&cloud, &Region::Whole, 0.5, eta, 3f64.powi(-7)).unwrap();
            assert!(e.value <= e.plain_value);
            assert!(e.retained_mass >= 1.0 - eta - 1e-12);
            assert!(e.value <= last + 1e-15);
            last = e.value;
        }
    }

    #[test]
    fn parameter_validation() {
        let cloud = cantor_sample(100);
        assert!(essential_content_from_sample(&cloud, &Region::Whole, 0.5, 0.3, 0.01).is_err());
        let gap = Region::Ball { center: vec![0.5], radius: 0.1 };
        assert_eq!(
            essential_content_from_sample(&cloud, &gap, 0.5, 0.0, 0.01),
            Err(Error::ZeroMass)
        );
    }

    #[test]
    fn csv_ledger() {
        let cloud = cantor_sample(1000);
        let e = essential_content_from_sample(&cloud, &Region::Whole, 0.5, 0.0, 0.01).unwrap();
        let csv = essential_csv(&[e]);
        assert!(csv.starts_with("s,eta,grid_scale,value,retained_mass\n0.5,0,0.01,"));
    }
}
