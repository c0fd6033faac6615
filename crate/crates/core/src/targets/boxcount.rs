use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::balls::TargetExperiment;
use crate::error::{Error, Result};
use crate::numeric::{linear_fit, LinearFit};

/// Upper bound on grid cells enumerated per scale in dimension ≥ 2.
const MAX_CELLS: u64 = 50_000_000;

/// Dyadic scales `ε = 2^{−j}`, `jmin ≤ j ≤ jmax`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsLadder {
    pub jmin: u32,
    pub jmax: u32,
}

impl Default for EpsLadder {
    fn default() -> Self {
        EpsLadder { jmin: 6, jmax: 14 }
    }
}

impl EpsLadder {
    pub fn scales(&self) -> Vec<f64> {
        (self.jmin..=self.jmax).map(|j| 0.5f64.powi(j as i32)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxCount {
    pub eps: f64,
    pub n: u64,
    pub log_n: f64,
    /// Balls in the radius window at this scale.
    pub balls: usize,
    /// Whether the point entered the regression.
    pub fitted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stabilization {
    pub g_min: usize,
    pub estimate: f64,
    pub half_width: f64,
    /// Number of scales in the regression.
    pub scales: usize,
}

/// Box-counting estimate of the limsup proxy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimsupEstimate {
    /// Slope clamped to `[0, d]`.
    pub dim_estimate: f64,
    pub half_width: f64,
    pub fit: LinearFit,
    /// Upper/lower end of the radius window as a multiple of `ε`.
    pub window_ratio: f64,
    pub boxcount: Vec<BoxCount>,
    pub stabilization: Vec<Stabilization>,
    /// `max − min` over the stabilization estimates.
    pub stabilization_spread: f64,
}

impl LimsupEstimate {
    /// `eps,N,logN`.
    pub fn csv(&self) -> String {
        let mut out = String::from("eps,N,logN\n");
        for b in &self.boxcount {
            out.push_str(&format!("{},{},{}\n", b.eps, b.n, b.log_n));
        }
        out
    }
}

/// Largest ratio between consecutive distinct ball radii (∞ for one radius).
pub fn window_ratio(exp: &TargetExperiment) -> f64 {
    let mut radii: Vec<f64> = exp
        .generations
        .iter()
        .flat_map(|g| g.radii.iter().copied())
        .collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    if radii.len() < 2 {
        return f64::INFINITY;
    }
    radii.windows(2).map(|w| w[1] / w[0]).fold(1.0, f64::max)
}

/// At scale `ε`, the limsup set is approximated by the union of all balls
/// whose radius lies in `[ε, λε)`, `λ` being the [`window_ratio`]: the balls
/// that resolve at this scale from every generation that reaches it. The box
/// count takes the larger of two grids (anchored at the bounding-box corner,
/// and shifted by half a cell). The regression drops the largest and smallest
/// usable scale.
pub fn limsup_box_dimension(exp: &TargetExperiment, ladder: EpsLadder) -> Result<LimsupEstimate> {
    if exp.generations.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "need at least 4 generations, got {}",
            exp.generations.len()
        )));
    }
    let (fit, window, boxcount) = fit_scales(exp, ladder)?;
    let mut stabilization = vec![Stabilization {
        g_min: 0,
        estimate: clamp_dim(fit.slope, exp.dim),
        half_width: fit.half_width,
        scales: fitted_count(&boxcount),
    }];
    for g_min in 1..exp.generations.len() {
        match fit_scales(&exp.from_generation(g_min), ladder) {
            Ok((f, _, rows)) => stabilization.push(Stabilization {
                g_min,
                estimate: clamp_dim(f.slope, exp.dim),
                half_width: f.half_width,
                scales: fitted_count(&rows),
            }),
            Err(_) => break,
        }
    }
    let (lo, hi) = stabilization
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.estimate), b.max(s.estimate)));
    Ok(LimsupEstimate {
        dim_estimate: clamp_dim(fit.slope, exp.dim),
        half_width: fit.half_width,
        fit,
        window_ratio: window,
        boxcount,
        stabilization,
        stabilization_spread: hi - lo,
    })
}

fn fitted_count(rows: &[BoxCount]) -> usize {
    rows.iter().filter(|b| b.fitted).count()
}

fn clamp_dim(slope: f64, d: usize) -> f64 {
    slope.clamp(0.0, d as f64)
}

fn fit_scales(exp: &TargetExperiment, ladder: EpsLadder) -> Result<(LinearFit, f64, Vec<BoxCount>)> {
    let lambda = window_ratio(exp);
    let origin = grid_origin(exp);
    let mut rows: Vec<BoxCount> = ladder
        .scales()
        .par_iter()
        .map(|&eps| {
            let lo = eps * (1.0 - 1e-12);
            let hi = lambda * eps * (1.0 - 1e-12);
            let selected = select(exp, lo, hi);
            let n = if selected.is_empty() {
                0
            } else {
                let shifted: Vec<f64> = origin.iter().map(|o| o - 0.5 * eps).collect();
                count_boxes(&selected, exp.dim, eps, &origin).max(count_boxes(&selected, exp.dim, eps, &shifted))
            };
            BoxCount {
                eps,
                n,
                log_n: if n > 0 { (n as f64).ln() } else { f64::NAN },
                balls: selected.len(),
                fitted: false,
            }
        })
        .collect();
    let usable: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].n > 0).collect();
    if usable.len() < 5 {
        return Err(Error::InsufficientScales {
            usable: usable.len().saturating_sub(2),
        });
    }
    let inner = &usable[1..usable.len() - 1];
    let x: Vec<f64> = inner.iter().map(|&i| -rows[i].eps.ln()).collect();
    let y: Vec<f64> = inner.iter().map(|&i| rows[i].log_n).collect();
    for &i in inner {
        rows[i].fitted = true;
    }
    Ok((linear_fit(&x, &y)?, lambda, rows))
}

/// Lower corner of the bounding box of all balls.
fn grid_origin(exp: &TargetExperiment) -> Vec<f64> {
    let d = exp.dim;
    let mut origin = vec![f64::INFINITY; d];
    for g in &exp.generations {
        for (i, r) in g.radii.iter().enumerate() {
            for (o, c) in origin.iter_mut().zip(g.center(i, d)) {
                *o = o.min(c - r);
            }
        }
    }
    origin
}

/// `(center, radius)` of every ball with radius in `[lo, hi)`.
fn select(exp: &TargetExperiment, lo: f64, hi: f64) -> Vec<(&[f64], f64)> {
    let d = exp.dim;
    exp.generations
        .iter()
        .filter(|g| g.max_radius >= lo && g.min_radius < hi)
        .flat_map(|g| {
            g.radii
                .iter()
                .enumerate()
                .filter(move |(_, &r)| r >= lo && r < hi)
                .map(move |(i, &r)| (g.center(i, d), r))
        })
        .collect()
}

/// Number of grid cells of side `eps` (anchored at `origin`) meeting the
/// union of sup-norm balls.
pub(crate) fn count_boxes(balls: &[(&[f64], f64)], d: usize, eps: f64, origin: &[f64]) -> u64 {
    let index = |x: f64, o: f64| ((x - o) / eps).floor() as i64;
    if d == 1 {
        let mut iv: Vec<(i64, i64)> = balls
            .iter()
            .map(|(c, r)| (index(c[0] - r, origin[0]), index(c[0] + r, origin[0])))
            .collect();
        iv.sort_unstable();
        let mut total: u64 = 0;
        let mut cur: Option<(i64, i64)> = None;
        for (a, b) in iv {
            cur = match cur {
                Some((lo, hi)) if a <= hi => Some((lo, hi.max(b))),
                Some((lo, hi)) => {
                    total += (hi - lo + 1) as u64;
                    Some((a, b))
                }
                None => Some((a, b)),
            };
        }
        if let Some((lo, hi)) = cur {
            total += (hi - lo + 1) as u64;
        }
        return total;
    }
    let mut cells: Vec<i64> = Vec::new();
    let mut budget = MAX_CELLS;
    for (c, r) in balls {
        let ranges: Vec<(i64, i64)> = c
            .iter()
            .zip(origin)
            .map(|(x, o)| (index(x - r, *o), index(x + r, *o)))
            .collect();
        let size: u64 = ranges.iter().map(|(a, b)| (b - a + 1) as u64).product();
        budget = budget.saturating_sub(size);
        if budget == 0 {
            break;
        }
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'cells: loop {
            cells.extend_from_slice(&idx);
            for (slot, (lo, hi)) in idx.iter_mut().zip(&ranges) {
                if *slot < *hi {
                    *slot += 1;
                    continue 'cells;
                }
                *slot = *lo;
            }
            break;
        }
    }
    let mut keys: Vec<&[i64]> = cells.chunks(d).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len() as u64
}
