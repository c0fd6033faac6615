use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::linalg::{mat_mul, operator_norm};
use crate::numeric::{level_size, tree_size};

/// Log cylinder diameters `log |f_w(K)|` for every word of length `1..=depth`,
/// grouped by length. Each level is in a fixed (reversed-lexicographic) order
/// that does not depend on thread scheduling.
#[derive(Debug, Clone)]
pub struct LogDiameters {
    pub levels: Vec<Vec<f64>>,
}

/// Largest depth whose full tree fits in `budget`.
pub fn affordable_depth(m: usize, budget: u64) -> usize {
    let mut k = 0;
    while k < 64 && tree_size(m, k + 1) <= budget {
        k += 1;
    }
    k
}

impl LogDiameters {
    /// Enumerates by prepending letters, so the chain rule extends each node's
    /// Jacobian in one step: `f_{iw}'(z) = f_i'(f_w(z)) · f_w'(z)`.
    pub fn enumerate(system: &IfsSystem, depth: usize, budget: u64) -> Result<Self> {
        let m = system.len();
        let requested = tree_size(m, depth);
        let reach = affordable_depth(m, budget).min(depth);
        let levels = if system.is_similarity() {
            similarity_levels(system, reach)
        } else {
            generic_levels(system, reach)
        };
        if reach < depth {
            return Err(Error::BudgetExceeded {
                budget,
                requested,
                depth_reached: reach,
                partial: levels
                    .iter()
                    .map(|l| crate::numeric::log_sum_exp(l.iter().copied()))
                    .collect(),
            });
        }
        Ok(LogDiameters { levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `g_k(s)` for `k = 1..=depth`, with compensated log-sum-exp.
    pub fn gk(&self, s: f64) -> Vec<f64> {
        self.levels
            .iter()
            .map(|l| crate::numeric::log_sum_exp(l.iter().map(|&x| s * x)))
            .collect()
    }
}

fn similarity_levels(system: &IfsSystem, depth: usize) -> Vec<Vec<f64>> {
    let log_c: Vec<f64> = system
        .ratios()
        .expect("similarity system")
        .iter()
        .map(|c| c.ln())
        .collect();
    let mut levels = Vec::with_capacity(depth);
    let mut cur = vec![system.attractor_diameter().ln()];
    for _ in 0..depth {
        let next: Vec<f64> = cur
            .iter()
            .flat_map(|&x| log_c.iter().map(move |&l| x + l))
            .collect();
        levels.push(next.clone());
        cur = next;
    }
    levels
}

fn generic_levels(system: &IfsSystem, depth: usize) -> Vec<Vec<f64>> {
    if depth == 0 {
        return Vec::new();
    }
    let d = system.dim();
    let log_k = system.attractor_diameter().ln();
    let m = system.len();
    let per_root: Vec<Vec<Vec<f64>>> = (1..=m as u32)
        .into_par_iter()
        .map(|letter| {
            let mut levels: Vec<Vec<f64>> = (0..depth)
                .map(|k| Vec::with_capacity(level_size(m, k) as usize))
                .collect();
            let mut point = vec![0.0; d];
            let mut jac = vec![0.0; d * d];
            let map = system.map(letter);
            map.apply_into(system.anchor(), &mut point);
            map.jacobian_into(system.anchor(), &mut jac);
            descend(system, &point, &jac, 1, depth, log_k, &mut levels);
            levels
        })
        .collect();
    let mut levels: Vec<Vec<f64>> = vec![Vec::new(); depth];
    for root in per_root {
        for (k, l) in root.into_iter().enumerate() {
            levels[k].extend(l);
        }
    }
    levels
}

fn descend(
    system: &IfsSystem,
    point: &[f64],
    jac: &[f64],
    len: usize,
    depth: usize,
    log_k: f64,
    levels: &mut [Vec<f64>],
) {
    let d = system.dim();
    levels[len - 1].push(operator_norm(jac, d).ln() + log_k);
    if len == depth {
        return;
    }
    let mut step = vec![0.0; d * d];
    let mut child_jac = vec![0.0; d * d];
    let mut child_point = vec![0.0; d];
    for map in system.maps() {
        map.jacobian_into(point, &mut step);
        mat_mul(&step, jac, d, &mut child_jac);
        map.apply_into(point, &mut child_point);
        descend(system, &child_point, &child_jac, len + 1, depth, log_k, levels);
    }
}
