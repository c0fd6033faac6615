use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::balls::{Generation, TargetExperiment};
use crate::error::{Error, Result};
use crate::ifs::{attractor_sample, IfsSystem, PointCloud, ProbabilityVector};

/// Share of sample points inside the union of one generation's balls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub generation: usize,
    pub cut_radius: f64,
    pub balls: usize,
    pub fraction: f64,
}

pub fn coverage_check(
    exp: &TargetExperiment,
    system: &IfsSystem,
    weights: &ProbabilityVector,
    n_points: usize,
    seed: u64,
) -> Result<Vec<CoverageRow>> {
    if exp.generations.len() < 2 {
        return Err(Error::InvalidParameter("coverage needs at least 2 generations".into()));
    }
    if exp.dim != system.dim() {
        return Err(Error::InvalidParameter("experiment and system dimensions differ".into()));
    }
    let cloud = attractor_sample(system, weights, n_points, seed)?;
    Ok(exp
        .generations
        .iter()
        .enumerate()
        .map(|(i, g)| CoverageRow {
            generation: i,
            cut_radius: g.cut_radius,
            balls: g.count,
            fraction: covered_fraction(g, &cloud),
        })
        .collect())
}

/// Fraction of `cloud` inside the union of sup-norm balls of `g`.
pub fn covered_fraction(g: &Generation, cloud: &PointCloud) -> f64 {
    let d = cloud.dim();
    let hits = if d == 1 {
        let merged = merged_intervals(g);
        cloud
            .coords()
            .par_iter()
            .filter(|&&x| {
                let i = merged.partition_point(|iv| iv.0 <= x);
                i > 0 && x <= merged[i - 1].1
            })
            .count()
    } else {
        let index = BallIndex::new(g, d);
        (0..cloud.len())
            .into_par_iter()
            .filter(|&i| index.contains(cloud.point(i)))
            .count()
    };
    hits as f64 / cloud.len() as f64
}

fn merged_intervals(g: &Generation) -> Vec<(f64, f64)> {
    let mut iv: Vec<(f64, f64)> = g
        .centers
        .iter()
        .zip(&g.radii)
        .map(|(&c, &r)| (c - r, c + r))
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Hash grid over ball centers with cell side the largest radius.
struct BallIndex<'a> {
    g: &'a Generation,
    d: usize,
    cell: f64,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> BallIndex<'a> {
    fn new(g: &'a Generation, d: usize) -> Self {
        let cell = g.max_radius.max(f64::MIN_POSITIVE);
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for i in 0..g.count {
            buckets.entry(key(g.center(i, d), cell)).or_default().push(i);
        }
        BallIndex { g, d, cell, buckets }
    }

    fn contains(&self, p: &[f64]) -> bool {
        let base = key(p, self.cell);
        for code in 0..3usize.pow(self.d as u32) {
            let mut k = base.clone();
            let mut c = code;
            for slot in k.iter_mut() {
                *slot += (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(list) = self.buckets.get(&k) {
                for &i in list {
                    let r = self.g.radii[i];
                    if self.g.center(i, self.d).iter().zip(p).all(|(c, x)| (c - x).abs() <= r) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

fn key(p: &[f64], cell: f64) -> Vec<i64> {
    p.iter().map(|x| (x / cell).floor() as i64).collect()
}
