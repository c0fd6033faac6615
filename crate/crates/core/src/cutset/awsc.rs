use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::dfs::visit_cut_set;
use super::identity::{group_equal, key_for, probe_points, MapKey};
use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::linalg::{euclidean, Point};
use crate::numeric::word_budget;

/// Candidate ball centers for the maximum in `t_k`.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum CenterPlan {
    /// Anchor images `f_w(z)` of the cut-set maps.
    Anchors,
    /// Anchor images plus midpoints of anchor pairs closer than `2·2^{−k}`.
    #[default]
    AnchorsAndMidpoints,
    /// Caller-supplied centers.
    Explicit(Vec<Point>),
}

/// Overlap count at level `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AwscReport {
    pub k: usize,
    pub radius: f64,
    pub cut_size: usize,
    /// Max number of distinct cut-set maps whose cylinder meets `B(x, 2^{−k})`.
    pub t_k: usize,
    pub argmax_center: Point,
    pub distinct_maps: usize,
    pub centers_tried: usize,
}

impl AwscReport {
    pub fn log_t_over_k(&self) -> f64 {
        (self.t_k as f64).ln() / self.k as f64
    }
}

/// Where a cylinder lives: an exact interval on the line, or a ball around
/// its anchor image of radius its diameter.
#[derive(Debug, Clone)]
enum Extent {
    Interval(f64, f64),
    Ball(Point, f64),
}

impl Extent {
    fn meets(&self, x: &[f64], r: f64) -> bool {
        match self {
            Extent::Interval(lo, hi) => (lo - x[0]).max(x[0] - hi).max(0.0) <= r,
            Extent::Ball(c, d) => euclidean(c, x) <= r + d,
        }
    }
}

pub fn awsc_statistic(system: &IfsSystem, k: usize, plan: &CenterPlan) -> Result<AwscReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("level k must be ≥ 1".into()));
    }
    let r = 0.5f64.powi(k as i32);
    let probes = probe_points(system);
    let hull = system.hull_interval();
    let mut keys: Vec<MapKey> = Vec::new();
    let mut extents = Vec::new();
    let mut anchors = Vec::new();
    visit_cut_set(system, r, word_budget(), |cell| {
        keys.push(key_for(system, cell.letters, cell.similarity, &probes));
        let anchor = cell.image(system, system.anchor());
        let extent = match (hull, cell.similarity) {
            (Some((a, b)), Some(s)) => {
                let (fa, fb) = (s.apply(&[a])[0], s.apply(&[b])[0]);
                Extent::Interval(fa.min(fb), fa.max(fb))
            }
            _ => Extent::Ball(anchor.clone(), cell.diameter),
        };
        extents.push(extent);
        anchors.push(anchor);
    })?;
    let cut_size = keys.len();
    let reps: Vec<usize> = group_equal(&keys).into_iter().map(|g| g[0]).collect();
    let extents: Vec<Extent> = reps.iter().map(|&i| extents[i].clone()).collect();
    let anchors: Vec<Point> = reps.iter().map(|&i| anchors[i].clone()).collect();

    let cell = 2.0 * r * (1.0 + 1e-9);
    let grid = Grid::new(&anchors, cell);
    let centers: Vec<Point> = match plan {
        CenterPlan::Explicit(c) => c.clone(),
        CenterPlan::Anchors => anchors.clone(),
        CenterPlan::AnchorsAndMidpoints => {
            let mut c = anchors.clone();
            for (i, a) in anchors.iter().enumerate() {
                for j in grid.near(a) {
                    if j > i && euclidean(a, &anchors[j]) <= 2.0 * r {
                        c.push(a.iter().zip(&anchors[j]).map(|(x, y)| 0.5 * (x + y)).collect());
                    }
                }
            }
            c
        }
    };
    if centers.is_empty() {
        return Err(Error::EmptyInput);
    }
    let counts: Vec<usize> = centers
        .par_iter()
        .map(|x| match plan {
            CenterPlan::Explicit(_) => extents.iter().filter(|e| e.meets(x, r)).count(),
            _ => grid.near(x).filter(|&j| extents[j].meets(x, r)).count(),
        })
        .collect();
    let (best, t_k) = counts
        .iter()
        .enumerate()
        .fold((0, 0), |acc, (i, &c)| if c > acc.1 { (i, c) } else { acc });
    Ok(AwscReport {
        k,
        radius: r,
        cut_size,
        t_k,
        argmax_center: centers[best].clone(),
        distinct_maps: reps.len(),
        centers_tried: centers.len(),
    })
}

/// Uniform hash grid over anchor points.
struct Grid {
    cell: f64,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl Grid {
    fn new(points: &[Point], cell: f64) -> Self {
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(p, cell)).or_default().push(i);
        }
        Grid { cell, buckets }
    }

    fn key(p: &[f64], cell: f64) -> Vec<i64> {
        p.iter().map(|x| (x / cell).floor() as i64).collect()
    }

    /// Indices in the 3^d block of cells around `p`, ascending.
    fn near(&self, p: &[f64]) -> impl Iterator<Item = usize> {
        let base = Self::key(p, self.cell);
        let d = base.len();
        let mut out = Vec::new();
        for code in 0..3usize.pow(d as u32) {
            let mut key = base.clone();
            let mut c = code;
            for slot in key.iter_mut() {
                *slot += (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(v) = self.buckets.get(&key) {
                out.extend_from_slice(v);
            }
        }
        out.sort_unstable();
        out.into_iter()
    }
}

/// `k,cut_size,t_k,log_t_k_over_k`, one row per level.
pub fn awsc_csv(reports: &[AwscReport]) -> String {
    let mut out = String::from("k,cut_size,t_k,log_t_k_over_k\n");
    for r in reports {
        out.push_str(&format!("{},{},{},{}\n", r.k, r.cut_size, r.t_k, r.log_t_over_k()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutset::cut_set;
    use crate::gallery;
    use crate::ifs::{BoundingBall, Similarity};

    /// Direct count over every cylinder for the given centers.
    fn brute_force(system: &IfsSystem, k: usize) -> usize {
        let r = 0.5f64.powi(k as i32);
        let cs = cut_set(system, r).unwrap();
        let (a, b) = system.hull_interval().unwrap();
        let mut intervals: Vec<(f64, f64)> = cs
            .words
            .iter()
            .map(|w| {
                let f = system.compose(w).unwrap();
                let (x, y) = (f.apply(&[a])[0], f.apply(&[b])[0]);
                (x.min(y), x.max(y))
            })
            .collect();
        intervals.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        intervals.dedup_by(|p, q| (p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-12);
        let centers: Vec<f64> = cs.geometries.iter().map(|g| g.anchor_image[0]).collect();
        let mut best = 0;
        for (i, &x) in centers.iter().enumerate() {
            for &y in &centers[i..] {
                if (x - y).abs() <= 2.0 * r {
                    let c = 0.5 * (x + y);
                    let n = intervals
                        .iter()
                        .filter(|(lo, hi)| (lo - c).max(c - hi).max(0.0) <= r)
                        .count();
                    best = best.max(n);
                }
            }
        }
        best
    }

    #[test]
    fn cantor_is_bounded_and_matches_brute_force() {
        let sys = gallery::cantor();
        for k in 4..=9 {
            let rep = awsc_statistic(&sys, k, &CenterPlan::default()).unwrap();
            assert!(rep.t_k <= 3);
            assert_eq!(rep.t_k, brute_force(&sys, k));
            assert_eq!(rep.distinct_maps, rep.cut_size);
        }
    }

    #[test]
    fn duplicates_are_collapsed() {
        let ball = BoundingBall {
            center: vec![0.5],
            radius: 0.5,
        };
        let dup = IfsSystem::new(
            [(0.5, 0.0), (0.5, 0.0), (0.5, 0.5)]
                .iter()
                .map(|&(r, t)| Similarity::line(r, t).unwrap().into())
                .collect(),
            ball.clone(),
        )
        .unwrap();
        let plain = gallery::dyadic_twin();
        for k in 3..=6 {
            let a = awsc_statistic(&dup, k, &CenterPlan::default()).unwrap();
            let b = awsc_statistic(&plain, k, &CenterPlan::default()).unwrap();
            assert_eq!(a.t_k, b.t_k);
            assert_eq!(a.distinct_maps, b.distinct_maps);
            assert!(a.cut_size > b.cut_size);
        }
    }

    #[test]
    fn overlaps_raise_the_count() {
        let osc = awsc_statistic(&gallery::half_quarter_quarter(), 8, &CenterPlan::default()).unwrap();
        let overlap = awsc_statistic(&gallery::overlapping_triple(), 8, &CenterPlan::default()).unwrap();
        assert!(overlap.t_k >= osc.t_k);
    }

    #[test]
    fn planar_and_explicit_centers() {
        let sys = gallery::sierpinski();
        let rep = awsc_statistic(&sys, 5, &CenterPlan::Anchors).unwrap();
        assert!(rep.t_k >= 1 && rep.t_k <= rep.cut_size);
        let one = awsc_statistic(&sys, 5, &CenterPlan::Explicit(vec![vec![10.0, 10.0]])).unwrap();
        assert_eq!(one.t_k, 0);
    }

    #[test]
    fn csv_layout() {
        let reps: Vec<_> = (4..=5)
            .map(|k| awsc_statistic(&gallery::cantor(), k, &CenterPlan::default()).unwrap())
            .collect();
        let csv = awsc_csv(&reps);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,cut_size,t_k,log_t_k_over_k");
        assert_eq!(lines.len(), 3);
    }
}
