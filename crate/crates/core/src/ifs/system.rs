use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::geometry::similarity_of;
use super::map::{C1Map, ContractionMap};
use super::word::Word;
use super::sample::PointCloud;
use crate::error::{Error, Result};
use crate::linalg::{euclidean, singular_extremes, Point};

/// Internal seed for the system-owned chaos-game runs (anchor, diameter).
const SYSTEM_SEED: u64 = 0x05ee_d1f5;
/// Chaos-game steps that project the ball center onto the attractor.
pub const ANCHOR_STEPS: usize = 40;
/// Points used by the sampled farthest-pair diameter estimate.
pub const DIAMETER_SAMPLE: usize = 100_000;
/// Relative slack on the bounding-ball containment checks.
const BALL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundingBall {
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiameterMethod {
    /// Fixed point of the interval hull operator (1-D similarities).
    ExactFixedPoint,
    /// Farthest pair of a chaos-game sample; an underestimate.
    Sampled,
    /// Supplied by the caller.
    Override,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttractorDiameter {
    pub value: f64,
    pub method: DiameterMethod,
}

/// Per-symbol contraction bounds: similarity ratios, or singular values of the
/// Jacobians sampled over the bounding ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionBounds {
    pub min: f64,
    pub max: f64,
}

/// An IFS `S = {f_1, …, f_m}` on a bounding ball, with its attractor diameter.
#[derive(Debug, Clone)]
pub struct IfsSystem {
    maps: Vec<ContractionMap>,
    dim: usize,
    ball: BoundingBall,
    diameter: AttractorDiameter,
    anchor: Point,
    hull: Option<(f64, f64)>,
    bounds: ContractionBounds,
}

impl IfsSystem {
    pub fn new(maps: Vec<ContractionMap>, ball: BoundingBall) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidSystem(format!(
                "an IFS needs at least 2 maps, got {}",
                maps.len()
            )));
        }
        let dim = ball.center.len();
        if dim == 0 {
            return Err(Error::InvalidSystem("ambient dimension is 0".into()));
        }
        if !(ball.radius > 0.0 && ball.radius.is_finite()) {
            return Err(Error::InvalidSystem("bounding ball radius must be positive".into()));
        }
        if let Some(i) = maps.iter().position(|m| m.dim() != dim) {
            return Err(Error::InvalidSystem(format!(
                "map {} has dimension {}, ambient dimension is {dim}",
                i + 1,
                maps[i].dim()
            )));
        }

        let probes = ball_probe_points(&ball);
        let mut bmin = f64::INFINITY;
        let mut bmax: f64 = 0.0;
        for (i, map) in maps.iter().enumerate() {
            match map {
                ContractionMap::Similarity(s) => {
                    let moved = euclidean(&s.apply(&ball.center), &ball.center);
                    if moved + s.ratio * ball.radius > ball.radius * (1.0 + BALL_TOL) {
                        return Err(Error::EscapesBoundingBall { index: i + 1 });
                    }
                    bmin = bmin.min(s.ratio);
                    bmax = bmax.max(s.ratio);
                }
                ContractionMap::GenericC1(_) => {
                    let mut jac = vec![0.0; dim * dim];
                    let mut img = vec![0.0; dim];
                    for p in &probes {
                        map.jacobian_into(p, &mut jac);
                        let (lo, hi) = singular_extremes(&jac, dim);
                        if !(hi < 1.0) {
                            return Err(Error::NotContraction {
                                index: i + 1,
                                norm: hi,
                            });
                        }
                        bmin = bmin.min(lo);
                        bmax = bmax.max(hi);
                        map.apply_into(p, &mut img);
                        if !(euclidean(&img, &ball.center) <= ball.radius * (1.0 + BALL_TOL)) {
                            return Err(Error::EscapesBoundingBall { index: i + 1 });
                        }
                    }
                }
            }
        }

        let mut system = IfsSystem {
            maps,
            dim,
            ball,
            diameter: AttractorDiameter {
                value: 0.0,
                method: DiameterMethod::Sampled,
            },
            anchor: Vec::new(),
            hull: None,
            bounds: ContractionBounds {
                min: bmin,
                max: bmax,
            },
        };
        system.anchor = system.project_to_attractor(&system.ball.center.clone(), ANCHOR_STEPS);
        system.diameter = system.estimate_attractor_diameter();
        if !(system.diameter.value > 1e-12 * system.ball.radius) {
            return Err(Error::DegenerateAttractor);
        }
        Ok(system)
    }

    /// Replaces |K|; used for rescaling experiments and externally known diameters.
    pub fn with_attractor_diameter(mut self, value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter(format!("attractor diameter {value}")));
        }
        self.diameter = AttractorDiameter {
            value,
            method: DiameterMethod::Override,
        };
        Ok(self)
    }

    pub fn maps(&self) -> &[ContractionMap] {
        &self.maps
    }

    pub fn map(&self, letter: u32) -> &ContractionMap {
        &self.maps[letter as usize - 1]
    }

    /// Number of maps `m`.
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ball(&self) -> &BoundingBall {
        &self.ball
    }

    pub fn diameter(&self) -> AttractorDiameter {
        self.diameter
    }

    /// |K|.
    pub fn attractor_diameter(&self) -> f64 {
        self.diameter.value
    }

    /// System-wide base point on (numerically) the attractor.
    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    /// Convex hull `[a, b]` of K for 1-D similarity systems.
    pub fn hull_interval(&self) -> Option<(f64, f64)> {
        self.hull
    }

    pub fn contraction_bounds(&self) -> ContractionBounds {
        self.bounds
    }

    pub fn is_similarity(&self) -> bool {
        self.maps.iter().all(|m| m.as_similarity().is_some())
    }

    /// Similarity ratios, if every map is a similarity.
    pub fn ratios(&self) -> Option<Vec<f64>> {
        self.maps
            .iter()
            .map(|m| m.as_similarity().map(|s| s.ratio))
            .collect()
    }

    /// The level-`k` system `{f_w : w ∈ Λᵏ}` in lexicographic word order. It
    /// has the same attractor, so |K|, the anchor and the ball are inherited.
    pub fn iterate(&self, k: usize) -> Result<IfsSystem> {
        if k == 0 {
            return Err(Error::InvalidParameter("iterate needs k ≥ 1".into()));
        }
        let count = crate::numeric::level_size(self.len(), k);
        let budget = crate::numeric::word_budget();
        if count > budget {
            return Err(Error::BudgetExceeded {
                budget,
                requested: count,
                depth_reached: 0,
                partial: Vec::new(),
            });
        }
        let maps = Word::all_of_length(self.len(), k)
            .map(|w| match similarity_of(self, w.letters()) {
                Some(s) => ContractionMap::Similarity(s),
                None => ContractionMap::generic(WordChain {
                    dim: self.dim,
                    maps: w.letters().iter().map(|&l| self.map(l).clone()).collect(),
                }),
            })
            .collect();
        Ok(IfsSystem {
            maps,
            dim: self.dim,
            ball: self.ball.clone(),
            diameter: self.diameter,
            anchor: self.anchor.clone(),
            hull: self.hull,
            bounds: ContractionBounds {
                min: self.bounds.min.powi(k as i32),
                max: self.bounds.max.powi(k as i32),
            },
        })
    }

    fn project_to_attractor(&self, start: &[f64], steps: usize) -> Point {
        let mut rng = ChaCha8Rng::seed_from_u64(SYSTEM_SEED);
        let mut p = start.to_vec();
        let mut next = p.clone();
        for _ in 0..steps {
            let i = rng.gen_range(0..self.maps.len());
            self.maps[i].apply_into(&p, &mut next);
            std::mem::swap(&mut p, &mut next);
        }
        p
    }

    fn estimate_attractor_diameter(&mut self) -> AttractorDiameter {
        if self.dim == 1 && self.is_similarity() {
            let (a, b) = self.hull_fixed_point();
            self.hull = Some((a, b));
            return AttractorDiameter {
                value: b - a,
                method: DiameterMethod::ExactFixedPoint,
            };
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SYSTEM_SEED ^ 0xd1a);
        let cloud = PointCloud::chaos_uniform(self, DIAMETER_SAMPLE, &mut rng);
        let mut candidates: Vec<Point> = cloud.iter().map(<[f64]>::to_vec).collect();
        // fixed points of short words lie exactly on K and catch the extremes
        for i in &self.maps {
            candidates.push(fixed_point_of(&[i], self.dim, &self.ball.center));
            for j in &self.maps {
                candidates.push(fixed_point_of(&[i, j], self.dim, &self.ball.center));
            }
        }
        AttractorDiameter {
            value: farthest_pair(&candidates, self.dim),
            method: DiameterMethod::Sampled,
        }
    }

    /// Iterates `[a, b] ↦ hull(∪ f_i([a, b]))` from the bounding interval.
    fn hull_fixed_point(&self) -> (f64, f64) {
        let c = self.ball.center[0];
        let (mut a, mut b) = (c - self.ball.radius, c + self.ball.radius);
        for _ in 0..100_000 {
            let mut na = f64::INFINITY;
            let mut nb = f64::NEG_INFINITY;
            for m in &self.maps {
                let s = m.as_similarity().expect("similarity system");
                for x in [a, b] {
                    let y = s.apply(&[x])[0];
                    na = na.min(y);
                    nb = nb.max(y);
                }
            }
            let moved = (na - a).abs().max((nb - b).abs());
            a = na;
            b = nb;
            if moved <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
                break;
            }
        }
        (a, b)
    }
}

/// `f_{w_1} ∘ … ∘ f_{w_k}` as a C¹ map.
#[derive(Debug)]
struct WordChain {
    dim: usize,
    maps: Vec<ContractionMap>,
}

impl C1Map for WordChain {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, p: &[f64], out: &mut [f64]) {
        let mut cur = p.to_vec();
        for m in self.maps.iter().rev() {
            m.apply_into(&cur, out);
            cur.copy_from_slice(out);
        }
        out.copy_from_slice(&cur);
    }

    fn jacobian(&self, p: &[f64], out: &mut [f64]) {
        let d = self.dim;
        let mut cur = p.to_vec();
        let mut next = vec![0.0; d];
        let mut jac = crate::linalg::identity(d);
        let mut step = vec![0.0; d * d];
        for m in self.maps.iter().rev() {
            m.jacobian_into(&cur, &mut step);
            crate::linalg::mat_mul(&step, &jac, d, out);
            jac.copy_from_slice(out);
            m.apply_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        out.copy_from_slice(&jac);
    }
}

fn fixed_point_of(maps: &[&ContractionMap], dim: usize, start: &[f64]) -> Point {
    let mut p = start.to_vec();
    let mut next = vec![0.0; dim];
    for _ in 0..200 {
        for m in maps.iter().rev() {
            m.apply_into(&p, &mut next);
            std::mem::swap(&mut p, &mut next);
        }
    }
    p
}

/// Farthest pair among points that are extreme in one of a fixed set of
/// directions; exact in 1-D, a slight underestimate otherwise.
pub(crate) fn farthest_pair(points: &[Point], dim: usize) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let dirs = direction_set(dim);
    let mut keep = std::collections::BTreeSet::new();
    for u in &dirs {
        let mut best = (f64::NEG_INFINITY, 0usize);
        let mut worst = (f64::INFINITY, 0usize);
        for (i, p) in points.iter().enumerate() {
            let v: f64 = p.iter().zip(u).map(|(a, b)| a * b).sum();
            if v > best.0 {
                best = (v, i);
            }
            if v < worst.0 {
                worst = (v, i);
            }
        }
        keep.insert(best.1);
        keep.insert(worst.1);
    }
    let cands: Vec<&Point> = keep.iter().map(|&i| &points[i]).collect();
    let mut d: f64 = 0.0;
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            d = d.max(euclidean(cands[i], cands[j]));
        }
    }
    d
}

fn direction_set(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0]],
        2 => (0..360)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / 360.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci half-sphere
            let n = 1000;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|k| {
                    let z = 1.0 - (k as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(SYSTEM_SEED ^ dim as u64);
            (0..4000)
                .map(|_| {
                    let v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
                    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / n).collect()
                })
                .collect()
        }
    }
}

/// Deterministic probe set covering the bounding ball: an axis grid restricted
/// to the ball plus boundary points along axes and diagonals.
pub(crate) fn ball_probe_points(ball: &BoundingBall) -> Vec<Point> {
    let d = ball.center.len();
    let per_axis: usize = match d {
        1 => 201,
        2 => 41,
        3 => 15,
        _ => 5,
    };
    let mut out = Vec::new();
    let total = per_axis.pow(d as u32);
    for idx in 0..total {
        let mut rem = idx;
        let mut p = Vec::with_capacity(d);
        for axis in 0..d {
            let t = (rem % per_axis) as f64 / (per_axis - 1) as f64;
            rem /= per_axis;
            p.push(ball.center[axis] + ball.radius * (2.0 * t - 1.0));
        }
        if euclidean(&p, &ball.center) <= ball.radius {
            out.push(p);
        }
    }
    for axis in 0..d {
        for sign in [-1.0, 1.0] {
            let mut p = ball.center.clone();
            p[axis] += sign * ball.radius;
            out.push(p);
        }
    }
    let diag = ball.radius / (d as f64).sqrt();
    for mask in 0..(1usize << d.min(10)) {
        let p: Point = (0..d)
            .map(|a| ball.center[a] + if mask >> a & 1 == 1 { diag } else { -diag })
            .collect();
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::map::{ExprMap, Similarity};

    fn line(maps: &[(f64, f64)]) -> Result<IfsSystem> {
        IfsSystem::new(
            maps.iter()
                .map(|&(r, t)| Similarity::line(r, t).unwrap().into())
                .collect(),
            BoundingBall {
                center: vec![0.5],
                radius: 0.5,
            },
        )
    }

    #[test]
    fn cantor_diameter_is_exact() {
        let s = line(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)]).unwrap();
        assert_eq!(s.diameter().method, DiameterMethod::ExactFixedPoint);
        assert!((s.attractor_diameter() - 1.0).abs() < 1e-12);
        let (a, b) = s.hull_interval().unwrap();
        assert!(a.abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shared_fixed_point_is_degenerate() {
        assert_eq!(
            line(&[(0.5, 0.0), (0.5, 0.0)]).unwrap_err(),
            Error::DegenerateAttractor
        );
    }

    #[test]
    fn rejects_escaping_maps_and_small_systems() {
        assert!(matches!(
            line(&[(0.5, 0.0), (0.5, 0.8)]),
            Err(Error::EscapesBoundingBall { index: 2 })
        ));
        assert!(matches!(line(&[(0.5, 0.0)]), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn generic_map_contraction_check() {
        let ball = BoundingBall {
            center: vec![0.5],
            radius: 0.5,
        };
        let expanding = ExprMap::parse(1, "x1*x1", "2*x1").unwrap();
        let ok = ExprMap::parse(1, "x1/3", "1/3").unwrap();
        let err = IfsSystem::new(
            vec![ContractionMap::generic(ok.clone()), ContractionMap::generic(expanding)],
            ball.clone(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotContraction { index: 2, .. }));
        let other = ExprMap::parse(1, "x1/3 + 2/3", "1/3").unwrap();
        let s = IfsSystem::new(
            vec![ContractionMap::generic(ok), ContractionMap::generic(other)],
            ball,
        )
        .unwrap();
        assert_eq!(s.diameter().method, DiameterMethod::Sampled);
        // farthest pair of a sample never exceeds the true diameter
        assert!(s.attractor_diameter() <= 1.0 + 1e-12);
        assert!(s.attractor_diameter() > 0.999);
    }

    #[test]
    fn sierpinski_sampled_diameter() {
        let h = 3f64.sqrt() / 2.0;
        let maps = [[0.0, 0.0], [0.5, 0.0], [0.25, h / 2.0]]
            .iter()
            .map(|t| Similarity::homothety(0.5, t.to_vec()).unwrap().into())
            .collect();
        let s = IfsSystem::new(
            maps,
            BoundingBall {
                center: vec![0.5, h / 3.0],
                radius: 0.6,
            },
        )
        .unwrap();
        assert!((s.attractor_diameter() - 1.0).abs() < 0.01);
    }

    #[test]
    fn iterate_keeps_attractor_and_composes() {
        let s = crate::gallery::cantor();
        let s2 = s.iterate(2).unwrap();
        assert_eq!(s2.len(), 4);
        assert_eq!(s2.attractor_diameter(), s.attractor_diameter());
        let f = s2.map(2).as_similarity().unwrap();
        assert!((f.ratio - 1.0 / 9.0).abs() < 1e-16);
        assert!((f.translation[0] - 2.0 / 9.0).abs() < 1e-16);

        let g = IfsSystem::new(
            vec![
                ContractionMap::generic(ExprMap::parse(1, "x1/3", "1/3").unwrap()),
                ContractionMap::generic(ExprMap::parse(1, "x1/3 + 2/3", "1/3").unwrap()),
            ],
            BoundingBall { center: vec![0.5], radius: 0.5 },
        )
        .unwrap();
        let g3 = g.iterate(3).unwrap();
        let mut jac = [0.0];
        g3.map(8).jacobian_into(&[0.4], &mut jac);
        assert!((jac[0] - 1.0 / 27.0).abs() < 1e-15);
        assert!((g3.map(8).apply(&[0.0])[0] - 26.0 / 27.0).abs() < 1e-15);
    }
}
