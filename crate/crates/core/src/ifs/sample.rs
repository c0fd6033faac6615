use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::system::IfsSystem;
use super::weights::ProbabilityVector;
use crate::error::{Error, Result};

/// Iterations discarded at the start of every chaos-game stream.
pub const BURN_IN: usize = 64;

/// Flat storage for `n` points of dimension `dim`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn from_points<'a>(dim: usize, points: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let mut c = Self::new(dim);
        for p in points {
            c.push(p);
        }
        c
    }

    pub fn push(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim.max(1))
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub(crate) fn chaos_uniform(system: &IfsSystem, n: usize, rng: &mut ChaCha8Rng) -> Self {
        let m = system.len();
        run_chaos(system, n, rng, |rng| rng.gen_range(0..m))
    }
}

fn run_chaos(
    system: &IfsSystem,
    n: usize,
    rng: &mut ChaCha8Rng,
    mut pick: impl FnMut(&mut ChaCha8Rng) -> usize,
) -> PointCloud {
    let d = system.dim();
    let mut cloud = PointCloud {
        dim: d,
        coords: Vec::with_capacity(n * d),
    };
    let mut p = system.ball().center.clone();
    let mut next = vec![0.0; d];
    for step in 0..BURN_IN + n {
        let i = pick(rng);
        system.maps()[i].apply_into(&p, &mut next);
        std::mem::swap(&mut p, &mut next);
        if step >= BURN_IN {
            cloud.coords.extend_from_slice(&p);
        }
    }
    cloud
}

/// Chaos-game sample of the invariant measure `μ = Σ p_i μ∘f_i⁻¹`.
///
/// One stream seeded from `seed`; the first [`BURN_IN`] iterates are dropped.
pub fn attractor_sample(
    system: &IfsSystem,
    weights: &ProbabilityVector,
    n: usize,
    seed: u64,
) -> Result<PointCloud> {
    weights.check_len(system.len())?;
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let cumulative = weights.cumulative();
    let last = cumulative.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(run_chaos(system, n, &mut rng, |rng| {
        let u: f64 = rng.gen();
        cumulative.iter().position(|&c| u < c).unwrap_or(last)
    }))
}
