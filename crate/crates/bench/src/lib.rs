//! Shared inputs for the kernel benchmarks in `benches/`.

use fractalab_core::gallery;
use fractalab_core::ifs::{attractor_sample, IfsSystem, PointCloud, ProbabilityVector};

/// Seed used by every sampled fixture.
pub const SEED: u64 = 7;

/// The systems every kernel is timed on, by gallery name.
pub fn systems() -> Vec<(&'static str, IfsSystem)> {
    vec![
        ("cantor", gallery::cantor()),
        ("sierpinski", gallery::sierpinski()),
        ("nonlinear-cantor", gallery::nonlinear_cantor()),
    ]
}

/// `n` chaos-game points under uniform weights.
pub fn uniform_cloud(system: &IfsSystem, n: usize) -> PointCloud {
    let weights = ProbabilityVector::uniform(system.len());
    attractor_sample(system, &weights, n, SEED).expect("gallery systems sample")
}
