//! Numerical dimension theory for C¹ weakly conformal iterated function systems
//! with overlaps.
//!
//! The crate is organized by subsystem:
//!
//! - [`ifs`]: maps, words, cylinder geometry, chaos-game sampling, |K|.
//! - [`thermo`]: pressure, conformality dimension, Gibbs weights, Lyapunov
//!   exponents and the weak-conformality diagnostic.
//! - [`cutset`]: diameter cut-sets, the overlap statistic `t_k`, exact overlaps.
//! - [`targets`]: shrinking-target ball families, coverage, box counting of the
//!   limsup proxy, the series bound and the critical exponent `s_g`.
//! - [`content`]: Hausdorff and μ-essential content estimators.
//!
//! Lengths use the Euclidean norm, except where balls are compared against an
//! axis-aligned grid (box counting, target balls, content covers), which use
//! the sup norm. The two agree on the line.

// Negated comparisons deliberately send NaN down the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod content;
pub mod cutset;
mod error;
pub mod expr;
pub mod gallery;
pub mod ifs;
pub mod linalg;
pub mod numeric;
pub mod targets;
pub mod thermo;

pub use error::{Error, Result};
pub use ifs::{
    attractor_sample, compose_word, cylinder_geometry, ContractionMap, CylinderGeometry,
    IfsSpec, IfsSystem, PointCloud, ProbabilityVector, Similarity, Word,
};

/// Default cap on the number of words any enumeration may visit.
pub const DEFAULT_WORD_BUDGET: u64 = 10_000_000;
