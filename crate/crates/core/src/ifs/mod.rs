//! Maps, words, cylinder geometry, attractor sampling and diameter estimation.

mod geometry;
mod map;
mod sample;
mod schema;
mod system;
mod weights;
mod word;

pub use geometry::{compose_word, cylinder_geometry, CylinderGeometry, WordMap};
pub(crate) use geometry::{apply_word, chain_jacobian, similarity_of};
pub use map::{C1Map, ContractionMap, ExprMap, FnMap, Similarity, ISOMETRY_TOL};
pub use sample::{attractor_sample, PointCloud, BURN_IN};
pub use schema::{BallSpec, IfsSpec, MapSpec};
pub use system::{
    AttractorDiameter, BoundingBall, ContractionBounds, DiameterMethod, IfsSystem, ANCHOR_STEPS,
    DIAMETER_SAMPLE,
};
pub use weights::{ProbabilityVector, WEIGHT_SUM_TOL};
pub use word::Word;

/// `compose_word` as a method.
impl IfsSystem {
    pub fn compose(&self, w: &Word) -> crate::Result<WordMap<'_>> {
        compose_word(self, w)
    }
}
