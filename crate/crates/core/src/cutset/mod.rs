//! Diameter cut-sets, the overlap count `t_k` and exact-overlap detection.

mod awsc;
mod dfs;
mod identity;
mod overlap;

pub use awsc::{awsc_csv, awsc_statistic, AwscReport, CenterPlan};
pub use dfs::{
    cut_set, cut_set_size, cut_set_with_budget, is_exhaustive, is_prefix_free, product_mass,
    visit_cut_set, CutCell, CutSet, CUT_TOL,
};
pub use identity::{PROBE_MATCH_TOL, SIMILARITY_MATCH_TOL};
pub use overlap::{exact_overlap_scan, OverlapPair};
