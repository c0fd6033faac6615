//! Shrinking-target ball families, coverage, box counting of the limsup
//! proxy, the critical series exponent and the gauge exponent `s_g`.

mod baker;
mod balls;
mod boxcount;
mod coverage;
mod series;

pub use baker::{
    baker_sg, compbaker_experiment, condition_flags, BakerConfig, CompBakerReport, ConditionFlags,
    GaugeSpec, GAUGE_PROBE_HORIZON,
};
pub use balls::{dyadic_ladder, target_balls, target_balls_with_rule, Generation, RadiusRule, TargetExperiment};
pub use boxcount::{limsup_box_dimension, window_ratio, BoxCount, EpsLadder, LimsupEstimate, Stabilization};
pub use coverage::{coverage_check, covered_fraction, CoverageRow};
pub use series::{series_upper_bound, SeriesBound};
