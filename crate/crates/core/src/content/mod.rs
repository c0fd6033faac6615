//! Upper estimates of Hausdorff content from explicit covers.

mod calculus;
mod dyadic;
mod essential;

pub use calculus::{
    check_monotone, check_power_mean, content_calculus_check, CalculusCheck, CalculusLedger, DELTA_GRID,
    S_GRID_POINTS,
};
pub use dyadic::{
    cylinder_cover_content, hausdorff_content_upper, hausdorff_content_upper_shifted, ContentEstimate,
    ContentInput, ContentMethod, Cover, CoverBox,
};
pub use essential::{
    essential_content_estimate, essential_content_from_sample, essential_csv, EssentialContentEstimate, Region,
    MAX_ETA,
};
