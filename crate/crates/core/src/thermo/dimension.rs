use serde::Serialize;

use super::ladder::{affordable_depth, LogDiameters};
use super::pressure::{bracket, defects, similarity_pressure};
use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::numeric::{bisect_decreasing, word_budget};

/// Default maximal enclosure width accepted as a certificate for C¹ systems.
pub const DEFAULT_CERTIFY_WIDTH: f64 = 0.05;
/// Depth ladder tried for C¹ systems before giving up.
const DEPTH_START: usize = 6;
const DEPTH_STEP: usize = 2;
const DEPTH_MAX: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionMethod {
    /// Bisection on `Σ c_i^s = 1`.
    Moran,
    /// Bisection on the enumerated pressure bracket.
    PressureBracket,
}

/// Root of the pressure with an enclosure `[root of lower bound, root of upper bound]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub value: f64,
    pub enclosure: [f64; 2],
    pub certified: bool,
    pub method: DimensionMethod,
    /// Depth of the deepest ladder used (0 for the closed form).
    pub depth: usize,
    /// Point estimate at each depth tried.
    pub ladder: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionOptions {
    pub tol: f64,
    pub certify_width: f64,
    pub budget: u64,
}

impl DimensionOptions {
    pub fn new(tol: f64) -> Self {
        DimensionOptions {
            tol,
            certify_width: DEFAULT_CERTIFY_WIDTH,
            budget: word_budget(),
        }
    }
}

/// `dim(S)`: the zero of `s ↦ P(s)`.
pub fn conformality_dimension(system: &IfsSystem, tol: f64) -> Result<DimensionEstimate> {
    conformality_dimension_with(system, DimensionOptions::new(tol))
}

pub fn conformality_dimension_with(system: &IfsSystem, opts: DimensionOptions) -> Result<DimensionEstimate> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {} must be > 0", opts.tol)));
    }
    if let Some(ratios) = system.ratios() {
        let s = similarity_dimension(&ratios);
        return Ok(DimensionEstimate {
            value: s,
            enclosure: [s, s],
            certified: true,
            method: DimensionMethod::Moran,
            depth: 0,
            ladder: vec![s],
        });
    }

    let max_depth = affordable_depth(system.len(), opts.budget).min(DEPTH_MAX);
    if max_depth < 2 {
        return Err(Error::BudgetExceeded {
            budget: opts.budget,
            requested: crate::numeric::tree_size(system.len(), 2),
            depth_reached: max_depth,
            partial: Vec::new(),
        });
    }
    let mut points = Vec::new();
    let mut depth = DEPTH_START.min(max_depth);
    let (value, enclosure) = loop {
        let ladder = LogDiameters::enumerate(system, depth, opts.budget)?;
        let (value, enclosure) = solve_at_depth(&ladder, opts.tol);
        points.push(value);
        if enclosure[1] - enclosure[0] <= opts.certify_width || depth >= max_depth {
            break (value, enclosure);
        }
        depth = (depth + DEPTH_STEP).min(max_depth);
    };
    let certified = enclosure[1] - enclosure[0] <= opts.certify_width;
    if !certified {
        return Err(Error::Inconclusive {
            reason: format!(
                "pressure enclosure [{:.6}, {:.6}] wider than {} at depth {depth}",
                enclosure[0], enclosure[1], opts.certify_width
            ),
            ladder: points,
        });
    }
    Ok(DimensionEstimate {
        value,
        enclosure,
        certified,
        method: DimensionMethod::PressureBracket,
        depth,
        ladder: points,
    })
}

/// Solution of `Σ c_i^s = 1`: `log m / log(1/c)` for equal ratios, otherwise
/// bisected to machine precision.
pub fn similarity_dimension(ratios: &[f64]) -> f64 {
    if let Some(&c) = ratios.first() {
        if ratios.iter().all(|&r| r == c) {
            return (ratios.len() as f64).ln() / -c.ln();
        }
    }
    let f = |s: f64| similarity_pressure(ratios, s);
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    bisect_decreasing(f, 0.0, hi, 0.0)
}

/// Returns `(point estimate, [lo, hi])` from the full ladder.
fn solve_at_depth(ladder: &LogDiameters, tol: f64) -> (f64, [f64; 2]) {
    let bounds = |s: f64| {
        let gk = ladder.gk(s);
        let (sub, sup) = defects(&gk);
        bracket(&gk, sub, sup)
    };
    let mut top = 1.0;
    while bounds(top).0 > 0.0 && top < 1e6 {
        top *= 2.0;
    }
    let lower = bisect_decreasing(|s| bounds(s).0, 0.0, top, tol * 0.5);
    let upper = bisect_decreasing(|s| bounds(s).1, 0.0, top, tol * 0.5);
    let mid = bisect_decreasing(
        |s| {
            let (lo, hi) = bounds(s);
            0.5 * (lo + hi)
        },
        0.0,
        top,
        tol * 0.5,
    );
    let (a, b) = (lower.min(upper), lower.max(upper));
    (mid.clamp(a, b), [a, b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::ifs::{BoundingBall, ContractionMap, ExprMap};
    use proptest::prelude::*;

    #[test]
    fn cantor() {
        let d = conformality_dimension(&gallery::cantor(), 1e-12).unwrap();
        assert!((d.value - 0.6309297535714574).abs() < 1e-15);
        assert!(d.certified);
    }

    #[test]
    fn unit_dimension_examples() {
        for sys in [gallery::dyadic_twin(), gallery::half_quarter_quarter(), gallery::overlapping_triple()] {
            let d = conformality_dimension(&sys, 1e-12).unwrap();
            assert!((d.value - 1.0).abs() < 1e-14, "{}", d.value);
        }
        let d = similarity_dimension(&[0.25; 4]);
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generic_system_gets_certified_enclosure() {
        let sys = gallery::nonlinear_cantor();
        let d = conformality_dimension(&sys, 1e-8).unwrap();
        assert!(d.certified);
        assert!(d.enclosure[0] <= d.value && d.value <= d.enclosure[1]);
        assert!(d.value > 0.5 && d.value < 0.8);
    }

    #[test]
    fn generic_affine_cantor_is_exact() {
        let sys = IfsSystem::new(
            vec![
                ContractionMap::generic(ExprMap::parse(1, "x1/3", "1/3").unwrap()),
                ContractionMap::generic(ExprMap::parse(1, "x1/3 + 2/3", "1/3").unwrap()),
            ],
            BoundingBall {
                center: vec![0.5],
                radius: 0.5,
            },
        )
        .unwrap();
        let d = conformality_dimension(&sys, 1e-12).unwrap();
        assert!((d.value - 2f64.ln() / 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn tiny_budget_is_reported() {
        let sys = gallery::nonlinear_cantor();
        let opts = DimensionOptions {
            budget: 3,
            ..DimensionOptions::new(1e-6)
        };
        assert!(matches!(
            conformality_dimension_with(&sys, opts),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn bad_tolerance() {
        assert!(conformality_dimension(&gallery::cantor(), 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn moran_root_solves_equation(ratios in prop::collection::vec(0.05f64..0.6, 2..6)) {
            let s = similarity_dimension(&ratios);
            let sum: f64 = ratios.iter().map(|c| c.powf(s)).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        #[test]
        fn generic_dimension_is_scale_invariant(scale in 0.5f64..4.0) {
            let sys = gallery::nonlinear_cantor();
            let scaled = sys.clone().with_attractor_diameter(sys.attractor_diameter() * scale).unwrap();
            let opts = DimensionOptions { budget: 1 << 14, ..DimensionOptions::new(1e-9) };
            let a = conformality_dimension_with(&sys, opts).unwrap();
            let b = conformality_dimension_with(&scaled, opts).unwrap();
            prop_assert!((a.value - b.value).abs() < 1e-8);
        }
    }
}
