//! Small numerical kernels shared by the estimators.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::DEFAULT_WORD_BUDGET;

/// Environment variable overriding the word-enumeration cap.
pub const BUDGET_ENV: &str = "FRACTALAB_BUDGET";

/// The enumeration cap: `FRACTALAB_BUDGET` if set and valid, the default otherwise.
pub fn word_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&b| b > 0)
        .unwrap_or(DEFAULT_WORD_BUDGET)
}

/// `Σ_{k=1}^{depth} m^k`, saturating.
pub fn tree_size(m: usize, depth: usize) -> u64 {
    let mut total: u64 = 0;
    let mut level: u64 = 1;
    for _ in 0..depth {
        level = level.saturating_mul(m as u64);
        total = total.saturating_add(level);
    }
    total
}

/// `m^k`, saturating.
pub fn level_size(m: usize, k: usize) -> u64 {
    (m as u64).saturating_pow(k.min(u32::MAX as usize) as u32)
}

/// Streaming `log Σ exp(x_i)` with Neumaier-compensated partial sums, so the
/// result does not depend on summation order beyond ~1e-15 relative.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
    comp: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            sum: 0.0,
            comp: 0.0,
        }
    }

    pub fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            let scale = (self.max - x).exp();
            self.sum *= scale;
            self.comp *= scale;
            self.max = x;
        }
        self.add((x - self.max).exp());
    }

    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if other.max > self.max {
            let scale = (self.max - other.max).exp();
            self.sum *= scale;
            self.comp *= scale;
            self.max = other.max;
        }
        let scale = (other.max - self.max).exp();
        self.add(other.sum * scale);
        self.comp += other.comp * scale;
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.max + (self.sum + self.comp).ln()
    }
}

pub fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = LogSumExp::new();
    for v in values {
        acc.push(v);
    }
    acc.value()
}

/// Neumaier summation.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Root of a function that is positive at `lo` and non-positive at `hi`,
/// bisected until the interval stops shrinking or is narrower than `tol`.
pub fn bisect_decreasing(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ordinary least squares line with a 95% Student-t half-width on the slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub half_width: f64,
    pub residual_sd: f64,
    pub n: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InvalidParameter("x and y lengths differ".into()));
    }
    if n < 3 {
        return Err(Error::InsufficientScales { usable: n });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientScales { usable: 1 });
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let dof = nf - 2.0;
    let residual_sd = (sse / dof).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975);
    Ok(LinearFit {
        slope,
        intercept,
        half_width: t * residual_sd / sxx.sqrt(),
        residual_sd,
        n,
    })
}
