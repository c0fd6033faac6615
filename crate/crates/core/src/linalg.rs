//! Row-major dense helpers for the tiny matrices (d ≤ 3 in practice) used by
//! map composition. Anything beyond 2×2 singular values goes through nalgebra.

use nalgebra::DMatrix;

pub type Point = Vec<f64>;

pub fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

/// `out = a * b` for d×d row-major matrices.
pub fn mat_mul(a: &[f64], b: &[f64], d: usize, out: &mut [f64]) {
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                acc += a[i * d + k] * b[k * d + j];
            }
            out[i * d + j] = acc;
        }
    }
}

pub fn mat_mul_new(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    mat_mul(a, b, d, &mut out);
    out
}

/// `out = m * v`.
pub fn mat_vec(m: &[f64], v: &[f64], d: usize, out: &mut [f64]) {
    for i in 0..d {
        let mut acc = 0.0;
        for k in 0..d {
            acc += m[i * d + k] * v[k];
        }
        out[i] = acc;
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Smallest and largest singular values of a d×d row-major matrix.
pub fn singular_extremes(m: &[f64], d: usize) -> (f64, f64) {
    match d {
        1 => {
            let a = m[0].abs();
            (a, a)
        }
        2 => {
            // closed form from the invariants of MᵀM
            let (a, b, c, e) = (m[0], m[1], m[2], m[3]);
            let frob = a * a + b * b + c * c + e * e;
            let det = (a * e - b * c).abs();
            let disc = (frob * frob - 4.0 * det * det).max(0.0).sqrt();
            let smax = ((frob + disc) / 2.0).sqrt();
            let smin = if smax > 0.0 { det / smax } else { 0.0 };
            (smin, smax)
        }
        _ => {
            let mat = DMatrix::from_row_slice(d, d, m);
            let sv = mat.singular_values();
            let smax = sv.iter().cloned().fold(0.0, f64::max);
            let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
            (smin, smax)
        }
    }
}

/// Euclidean operator norm.
pub fn operator_norm(m: &[f64], d: usize) -> f64 {
    singular_extremes(m, d).1
}

/// Max absolute deviation of `MᵀM` from the identity.
pub fn orthonormality_defect(m: &[f64], d: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let dot: f64 = (0..d).map(|k| m[k * d + i] * m[k * d + j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_by_two_singular_values_match_nalgebra() {
        let samples = [
            [0.5, 0.0, 0.0, 0.25],
            [0.3, -0.2, 0.1, 0.4],
            [0.0, 1.0, -1.0, 0.0],
            [0.7, 0.7, 0.7, 0.7],
        ];
        for m in samples {
            let (lo, hi) = singular_extremes(&m, 2);
            let sv = DMatrix::from_row_slice(2, 2, &m).singular_values();
            let (elo, ehi) = (sv.min(), sv.max());
            assert_abs_diff_eq!(lo, elo, epsilon = 1e-12);
            assert_abs_diff_eq!(hi, ehi, epsilon = 1e-12);
        }
    }

    #[test]
    fn rotation_is_orthonormal() {
        let t: f64 = 0.3;
        let r = [t.cos(), -t.sin(), t.sin(), t.cos()];
        assert!(orthonormality_defect(&r, 2) < 1e-15);
        let (lo, hi) = singular_extremes(&r, 2);
        assert_abs_diff_eq!(lo, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
    }
}
