use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse_matrix, parse_vector, Expr};
use crate::linalg::{identity, mat_mul_new, mat_vec, orthonormality_defect, Point};

/// Tolerance on `OᵀO = I` for similarity isometries.
pub const ISOMETRY_TOL: f64 = 1e-12;

/// `x ↦ ratio · isometry · x + translation`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Similarity {
    pub ratio: f64,
    /// Row-major d×d orthogonal matrix.
    pub isometry: Vec<f64>,
    pub translation: Vec<f64>,
}

impl Similarity {
    pub fn new(ratio: f64, isometry: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        let d = translation.len();
        if d == 0 {
            return Err(Error::InvalidSystem("similarity with empty translation".into()));
        }
        if isometry.len() != d * d {
            return Err(Error::InvalidSystem(format!(
                "isometry has {} entries, expected {}",
                isometry.len(),
                d * d
            )));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::NotContraction {
                index: 0,
                norm: ratio,
            });
        }
        let defect = orthonormality_defect(&isometry, d);
        if !(defect <= ISOMETRY_TOL) {
            return Err(Error::InvalidSystem(format!(
                "isometry columns not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            ratio,
            isometry,
            translation,
        })
    }

    /// 1-D map `x ↦ ratio·x + shift`.
    pub fn line(ratio: f64, shift: f64) -> Result<Self> {
        Self::new(ratio, vec![1.0], vec![shift])
    }

    /// Homothety `x ↦ ratio·x + translation` in any dimension.
    pub fn homothety(ratio: f64, translation: Vec<f64>) -> Result<Self> {
        let d = translation.len();
        Self::new(ratio, identity(d), translation)
    }

    /// Planar rotation-scaling by `angle` radians.
    pub fn rotation_scaling(ratio: f64, angle: f64, translation: [f64; 2]) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        Self::new(ratio, vec![c, -s, s, c], translation.to_vec())
    }

    pub fn identity(d: usize) -> Self {
        Self {
            ratio: 1.0,
            isometry: identity(d),
            translation: vec![0.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply_into(&self, p: &[f64], out: &mut [f64]) {
        let d = self.dim();
        mat_vec(&self.isometry, p, d, out);
        for (o, t) in out.iter_mut().zip(&self.translation) {
            *o = self.ratio * *o + t;
        }
    }

    pub fn apply(&self, p: &[f64]) -> Point {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(p, &mut out);
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        let d = self.dim();
        let isometry = mat_mul_new(&self.isometry, &inner.isometry, d);
        let translation = self.apply(&inner.translation);
        Similarity {
            ratio: self.ratio * inner.ratio,
            isometry,
            translation,
        }
    }

    /// Linear part `ratio · isometry`.
    pub fn linear(&self) -> Vec<f64> {
        self.isometry.iter().map(|v| v * self.ratio).collect()
    }

    /// Parameter-wise equality up to `tol` (relative for the ratio).
    pub fn approx_eq(&self, other: &Similarity, tol: f64) -> bool {
        (self.ratio - other.ratio).abs() <= tol * self.ratio.max(other.ratio)
            && self
                .isometry
                .iter()
                .zip(&other.isometry)
                .all(|(a, b)| (a - b).abs() <= tol)
            && self
                .translation
                .iter()
                .zip(&other.translation)
                .all(|(a, b)| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0))
    }

    /// Unique fixed point, found by iterating the contraction.
    pub fn fixed_point(&self) -> Point {
        let mut p = vec![0.0; self.dim()];
        let mut next = p.clone();
        for _ in 0..4096 {
            self.apply_into(&p, &mut next);
            let moved = p
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            std::mem::swap(&mut p, &mut next);
            if moved == 0.0 {
                break;
            }
        }
        p
    }
}

/// A C¹ map given by an evaluator and its Jacobian (row-major).
pub trait C1Map: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn eval(&self, p: &[f64], out: &mut [f64]);
    fn jacobian(&self, p: &[f64], out: &mut [f64]);
}

/// Map parsed from the expression language.
#[derive(Debug, Clone)]
pub struct ExprMap {
    dim: usize,
    components: Vec<Expr>,
    jacobian: Vec<Expr>,
    pub map_source: String,
    pub jacobian_source: String,
}

impl ExprMap {
    pub fn parse(dim: usize, map: &str, jacobian: &str) -> Result<Self> {
        let components = parse_vector(map)?;
        if components.len() != dim {
            return Err(Error::InvalidSystem(format!(
                "map has {} components, ambient dimension is {dim}",
                components.len()
            )));
        }
        let jac = parse_matrix(jacobian, dim)?;
        let arity = components
            .iter()
            .chain(&jac)
            .map(Expr::arity)
            .max()
            .unwrap_or(0);
        if arity > dim {
            return Err(Error::InvalidSystem(format!(
                "expression references x{arity} but dimension is {dim}"
            )));
        }
        Ok(Self {
            dim,
            components,
            jacobian: jac,
            map_source: map.to_string(),
            jacobian_source: jacobian.to_string(),
        })
    }
}

impl C1Map for ExprMap {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, p: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval(p);
        }
    }

    fn jacobian(&self, p: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.jacobian) {
            *o = c.eval(p);
        }
    }
}

type PointFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// Closure-backed C¹ map, for programmatic construction.
pub struct FnMap {
    dim: usize,
    map: Box<PointFn>,
    jacobian: Box<PointFn>,
}

impl FnMap {
    pub fn new(
        dim: usize,
        map: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        jacobian: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            map: Box::new(map),
            jacobian: Box::new(jacobian),
        }
    }
}

impl fmt::Debug for FnMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnMap").field("dim", &self.dim).finish()
    }
}

impl C1Map for FnMap {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, p: &[f64], out: &mut [f64]) {
        (self.map)(p, out)
    }
    fn jacobian(&self, p: &[f64], out: &mut [f64]) {
        (self.jacobian)(p, out)
    }
}

/// One map `f_i` of an IFS.
#[derive(Debug, Clone)]
pub enum ContractionMap {
    Similarity(Similarity),
    GenericC1(Arc<dyn C1Map>),
}

impl ContractionMap {
    pub fn generic(map: impl C1Map + 'static) -> Self {
        ContractionMap::GenericC1(Arc::new(map))
    }

    pub fn dim(&self) -> usize {
        match self {
            ContractionMap::Similarity(s) => s.dim(),
            ContractionMap::GenericC1(g) => g.dim(),
        }
    }

    pub fn as_similarity(&self) -> Option<&Similarity> {
        match self {
            ContractionMap::Similarity(s) => Some(s),
            ContractionMap::GenericC1(_) => None,
        }
    }

    pub fn apply_into(&self, p: &[f64], out: &mut [f64]) {
        match self {
            ContractionMap::Similarity(s) => s.apply_into(p, out),
            ContractionMap::GenericC1(g) => g.eval(p, out),
        }
    }

    pub fn apply(&self, p: &[f64]) -> Point {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(p, &mut out);
        out
    }

    pub fn jacobian_into(&self, p: &[f64], out: &mut [f64]) {
        match self {
            ContractionMap::Similarity(s) => {
                for (o, v) in out.iter_mut().zip(&s.isometry) {
                    *o = v * s.ratio;
                }
            }
            ContractionMap::GenericC1(g) => g.jacobian(p, out),
        }
    }
}

impl From<Similarity> for ContractionMap {
    fn from(s: Similarity) -> Self {
        ContractionMap::Similarity(s)
    }
}
