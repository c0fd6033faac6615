use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{apply_word, chain_jacobian, CylinderGeometry, IfsSystem, ProbabilityVector, Similarity, Word};
use crate::linalg::{operator_norm, Point};
use crate::numeric::{compensated_sum, word_budget};

/// Relative slack on `diameter ≤ r`, so that exact ties such as `3⁻³ ≤ 3⁻³`
/// survive rounding in the ratio products.
pub const CUT_TOL: f64 = 1e-12;

/// One word of a cut-set, as seen by a visitor.
#[derive(Debug)]
pub struct CutCell<'a> {
    pub letters: &'a [u32],
    pub diameter: f64,
    /// Closed-form `f_w` when every letter is a similarity.
    pub similarity: Option<&'a Similarity>,
}

impl CutCell<'_> {
    pub fn word(&self) -> Word {
        Word::new(self.letters.to_vec()).expect("letters are 1-based")
    }

    /// `f_w(p)`.
    pub fn image(&self, system: &IfsSystem, p: &[f64]) -> Point {
        match self.similarity {
            Some(s) => s.apply(p),
            None => apply_word(system, self.letters, p),
        }
    }
}

/// Minimal words whose cylinder diameter is at most `threshold`, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutSet {
    pub threshold: f64,
    pub words: Vec<Word>,
    pub geometries: Vec<CylinderGeometry>,
}

impl CutSet {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn min_len(&self) -> usize {
        self.words.iter().map(Word::len).min().unwrap_or(0)
    }
}

pub fn cut_set(system: &IfsSystem, r: f64) -> Result<CutSet> {
    cut_set_with_budget(system, r, word_budget())
}

pub fn cut_set_with_budget(system: &IfsSystem, r: f64, budget: u64) -> Result<CutSet> {
    let mut words = Vec::new();
    let mut geometries = Vec::new();
    let anchor = system.anchor().to_vec();
    visit_cut_set(system, r, budget, |cell| {
        let word = cell.word();
        geometries.push(CylinderGeometry {
            word: word.clone(),
            diameter: cell.diameter,
            anchor_image: cell.image(system, &anchor),
            derivative_norm: cell.diameter / system.attractor_diameter(),
        });
        words.push(word);
    })?;
    Ok(CutSet {
        threshold: r,
        words,
        geometries,
    })
}

/// Number of words in the cut-set at `r`, without storing them.
pub fn cut_set_size(system: &IfsSystem, r: f64, budget: u64) -> Result<u64> {
    let mut n = 0u64;
    visit_cut_set(system, r, budget, |_| n += 1)?;
    Ok(n)
}

/// Depth-first traversal calling `visit` on every cut-set word in
/// lexicographic order. `budget` caps the number of tree nodes visited.
pub fn visit_cut_set<F: FnMut(&CutCell)>(system: &IfsSystem, r: f64, budget: u64, mut visit: F) -> Result<()> {
    let k = system.attractor_diameter();
    if !(r > 0.0 && r < k) {
        return Err(Error::InvalidParameter(format!(
            "cut radius {r} must lie in (0, |K| = {k})"
        )));
    }
    let mut walk = Walk {
        system,
        limit: r * (1.0 + CUT_TOL),
        budget,
        visited: 0,
        deepest: 0,
        letters: Vec::new(),
    };
    if system.is_similarity() {
        walk.similarity(&Similarity::identity(system.dim()), k, &mut visit)
    } else {
        walk.generic(&mut visit)
    }
}

struct Walk<'a> {
    system: &'a IfsSystem,
    limit: f64,
    budget: u64,
    visited: u64,
    deepest: usize,
    letters: Vec<u32>,
}

impl Walk<'_> {
    fn count(&mut self) -> Result<()> {
        self.visited += 1;
        self.deepest = self.deepest.max(self.letters.len());
        if self.visited > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
                requested: self.visited,
                depth_reached: self.deepest,
                partial: Vec::new(),
            });
        }
        Ok(())
    }

    fn similarity<F: FnMut(&CutCell)>(&mut self, prefix: &Similarity, diam_k: f64, visit: &mut F) -> Result<()> {
        for letter in 1..=self.system.len() as u32 {
            let map = self.system.map(letter).as_similarity().expect("similarity system");
            let child = prefix.compose(map);
            self.letters.push(letter);
            self.count()?;
            let diameter = child.ratio * diam_k;
            if diameter <= self.limit {
                visit(&CutCell {
                    letters: &self.letters,
                    diameter,
                    similarity: Some(&child),
                });
            } else {
                self.similarity(&child, diam_k, visit)?;
            }
            self.letters.pop();
        }
        Ok(())
    }

    fn generic<F: FnMut(&CutCell)>(&mut self, visit: &mut F) -> Result<()> {
        let d = self.system.dim();
        let k = self.system.attractor_diameter();
        for letter in 1..=self.system.len() as u32 {
            self.letters.push(letter);
            self.count()?;
            let (_, jac) = chain_jacobian(self.system, &self.letters, self.system.anchor());
            let diameter = operator_norm(&jac, d) * k;
            if diameter <= self.limit {
                visit(&CutCell {
                    letters: &self.letters,
                    diameter,
                    similarity: None,
                });
            } else {
                self.generic(visit)?;
            }
            self.letters.pop();
        }
        Ok(())
    }
}

/// No word is a proper prefix of another (or repeated).
pub fn is_prefix_free(words: &[Word]) -> bool {
    let mut sorted: Vec<&Word> = words.iter().collect();
    sorted.sort();
    sorted.windows(2).all(|w| !w[0].is_prefix_of(w[1]))
}

/// Every sufficiently long word has exactly one prefix in `words`.
pub fn is_exhaustive(words: &[Word], m: usize) -> bool {
    let mut sorted: Vec<&[u32]> = words.iter().map(Word::letters).collect();
    sorted.sort();
    sorted.dedup();
    !sorted.is_empty() && complete(&sorted, 0, m)
}

fn complete(words: &[&[u32]], depth: usize, m: usize) -> bool {
    if words.len() == 1 && words[0].len() == depth {
        return true;
    }
    if words.iter().any(|w| w.len() <= depth) {
        return false;
    }
    let mut start = 0;
    for letter in 1..=m as u32 {
        let end = start + words[start..].partition_point(|w| w[depth] == letter);
        if end == start || !complete(&words[start..end], depth + 1, m) {
            return false;
        }
        start = end;
    }
    start == words.len()
}

/// `Σ_w Π_j p_{w_j}` over the words.
pub fn product_mass(words: &[Word], weights: &ProbabilityVector) -> f64 {
    let p = weights.as_slice();
    compensated_sum(
        words
            .iter()
            .map(|w| w.letters().iter().map(|&l| p[l as usize - 1]).product::<f64>()),
    )
}
