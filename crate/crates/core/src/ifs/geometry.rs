use serde::Serialize;

use super::map::Similarity;
use super::system::IfsSystem;
use super::word::Word;
use crate::error::Result;
use crate::linalg::{mat_mul, operator_norm, Point};

/// The composed map `f_w = f_{w_1} ∘ … ∘ f_{w_k}`.
#[derive(Debug, Clone)]
pub enum WordMap<'a> {
    /// Closed form for words made only of similarities.
    Similarity(Similarity),
    /// Evaluated letter by letter.
    Chain { system: &'a IfsSystem, word: Word },
}

impl WordMap<'_> {
    pub fn apply(&self, p: &[f64]) -> Point {
        match self {
            WordMap::Similarity(s) => s.apply(p),
            WordMap::Chain { system, word } => apply_word(system, word.letters(), p),
        }
    }

    pub fn as_similarity(&self) -> Option<&Similarity> {
        match self {
            WordMap::Similarity(s) => Some(s),
            WordMap::Chain { .. } => None,
        }
    }
}

pub fn compose_word<'a>(system: &'a IfsSystem, w: &Word) -> Result<WordMap<'a>> {
    w.validate(system.len())?;
    Ok(match similarity_of(system, w.letters()) {
        Some(s) => WordMap::Similarity(s),
        None => WordMap::Chain {
            system,
            word: w.clone(),
        },
    })
}

/// Closed-form composition when every letter is a similarity.
pub(crate) fn similarity_of(system: &IfsSystem, letters: &[u32]) -> Option<Similarity> {
    let mut acc = Similarity::identity(system.dim());
    for &l in letters {
        acc = acc.compose(system.map(l).as_similarity()?);
    }
    Some(acc)
}

pub(crate) fn apply_word(system: &IfsSystem, letters: &[u32], p: &[f64]) -> Point {
    let mut cur = p.to_vec();
    let mut next = vec![0.0; p.len()];
    for &l in letters.iter().rev() {
        system.map(l).apply_into(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// `(f_w(z), f_w'(z))` by the chain rule, innermost letter first.
pub(crate) fn chain_jacobian(system: &IfsSystem, letters: &[u32], z: &[f64]) -> (Point, Vec<f64>) {
    let d = system.dim();
    let mut point = z.to_vec();
    let mut next = vec![0.0; d];
    let mut jac = crate::linalg::identity(d);
    let mut step = vec![0.0; d * d];
    let mut tmp = vec![0.0; d * d];
    for &l in letters.iter().rev() {
        let map = system.map(l);
        map.jacobian_into(&point, &mut step);
        mat_mul(&step, &jac, d, &mut tmp);
        std::mem::swap(&mut jac, &mut tmp);
        map.apply_into(&point, &mut next);
        std::mem::swap(&mut point, &mut next);
    }
    (point, jac)
}

/// Geometry of the cylinder `f_w(K)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderGeometry {
    pub word: Word,
    /// `|f_w(K)|`: exact for similarities, `‖f_w'(anchor)‖·|K|` otherwise.
    pub diameter: f64,
    pub anchor_image: Point,
    pub derivative_norm: f64,
}

pub fn cylinder_geometry(system: &IfsSystem, w: &Word, anchor: &[f64]) -> Result<CylinderGeometry> {
    w.validate(system.len())?;
    let k = system.attractor_diameter();
    if let Some(s) = similarity_of(system, w.letters()) {
        return Ok(CylinderGeometry {
            word: w.clone(),
            diameter: s.ratio * k,
            anchor_image: s.apply(anchor),
            derivative_norm: s.ratio,
        });
    }
    let (image, jac) = chain_jacobian(system, w.letters(), anchor);
    let norm = operator_norm(&jac, system.dim());
    Ok(CylinderGeometry {
        word: w.clone(),
        diameter: norm * k,
        anchor_image: image,
        derivative_norm: norm,
    })
}

impl IfsSystem {
    /// Cylinder geometry at the system anchor.
    pub fn cylinder(&self, w: &Word) -> Result<CylinderGeometry> {
        cylinder_geometry(self, w, self.anchor())
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::ifs::map::{ContractionMap, ExprMap};
    use crate::ifs::system::BoundingBall;
    use crate::error::Error;

    fn w(v: &[u32]) -> Word {
        Word::new(v.to_vec()).unwrap()
    }

    #[test]
    fn cantor_composition_by_hand() {
        let s = gallery::cantor();
        let f = compose_word(&s, &w(&[1, 2])).unwrap();
        let sim = f.as_similarity().unwrap();
        assert!((sim.ratio - 1.0 / 9.0).abs() < 1e-16);
        assert!((sim.translation[0] - 2.0 / 9.0).abs() < 1e-16);
        assert!((f.apply(&[0.9])[0] - (0.9 / 9.0 + 2.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn dyadic_composition_by_hand() {
        let s = gallery::dyadic_twin();
        let f = compose_word(&s, &w(&[2, 2])).unwrap();
        let sim = f.as_similarity().unwrap();
        assert_eq!(sim.ratio, 0.25);
        assert_eq!(sim.translation[0], 0.75);
    }

    #[test]
    fn empty_word_is_identity() {
        let s = gallery::sierpinski();
        let f = compose_word(&s, &Word::empty()).unwrap();
        assert_eq!(f.apply(&[0.3, 0.7]), vec![0.3, 0.7]);
        let g = s.cylinder(&Word::empty()).unwrap();
        assert_eq!(g.diameter, s.attractor_diameter());
    }

    #[test]
    fn invalid_word() {
        let s = gallery::cantor();
        assert!(matches!(
            compose_word(&s, &w(&[1, 3])),
            Err(Error::InvalidWord { letter: 3, m: 2 })
        ));
    }

    #[test]
    fn cylinder_diameters() {
        let s = gallery::cantor();
        let g = s.cylinder(&w(&[1, 2, 2, 1])).unwrap();
        assert!((g.diameter - 3f64.powi(-4)).abs() < 1e-16);
        let d = gallery::dyadic_twin();
        for k in 0..10 {
            let word = Word::all_of_length(2, k).last().unwrap();
            assert_eq!(d.cylinder(&word).unwrap().diameter, 0.5f64.powi(k as i32));
        }
    }

    #[test]
    fn generic_chain_matches_similarity_closed_form() {
        // same Cantor maps written as expressions
        let maps = vec![
            ContractionMap::generic(ExprMap::parse(1, "x1/3", "1/3").unwrap()),
            ContractionMap::generic(ExprMap::parse(1, "x1/3 + 2/3", "1/3").unwrap()),
        ];
        let g = crate::IfsSystem::new(
            maps,
            BoundingBall {
                center: vec![0.5],
                radius: 0.5,
            },
        )
        .unwrap()
        .with_attractor_diameter(1.0)
        .unwrap();
        let s = gallery::cantor();
        for word in Word::all_of_length(2, 5) {
            let a = g.cylinder(&word).unwrap();
            let b = s.cylinder(&word).unwrap();
            assert!((a.diameter - b.diameter).abs() < 1e-15);
            assert!((a.anchor_image[0] - compose_word(&s, &word).unwrap().apply(g.anchor())[0]).abs() < 1e-14);
        }
    }
}
