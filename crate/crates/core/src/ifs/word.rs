use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite word over the alphabet `{1, …, m}`; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from 1-based letters. Letter 0 is rejected.
    pub fn new(letters: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l == 0) {
            return Err(Error::InvalidWord { letter: bad, m: 0 });
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks every letter against an alphabet of size `m`.
    pub fn validate(&self, m: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l as usize > m) {
            Some(&letter) => Err(Error::InvalidWord { letter, m }),
            None => Ok(()),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, letter: u32) {
        self.0.push(letter);
    }

    /// Word with the last letter dropped.
    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// Shift σ: drops the first letter.
    pub fn shift(&self) -> Word {
        Word(self.0.iter().skip(1).copied().collect())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// All words of length `k` over `m` letters, in lexicographic order.
    pub fn all_of_length(m: usize, k: usize) -> impl Iterator<Item = Word> {
        let total = (m as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
        (0..total).map(move |mut idx| {
            let mut v = vec![0u32; k];
            for slot in v.iter_mut().rev() {
                *slot = (idx % m as u64) as u32 + 1;
                idx /= m as u64;
            }
            Word(v)
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}
