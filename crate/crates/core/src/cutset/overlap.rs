use serde::Serialize;

use super::identity::{group_equal, key_for, probe_points};
use crate::error::{Error, Result};
use crate::ifs::{similarity_of, IfsSystem, Word};
use crate::numeric::{tree_size, word_budget};

/// Two distinct words of equal length with the same map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapPair {
    pub first: Word,
    pub second: Word,
}

/// All unordered pairs of equal-length words (length ≤ `depth`) with
/// `f_{w1} = f_{w2}`, ordered by length and then lexicographically.
pub fn exact_overlap_scan(system: &IfsSystem, depth: usize) -> Result<Vec<OverlapPair>> {
    let budget = word_budget();
    let requested = tree_size(system.len(), depth);
    if requested > budget {
        return Err(Error::BudgetExceeded {
            budget,
            requested,
            depth_reached: 0,
            partial: Vec::new(),
        });
    }
    let probes = probe_points(system);
    let mut pairs = Vec::new();
    for k in 1..=depth {
        let words: Vec<Word> = Word::all_of_length(system.len(), k).collect();
        let keys: Vec<_> = words
            .iter()
            .map(|w| {
                let sim = similarity_of(system, w.letters());
                key_for(system, w.letters(), sim.as_ref(), &probes)
            })
            .collect();
        for group in group_equal(&keys) {
            for (a, &i) in group.iter().enumerate() {
                for &j in &group[a + 1..] {
                    pairs.push(OverlapPair {
                        first: words[i].clone(),
                        second: words[j].clone(),
                    });
                }
            }
        }
    }
    Ok(pairs)
}
