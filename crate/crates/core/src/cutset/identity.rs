use crate::ifs::{apply_word, IfsSystem, Similarity};
use crate::linalg::Point;

/// Tolerance for treating two similarity words as the same map.
pub const SIMILARITY_MATCH_TOL: f64 = 1e-12;
/// Tolerance on probe-point images for C¹ words.
pub const PROBE_MATCH_TOL: f64 = 1e-9;

/// Parameters identifying a word map up to the matching tolerance.
#[derive(Debug, Clone)]
pub(crate) enum MapKey {
    Similarity(Similarity),
    Probes(Vec<f64>),
}

impl MapKey {
    fn coords(&self) -> Vec<f64> {
        match self {
            MapKey::Similarity(s) => {
                let mut v = s.translation.clone();
                v.push(s.ratio);
                v.extend_from_slice(&s.isometry);
                v
            }
            MapKey::Probes(v) => v.clone(),
        }
    }

    fn matches(&self, other: &MapKey) -> bool {
        match (self, other) {
            (MapKey::Similarity(a), MapKey::Similarity(b)) => a.approx_eq(b, SIMILARITY_MATCH_TOL),
            (MapKey::Probes(a), MapKey::Probes(b)) => {
                a.iter().zip(b).all(|(x, y)| (x - y).abs() <= PROBE_MATCH_TOL)
            }
            _ => false,
        }
    }
}

/// Three fixed points at which C¹ word maps are compared.
pub(crate) fn probe_points(system: &IfsSystem) -> [Point; 3] {
    let ball = system.ball();
    let mut shifted = ball.center.clone();
    shifted[0] += 0.5 * ball.radius;
    [system.anchor().to_vec(), ball.center.clone(), shifted]
}

pub(crate) fn key_for(system: &IfsSystem, letters: &[u32], similarity: Option<&Similarity>, probes: &[Point; 3]) -> MapKey {
    match similarity {
        Some(s) => MapKey::Similarity(s.clone()),
        None => MapKey::Probes(
            probes
                .iter()
                .flat_map(|p| apply_word(system, letters, p))
                .collect(),
        ),
    }
}

/// Groups indices of equal maps. Keys are sorted by their coordinates and
/// neighbours merged, so each group is a run of consecutive matches. Groups
/// come out ordered by their smallest index.
pub(crate) fn group_equal(keys: &[MapKey]) -> Vec<Vec<usize>> {
    let coords: Vec<Vec<f64>> = keys.iter().map(MapKey::coords).collect();
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| {
        coords[a]
            .iter()
            .zip(&coords[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if keys[g[g.len() - 1]].matches(&keys[i]) => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort_by_key(|g| g[0]);
    groups
}
