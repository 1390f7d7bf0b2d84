use serde::{Deserialize, Serialize};

use super::Descriptor256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub index_a: usize,
    pub index_b: usize,
    pub hamming: u32,
}

/// Index and distance of the nearest descriptor; the lowest index wins ties.
fn nearest(d: &Descriptor256, set: &[Descriptor256]) -> Option<(usize, u32)> {
    let mut best: Option<(usize, u32)> = None;
    for (i, other) in set.iter().enumerate() {
        let dist = d.hamming(other);
        if best.is_none_or(|(_, b)| dist < b) {
            best = Some((i, dist));
        }
    }
    best
}

/// Mutual nearest neighbours within `max_hamming`, sorted by distance and
/// then by index in `a`.
pub fn match_descriptors(a: &[Descriptor256], b: &[Descriptor256], max_hamming: u32) -> Vec<Match> {
    let back: Vec<Option<usize>> = b.iter().map(|d| nearest(d, a).map(|(i, _)| i)).collect();
    let mut out: Vec<Match> = a
        .iter()
        .enumerate()
        .filter_map(|(ia, d)| {
            let (ib, dist) = nearest(d, b)?;
            (dist <= max_hamming && back[ib] == Some(ia)).then_some(Match { index_a: ia, index_b: ib, hamming: dist })
        })
        .collect();
    out.sort_by_key(|m| (m.hamming, m.index_a));
    out
}
