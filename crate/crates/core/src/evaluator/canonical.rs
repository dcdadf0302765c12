use super::{rank_partition, EvalError, RankPartition};
use crate::poset::Poset;

/// Covers joining elements whose ranks differ by two or more.
pub fn level_skipping_covers(p: &Poset, rp: &RankPartition) -> Vec<(usize, usize)> {
    p.cover_pairs()
        .into_iter()
        .filter(|&(lo, hi)| rp.rank_of_idx(hi) - rp.rank_of_idx(lo) >= 2)
        .collect()
}

/// Graded poset on the same elements with the same rank partition, and
/// hence the same evaluation order: every cover that skips a level is
/// dropped. Already-graded posets come back unchanged.
pub fn canonicalize(p: &Poset) -> Result<Poset, EvalError> {
    let rp = rank_partition(p)?;
    let kept: Vec<(usize, usize)> = p
        .cover_pairs()
        .into_iter()
        .filter(|&(lo, hi)| rp.rank_of_idx(hi) - rp.rank_of_idx(lo) == 1)
        .collect();
    Ok(p.with_relations(&kept)?)
}
