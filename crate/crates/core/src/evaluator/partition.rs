use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{EvalError, EvalVector};
use crate::poset::{Antichain, ElementSet, Poset, PropertyId};

/// Why a poset has no consistent evaluator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvaluabilityWitness {
    /// The longest chain through `element` is shorter than the poset's height.
    ShortChain { element: PropertyId, longest_chain: usize, required: usize },
    /// The rank-`rank` level misses `outsider`, which is incomparable to all of it.
    NonMaximalLevel { rank: usize, outsider: PropertyId },
}

impl fmt::Display for EvaluabilityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvaluabilityWitness::ShortChain { element, longest_chain, required } => write!(
                f,
                "`{element}` lies on no maximal chain of length {required} (longest through it: {longest_chain})"
            ),
            EvaluabilityWitness::NonMaximalLevel { rank, outsider } => {
                write!(f, "rank {rank} is not a maximal antichain: `{outsider}` is incomparable to all of it")
            }
        }
    }
}

/// The unique partition of a consistently evaluable poset into ranked
/// maximal antichains, rank 0 at the bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankPartition {
    names: Vec<PropertyId>,
    levels: Vec<ElementSet>,
    rank_of: Vec<usize>,
}

impl RankPartition {
    pub fn num_ranks(&self) -> usize {
        self.levels.len()
    }

    pub fn num_elements(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[PropertyId] {
        &self.names
    }

    /// Level bitmasks, rank 0 first.
    pub fn levels(&self) -> &[ElementSet] {
        &self.levels
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }

    pub fn antichains(&self) -> Vec<Antichain> {
        self.levels
            .iter()
            .map(|l| Antichain(l.iter().map(|i| self.names[i].clone()).collect()))
            .collect()
    }

    pub fn rank_of_idx(&self, i: usize) -> usize {
        self.rank_of[i]
    }

    pub fn rank_of(&self, id: &str) -> Result<usize, EvalError> {
        Ok(self.rank_of[self.index_of(id)?])
    }

    pub fn rank_map(&self) -> BTreeMap<PropertyId, usize> {
        self.names.iter().cloned().zip(self.rank_of.iter().copied()).collect()
    }

    fn index_of(&self, id: &str) -> Result<usize, EvalError> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(id))
            .map_err(|_| crate::poset::PosetError::UnknownElement(id.to_string()).into())
    }

    /// Subset of element indices from names.
    pub fn set_of<I>(&self, ids: I) -> Result<ElementSet, EvalError>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        ids.into_iter()
            .try_fold(ElementSet::EMPTY, |acc, id| Ok(acc.with(self.index_of(id.as_ref())?)))
    }

    /// Per-rank satisfaction counts of `subset`.
    pub fn evaluate_set(&self, subset: ElementSet) -> EvalVector {
        EvalVector::new(self.levels.iter().map(|&l| (l & subset).len() as u32).collect())
    }

    /// Per-rank satisfaction counts of the named properties. Fails on names
    /// outside the poset.
    pub fn evaluate<I>(&self, subset: I) -> Result<EvalVector, EvalError>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        Ok(self.evaluate_set(self.set_of(subset)?))
    }

    /// Names in the highest rank.
    pub fn top_level(&self) -> Vec<PropertyId> {
        let top = *self.levels.last().expect("partitions are non-empty");
        top.iter().map(|i| self.names[i].clone()).collect()
    }
}

/// Decides consistent evaluability and returns the rank partition.
///
/// The only possible partition ranks each element by the length of the
/// longest chain below it; this checks that candidate against both
/// criteria: every element lies on a chain as long as the whole poset is
/// tall, and every level is a maximal antichain.
pub fn rank_partition(p: &Poset) -> Result<RankPartition, EvalError> {
    let heights = p.heights();
    let depths = p.depths();
    let n_ranks = heights.iter().max().copied().unwrap_or(0) + 1;
    for i in 0..p.len() {
        let through = heights[i] + depths[i] + 1;
        if through != n_ranks {
            return Err(EvalError::NotEvaluable(EvaluabilityWitness::ShortChain {
                element: p.name(i).clone(),
                longest_chain: through,
                required: n_ranks,
            }));
        }
    }
    let mut levels = vec![ElementSet::EMPTY; n_ranks];
    for (i, &h) in heights.iter().enumerate() {
        levels[h] = levels[h].with(i);
    }
    for (rank, &level) in levels.iter().enumerate() {
        let covered = level
            .iter()
            .fold(level, |acc, i| acc | p.above(i) | p.below(i));
        if let Some(outsider) = (p.all() - covered).first() {
            return Err(EvalError::NotEvaluable(EvaluabilityWitness::NonMaximalLevel {
                rank,
                outsider: p.name(outsider).clone(),
            }));
        }
    }
    Ok(RankPartition { names: p.names().to_vec(), levels, rank_of: heights })
}

pub fn is_consistently_evaluable(p: &Poset) -> bool {
    rank_partition(p).is_ok()
}

/// Every sequence of pairwise-disjoint maximal antichains that covers the
/// poset and respects its order (`a < b` puts `a` in an earlier block).
/// Exponential; intended for small posets and as an independent check on
/// [`rank_partition`].
pub fn ranked_antichain_partitions(p: &Poset) -> Vec<Vec<ElementSet>> {
    fn extend(
        p: &Poset,
        antichains: &[ElementSet],
        used: ElementSet,
        seq: &mut Vec<ElementSet>,
        out: &mut Vec<Vec<ElementSet>>,
    ) {
        if used == p.all() {
            out.push(seq.clone());
            return;
        }
        for &a in antichains {
            if !(a & used).is_empty() {
                continue;
            }
            let below = a.iter().fold(ElementSet::EMPTY, |acc, i| acc | p.below(i));
            if below.is_subset(used) {
                seq.push(a);
                extend(p, antichains, used | a, seq, out);
                seq.pop();
            }
        }
    }
    let antichains = p.maximal_antichains_idx();
    let mut out = Vec::new();
    extend(p, &antichains, ElementSet::EMPTY, &mut Vec::new(), &mut out);
    out
}

/// Whether every element lies on some maximal chain with one element per
/// block of `blocks`.
pub fn satisfies_chain_criterion(p: &Poset, blocks: &[ElementSet]) -> bool {
    let full: BTreeSet<usize> = p
        .maximal_chains_idx()
        .into_iter()
        .filter(|c| c.len() == blocks.len())
        .flatten()
        .collect();
    full.len() == p.len()
}

/// All partitions satisfying both evaluability criteria, found by exhaustive
/// search. A consistently evaluable poset has exactly one.
pub fn exhaustive_rank_partitions(p: &Poset) -> Vec<Vec<ElementSet>> {
    ranked_antichain_partitions(p)
        .into_iter()
        .filter(|blocks| satisfies_chain_criterion(p, blocks))
        .collect()
}
