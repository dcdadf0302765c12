//! Growing a specification structure by one property or one comparison.
//!
//! [`refine`] applies the addition and accepts it only if every maximal chain
//! still has one length. [`repair`] makes a rejected addition graded again
//! with the fewest cover edits: dropping edges made redundant and adding
//! edges between previously incomparable properties. Candidate results are
//! ranked by
//!
//! 1. edit count, the size of the symmetric difference between the cover
//!    sets before and after repair;
//! 2. how many order relations among the pre-existing properties change;
//! 3. the sorted removed edges, then the sorted added edges, by name.
//!
//! Nodes are never deleted. Every requested relation stays in the order; a
//! requested comparison between two existing properties also stays a cover.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::poset::{Chain, ElementSet, Poset, PosetError, PropertyId};

/// Candidate diffs evaluated per edit level before the search gives up.
pub const MAX_LEVEL_CANDIDATES: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RefineError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("property `{0}` already exists")]
    DuplicateNode(PropertyId),
    #[error("addition breaks gradedness: maximal chains {shortest} and {longest} differ in length")]
    NotGradedAfter { shortest: Chain, longest: Chain },
    #[error("no repair within {budget} edits")]
    Unrepairable { budget: usize },
}

/// One addition to a specification structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefinementRequest {
    /// New property `id`, above every property in `below` and below every
    /// property in `above`.
    AddNode { id: PropertyId, below: BTreeSet<PropertyId>, above: BTreeSet<PropertyId> },
    /// New comparison `lower < upper` between existing properties.
    AddEdge { lower: PropertyId, upper: PropertyId },
}

impl RefinementRequest {
    pub fn add_node<I, J>(id: &str, below: I, above: J) -> Result<Self, PosetError>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
        J: IntoIterator,
        J::Item: AsRef<str>,
    {
        let set = |it: I::Item| PropertyId::new(it.as_ref());
        Ok(RefinementRequest::AddNode {
            id: PropertyId::new(id)?,
            below: below.into_iter().map(set).collect::<Result<_, _>>()?,
            above: above.into_iter().map(|a| PropertyId::new(a.as_ref())).collect::<Result<_, _>>()?,
        })
    }

    pub fn add_edge(lower: &str, upper: &str) -> Result<Self, PosetError> {
        Ok(RefinementRequest::AddEdge { lower: PropertyId::new(lower)?, upper: PropertyId::new(upper)? })
    }
}

/// Cover edits turning the post-insertion poset into the repaired one.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RepairDiff {
    pub removed_edges: Vec<(PropertyId, PropertyId)>,
    pub added_edges: Vec<(PropertyId, PropertyId)>,
}

impl RepairDiff {
    pub fn len(&self) -> usize {
        self.removed_edges.len() + self.added_edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for RepairDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.removed_edges {
            writeln!(f, "-edge {a} {b}")?;
        }
        for (a, b) in &self.added_edges {
            writeln!(f, "+edge {a} {b}")?;
        }
        Ok(())
    }
}

/// A repaired structure together with the edits that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    pub poset: Poset,
    pub diff: RepairDiff,
}

/// The post-insertion poset and what must survive a repair, by index.
struct Insertion {
    poset: Poset,
    old: ElementSet,
    must_relate: Vec<(usize, usize)>,
    must_cover: Vec<(usize, usize)>,
}

fn insert(p: &Poset, req: &RefinementRequest) -> Result<Insertion, RefineError> {
    if !p.is_graded() {
        let lengths = p.maximal_chain_lengths();
        return Err(PosetError::NotGraded { shortest: lengths[0], longest: lengths[lengths.len() - 1] }.into());
    }
    let mut names = p.names().to_vec();
    let mut relations = p.cover_pairs();
    let mut requested = Vec::new();
    let is_edge = matches!(req, RefinementRequest::AddEdge { .. });
    match req {
        RefinementRequest::AddNode { id, below, above } => {
            if p.contains(id.as_str()) {
                return Err(RefineError::DuplicateNode(id.clone()));
            }
            let new = names.len();
            names.push(id.clone());
            for b in below {
                requested.push((p.index_of(b.as_str())?, new));
            }
            for a in above {
                requested.push((new, p.index_of(a.as_str())?));
            }
        }
        RefinementRequest::AddEdge { lower, upper } => {
            requested.push((p.index_of(lower.as_str())?, p.index_of(upper.as_str())?));
        }
    }
    relations.extend(requested.iter().copied());
    let poset = Poset::from_indexed(names.clone(), &relations)?;
    let to_new = |i: usize| poset.index_of(names[i].as_str()).expect("same names");
    let must_relate: Vec<(usize, usize)> = requested.iter().map(|&(a, b)| (to_new(a), to_new(b))).collect();
    let must_cover = if is_edge && poset.upper_covers(must_relate[0].0).contains(must_relate[0].1) {
        must_relate.clone()
    } else {
        Vec::new()
    };
    let old = p.names().iter().map(|n| poset.index_of(n.as_str()).expect("kept")).collect();
    Ok(Insertion { poset, old, must_relate, must_cover })
}

fn chain_witness(p: &Poset) -> RefineError {
    let chains = p.maximal_chains();
    let shortest = chains.iter().min_by_key(|c| c.len()).expect("non-empty").clone();
    let longest = chains.iter().max_by_key(|c| c.len()).expect("non-empty").clone();
    RefineError::NotGradedAfter { shortest, longest }
}

/// Applies the addition if the result is still graded.
pub fn refine(p: &Poset, req: &RefinementRequest) -> Result<Poset, RefineError> {
    let ins = insert(p, req)?;
    if ins.poset.is_graded() {
        Ok(ins.poset)
    } else {
        Err(chain_witness(&ins.poset))
    }
}

/// Applies the addition and, if needed, the minimal repair. Budget defaults
/// to twice the number of properties.
pub fn repair(p: &Poset, req: &RefinementRequest, budget: Option<usize>) -> Result<Repair, RefineError> {
    repair_with(p, req, budget, Execution::default())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Rank {
    edits: usize,
    disturbance: usize,
    removed: Vec<(PropertyId, PropertyId)>,
    added: Vec<(PropertyId, PropertyId)>,
}

#[derive(Clone, Copy)]
enum Edit {
    Remove(usize, usize),
    Add(usize, usize),
}

pub fn repair_with(
    p: &Poset,
    req: &RefinementRequest,
    budget: Option<usize>,
    exec: Execution,
) -> Result<Repair, RefineError> {
    let ins = insert(p, req)?;
    if ins.poset.is_graded() {
        return Ok(Repair { poset: ins.poset, diff: RepairDiff::default() });
    }
    let post = &ins.poset;
    let n = post.len();
    let budget = budget.unwrap_or(2 * n);
    let covers: BTreeSet<(usize, usize)> = post.cover_pairs().into_iter().collect();
    let mut edits: Vec<Edit> = covers.iter().map(|&(a, b)| Edit::Remove(a, b)).collect();
    for a in 0..n {
        for b in 0..n {
            if a != b && !covers.contains(&(a, b)) {
                edits.push(Edit::Add(a, b));
            }
        }
    }
    let old_closure: BTreeSet<(usize, usize)> = post
        .relation_pairs()
        .into_iter()
        .filter(|&(a, b)| ins.old.contains(a) && ins.old.contains(b))
        .collect();

    let evaluate = |combo: &Vec<usize>| -> Option<(Rank, Poset)> {
        let mut relations = covers.clone();
        for &e in combo {
            match edits[e] {
                Edit::Remove(a, b) => {
                    relations.remove(&(a, b));
                }
                Edit::Add(a, b) => {
                    relations.insert((a, b));
                }
            }
        }
        let relations: Vec<(usize, usize)> = relations.into_iter().collect();
        let q = post.with_relations(&relations).ok()?;
        if !q.is_graded()
            || !ins.must_relate.iter().all(|&(a, b)| q.lt_idx(a, b))
            || !ins.must_cover.iter().all(|&(a, b)| q.upper_covers(a).contains(b))
        {
            return None;
        }
        let q_covers: BTreeSet<(usize, usize)> = q.cover_pairs().into_iter().collect();
        let named = |pairs: Vec<&(usize, usize)>| -> Vec<(PropertyId, PropertyId)> {
            pairs.into_iter().map(|&(a, b)| (post.name(a).clone(), post.name(b).clone())).collect()
        };
        let removed = named(covers.difference(&q_covers).collect());
        let added = named(q_covers.difference(&covers).collect());
        let new_closure: BTreeSet<(usize, usize)> = q
            .relation_pairs()
            .into_iter()
            .filter(|&(a, b)| ins.old.contains(a) && ins.old.contains(b))
            .collect();
        let disturbance = old_closure.symmetric_difference(&new_closure).count();
        Some((Rank { edits: removed.len() + added.len(), disturbance, removed, added }, q))
    };

    let mut best: Option<(Rank, Poset)> = None;
    for k in 1..=budget.min(edits.len()) {
        let combos = combinations(edits.len(), k, MAX_LEVEL_CANDIDATES);
        let Some(combos) = combos else {
            break;
        };
        let found = exec::map_slice(exec, &combos, evaluate);
        for candidate in found.into_iter().flatten() {
            if best.as_ref().is_none_or(|b| candidate.0 < b.0) {
                best = Some(candidate);
            }
        }
        // Any result with d edits is reachable with exactly d edits, so
        // nothing cheaper remains once the level reaches the best count.
        if best.as_ref().is_some_and(|b| b.0.edits <= k) {
            break;
        }
    }
    match best {
        Some((rank, poset)) => Ok(Repair {
            poset,
            diff: RepairDiff { removed_edges: rank.removed, added_edges: rank.added },
        }),
        None => Err(RefineError::Unrepairable { budget }),
    }
}

/// All `k`-subsets of `0..m` in lexicographic order, or `None` past `limit`.
fn combinations(m: usize, k: usize, limit: usize) -> Option<Vec<Vec<usize>>> {
    let mut count: u128 = 1;
    for i in 0..k {
        count = count * (m - i) as u128 / (i + 1) as u128;
    }
    if count > limit as u128 {
        return None;
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + m - k) else {
            return Some(out);
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Ranks 0..2: a < c < f and a < d < e; `c` and `e` are incomparable.
    fn proxy_base() -> Poset {
        Poset::new(["a", "c", "d", "e", "f"], [("a", "c"), ("a", "d"), ("c", "f"), ("d", "e")]).unwrap()
    }

    /// Ranks 0..2: a < b < e and d < c < e.
    fn same_rank_base() -> Poset {
        Poset::new(["a", "b", "c", "d", "e"], [("a", "b"), ("d", "c"), ("b", "e"), ("c", "e")]).unwrap()
    }

    fn pair(a: &str, b: &str) -> (PropertyId, PropertyId) {
        (PropertyId::new(a).unwrap(), PropertyId::new(b).unwrap())
    }

    #[test]
    fn node_between_adjacent_ranks_keeps_gradedness() {
        let p = proxy_base();
        let q = refine(&p, &RefinementRequest::add_node("g", ["a"], ["f"]).unwrap()).unwrap();
        assert!(q.is_graded());
        assert_eq!(q.rank_function().unwrap()[&PropertyId::new("g").unwrap()], 1);
    }

    #[test]
    fn node_below_adjacent_ranks_is_rejected_then_proxied() {
        let p = proxy_base();
        let req = RefinementRequest::add_node("g", Vec::<&str>::new(), ["e", "c"]).unwrap();
        let err = refine(&p, &req).unwrap_err();
        let RefineError::NotGradedAfter { shortest, longest } = err else {
            panic!("expected a chain witness");
        };
        assert_eq!(shortest.len(), 2);
        assert_eq!(longest.len(), 3);

        let fixed = repair(&p, &req, None).unwrap();
        assert!(fixed.poset.is_graded());
        assert!(fixed.poset.lt("g", "e").unwrap() && fixed.poset.lt("g", "c").unwrap());
        assert_eq!(fixed.diff.removed_edges, vec![pair("g", "e")]);
        assert_eq!(fixed.diff.added_edges, vec![pair("g", "d")]);
        assert_eq!(fixed.diff.to_string(), "-edge g e\n+edge g d\n");
    }

    #[test]
    fn same_rank_edge_is_rejected_then_repaired() {
        let p = same_rank_base();
        let req = RefinementRequest::add_edge("b", "c").unwrap();
        assert!(matches!(refine(&p, &req), Err(RefineError::NotGradedAfter { .. })));
        let fixed = repair(&p, &req, None).unwrap();
        assert!(fixed.poset.is_graded());
        assert!(fixed.poset.upper_covers(fixed.poset.index_of("b").unwrap()).contains(fixed.poset.index_of("c").unwrap()));
        assert!(!fixed.diff.removed_edges.contains(&pair("b", "c")));
        assert_eq!(fixed.diff.len(), 1);
    }

    #[test]
    fn graded_addition_needs_no_repair() {
        let p = same_rank_base();
        let req = RefinementRequest::add_edge("a", "c").unwrap();
        let fixed = repair(&p, &req, None).unwrap();
        assert!(fixed.diff.is_empty());
        assert_eq!(fixed.poset, refine(&p, &req).unwrap());
    }

    #[test]
    fn request_errors() {
        let p = same_rank_base();
        assert_eq!(
            refine(&p, &RefinementRequest::add_node("a", ["b"], Vec::<&str>::new()).unwrap()).unwrap_err(),
            RefineError::DuplicateNode(PropertyId::new("a").unwrap())
        );
        assert!(matches!(
            refine(&p, &RefinementRequest::add_edge("e", "a").unwrap()),
            Err(RefineError::Poset(PosetError::Cycle(_)))
        ));
        assert!(matches!(
            refine(&p, &RefinementRequest::add_edge("a", "zz").unwrap()),
            Err(RefineError::Poset(PosetError::UnknownElement(_)))
        ));
        let ungraded = Poset::new(["a", "b", "x"], [("a", "b")]).unwrap();
        assert!(matches!(
            refine(&ungraded, &RefinementRequest::add_edge("a", "x").unwrap()),
            Err(RefineError::Poset(PosetError::NotGraded { .. }))
        ));
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let c = combinations(4, 2, 100).unwrap();
        assert_eq!(c, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert!(combinations(40, 10, 1000).is_none());
    }
}
