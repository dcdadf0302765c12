//! Brute-force check of the five consistent-evaluator requirements for an
//! arbitrary score table on a small poset.
//!
//! Requirements, for `f` mapping subsets to a totally ordered set:
//!
//! 1. the empty set scores strictly below every non-empty set;
//! 2. dropping one element from each side, when the two dropped singletons
//!    score equally, keeps `f(P1) <= f(P2)`;
//! 3. with no singleton score shared between the sides, the side with the
//!    higher best singleton scores higher;
//! 4. `p1 < p2` in the order implies `f({p1}) < f({p2})`;
//! 5. incomparable `p1, p2` with `f({p1}) < f({p2})` need proxies `s, t` with
//!    `p1 < s`, `f({s}) = f({p2})`, `t < p2` and `f({t}) = f({p1})`.
//!
//! Requirements 4 and 5 only look at singleton scores and are checked first;
//! the powerset-wide requirements 1 to 3 follow.

use std::fmt;

use serde::Serialize;

use super::{EvalError, EvalVector, RankPartition};
use crate::exec::{self, Execution};
use crate::poset::{ElementSet, Poset, PropertyId};

/// Largest poset accepted by [`verify_consistent_evaluator`].
pub const MAX_VERIFY: usize = 10;
/// Largest poset an [`EvaluatorTable`] can be built for.
pub const MAX_TABLE: usize = 16;

/// A score for every subset of a poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluatorTable<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Ord + Clone> EvaluatorTable<T> {
    pub fn from_fn(p: &Poset, f: impl FnMut(ElementSet) -> T) -> Result<Self, EvalError> {
        let n = p.len();
        if n > MAX_TABLE {
            return Err(EvalError::TooLarge { size: n, bound: MAX_TABLE });
        }
        let values = (0..1u64 << n).map(ElementSet::from_bits).map(f).collect();
        Ok(EvaluatorTable { n, values })
    }

    /// Builds from explicit entries; every subset must be scored exactly once
    /// (repeating an entry with the same score is allowed).
    pub fn from_entries<I>(p: &Poset, entries: I) -> Result<Self, EvalError>
    where
        I: IntoIterator<Item = (ElementSet, T)>,
    {
        let n = p.len();
        if n > MAX_TABLE {
            return Err(EvalError::TooLarge { size: n, bound: MAX_TABLE });
        }
        let mut slots: Vec<Option<T>> = vec![None; 1 << n];
        for (set, score) in entries {
            if !set.is_subset(p.all()) {
                return Err(EvalError::PartialTable(format!("subset outside the poset ({:#x})", set.bits())));
            }
            let slot = &mut slots[set.bits() as usize];
            match slot {
                Some(existing) if *existing != score => {
                    return Err(EvalError::ConflictingEntry(p.format_set(set)));
                }
                _ => *slot = Some(score),
            }
        }
        let values = slots
            .into_iter()
            .enumerate()
            .map(|(bits, v)| v.ok_or_else(|| EvalError::PartialTable(p.format_set(ElementSet::from_bits(bits as u64)))))
            .collect::<Result<Vec<T>, _>>()?;
        Ok(EvaluatorTable { n, values })
    }

    pub fn num_elements(&self) -> usize {
        self.n
    }

    pub fn get(&self, set: ElementSet) -> &T {
        &self.values[set.bits() as usize]
    }

    /// Scores of the singletons, by element index.
    pub fn singleton_scores(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(ElementSet::singleton(i)).clone()).collect()
    }

    /// Whether this table and `other` order every pair of subsets the same way.
    pub fn same_weak_order<U: Ord>(&self, other: &EvaluatorTable<U>) -> bool {
        let size = self.values.len();
        size == other.values.len()
            && (0..size).all(|a| {
                (0..size).all(|b| {
                    (self.values[a] <= self.values[b]) == (other.values[a] <= other.values[b])
                })
            })
    }
}

/// The W evaluator as a table.
pub fn w_table(rp: &RankPartition, p: &Poset) -> Result<EvaluatorTable<EvalVector>, EvalError> {
    EvaluatorTable::from_fn(p, |s| rp.evaluate_set(s))
}

/// A failed requirement with the subsets or elements that witness it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Requirement 1.
    EmptyNotLowest { subset: Vec<PropertyId> },
    /// Requirement 2: `f(left) <= f(right)` but not after removing
    /// `removed_left` and `removed_right`.
    RemovalReversesOrder {
        left: Vec<PropertyId>,
        right: Vec<PropertyId>,
        removed_left: PropertyId,
        removed_right: PropertyId,
    },
    /// Requirement 3: `right` holds the better singleton but does not score higher.
    HigherMaximumNotPreferred { left: Vec<PropertyId>, right: Vec<PropertyId> },
    /// Requirement 4.
    OrderNotRespected { lower: PropertyId, upper: PropertyId },
    /// Requirement 5: incomparable, `lower` scores below `upper`, no proxies.
    MissingProxy { lower: PropertyId, upper: PropertyId },
}

impl Violation {
    /// Requirement index, 1 to 5.
    pub fn requirement(&self) -> u8 {
        match self {
            Violation::EmptyNotLowest { .. } => 1,
            Violation::RemovalReversesOrder { .. } => 2,
            Violation::HigherMaximumNotPreferred { .. } => 3,
            Violation::OrderNotRespected { .. } => 4,
            Violation::MissingProxy { .. } => 5,
        }
    }
}

fn braces(names: &[PropertyId]) -> String {
    let v: Vec<&str> = names.iter().map(PropertyId::as_str).collect();
    format!("{{{}}}", v.join(","))
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "requirement {}: ", self.requirement())?;
        match self {
            Violation::EmptyNotLowest { subset } => {
                write!(f, "empty set does not score below {}", braces(subset))
            }
            Violation::RemovalReversesOrder { left, right, removed_left, removed_right } => write!(
                f,
                "f({}) <= f({}) but removing `{removed_left}` and `{removed_right}` reverses it",
                braces(left),
                braces(right)
            ),
            Violation::HigherMaximumNotPreferred { left, right } => write!(
                f,
                "{} holds the higher-valued property but does not score above {}",
                braces(right),
                braces(left)
            ),
            Violation::OrderNotRespected { lower, upper } => {
                write!(f, "`{lower}` < `{upper}` but its singleton does not score lower")
            }
            Violation::MissingProxy { lower, upper } => write!(
                f,
                "`{lower}` scores below the incomparable `{upper}` with no equally valued comparable proxies"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Violated(Violation),
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Consistent => None,
            Verdict::Violated(v) => Some(v),
        }
    }
}

/// Requirements 4 and 5 on singleton scores alone (`scores[i]` is the
/// score of element `i`).
pub fn verify_singleton_requirements<T: Ord>(p: &Poset, scores: &[T]) -> Option<Violation> {
    let n = p.len();
    assert_eq!(scores.len(), n, "one score per element");
    for lower in 0..n {
        for upper in p.above(lower) {
            if scores[lower] >= scores[upper] {
                return Some(Violation::OrderNotRespected {
                    lower: p.name(lower).clone(),
                    upper: p.name(upper).clone(),
                });
            }
        }
    }
    for p1 in 0..n {
        for p2 in p.incomparable(p1) {
            if scores[p1] >= scores[p2] {
                continue;
            }
            let s_ok = p.above(p1).iter().any(|s| scores[s] == scores[p2]);
            let t_ok = p.below(p2).iter().any(|t| scores[t] == scores[p1]);
            if !(s_ok && t_ok) {
                return Some(Violation::MissingProxy { lower: p.name(p1).clone(), upper: p.name(p2).clone() });
            }
        }
    }
    None
}

/// Exhaustively checks the five requirements. Posets above [`MAX_VERIFY`]
/// elements are rejected; the check is quadratic in the powerset size.
pub fn verify_consistent_evaluator<T>(p: &Poset, table: &EvaluatorTable<T>) -> Result<Verdict, EvalError>
where
    T: Ord + Clone + Sync,
{
    verify_consistent_evaluator_with(p, table, Execution::default())
}

pub fn verify_consistent_evaluator_with<T>(
    p: &Poset,
    table: &EvaluatorTable<T>,
    exec: Execution,
) -> Result<Verdict, EvalError>
where
    T: Ord + Clone + Sync,
{
    let n = p.len();
    if n > MAX_VERIFY {
        return Err(EvalError::TooLarge { size: n, bound: MAX_VERIFY });
    }
    if table.num_elements() != n {
        return Err(EvalError::PartialTable(format!(
            "table covers {} elements, poset has {n}",
            table.num_elements()
        )));
    }
    let scores = table.singleton_scores();
    if let Some(v) = verify_singleton_requirements(p, &scores) {
        return Ok(Verdict::Violated(v));
    }

    let size = 1u64 << n;
    let f = |bits: u64| table.get(ElementSet::from_bits(bits));
    let names = |bits: u64| p.names_of(ElementSet::from_bits(bits));

    // Requirement 1.
    if let Some(bits) = (1..size).find(|&b| f(0) >= f(b)) {
        return Ok(Verdict::Violated(Violation::EmptyNotLowest { subset: names(bits) }));
    }

    // Singleton scores collapse into value classes, ranked ascending.
    let mut distinct = scores.clone();
    distinct.sort();
    distinct.dedup();
    let class: Vec<usize> = scores
        .iter()
        .map(|s| distinct.binary_search(s).expect("score is present"))
        .collect();
    let class_mask = |bits: u64| -> u64 {
        ElementSet::from_bits(bits).iter().fold(0u64, |acc, i| acc | 1 << class[i])
    };

    // Requirement 2.
    let removal = exec::find_first(exec, 0..size, |left| {
        let l = ElementSet::from_bits(left);
        for right in 0..size {
            if f(left) > f(right) {
                continue;
            }
            let r = ElementSet::from_bits(right);
            for p1 in l {
                for p2 in r.iter().filter(|&p2| class[p2] == class[p1]) {
                    if f(l.without(p1).bits()) > f(r.without(p2).bits()) {
                        return Some(Violation::RemovalReversesOrder {
                            left: names(left),
                            right: names(right),
                            removed_left: p.name(p1).clone(),
                            removed_right: p.name(p2).clone(),
                        });
                    }
                }
            }
        }
        None
    });
    if let Some(v) = removal {
        return Ok(Verdict::Violated(v));
    }

    // Requirement 3.
    let masks: Vec<u64> = (0..size).map(class_mask).collect();
    let discrim = exec::find_first(exec, 1..size, |left| {
        let lm = masks[left as usize];
        let l_max = 63 - lm.leading_zeros();
        (1..size)
            .find(|&right| {
                let rm = masks[right as usize];
                lm & rm == 0 && l_max < 63 - rm.leading_zeros() && f(left) >= f(right)
            })
            .map(|right| Violation::HigherMaximumNotPreferred { left: names(left), right: names(right) })
    });
    Ok(match discrim {
        Some(v) => Verdict::Violated(v),
        None => Verdict::Consistent,
    })
}
