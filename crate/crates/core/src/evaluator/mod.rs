//! Consistent evaluation of posets of dimensional properties.
//!
//! A poset is consistently evaluable exactly when it splits into ranked
//! maximal antichains with every element on a full-length maximal chain
//! ([`rank_partition`]). The partition is unique, and counting satisfied
//! properties per rank, compared highest rank first ([`EvalVector`]), gives
//! an evaluator whose induced weak order on subsets is shared by every other
//! consistent evaluator ([`powerset_order`], [`verify_consistent_evaluator`]).

mod canonical;
mod order;
mod partition;
mod vector;
mod verify;

use thiserror::Error;

use crate::poset::PosetError;

pub use canonical::{canonicalize, level_skipping_covers};
pub use order::{powerset_order, powerset_order_with, EquivalenceClass, DEFAULT_POWERSET_BOUND, MAX_POWERSET};
pub use partition::{
    exhaustive_rank_partitions, is_consistently_evaluable, rank_partition, ranked_antichain_partitions,
    satisfies_chain_criterion, EvaluabilityWitness, RankPartition,
};
pub use vector::{w_compare, EvalVector};
pub use verify::{
    verify_consistent_evaluator, verify_consistent_evaluator_with, verify_singleton_requirements, w_table,
    EvaluatorTable, Verdict, Violation, MAX_TABLE, MAX_VERIFY,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("structure is not consistently evaluable: {0}")]
    NotEvaluable(EvaluabilityWitness),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("evaluation vectors have different rank counts ({left} vs {right})")]
    RankMismatch { left: usize, right: usize },
    #[error("{size} elements exceed the bound of {bound} for this operation")]
    TooLarge { size: usize, bound: usize },
    #[error("evaluator table has no score for {0}")]
    PartialTable(String),
    #[error("evaluator table scores {0} twice with different values")]
    ConflictingEntry(String),
}
