//! Specification structures for rule-governed autonomous agents.
//!
//! * [`poset`]: finite posets of dimensional properties and their chains,
//!   antichains and ranks.
//! * [`evaluator`]: consistent evaluability, the per-rank counting evaluator
//!   and its weak order on subsets, canonical graded forms.
//! * [`refinement`]: adding properties and comparisons while keeping a
//!   structure graded, with minimal repair.
//! * [`contracts`]: assume-guarantee profiles, compatibility and blame.
//! * [`game`]: two-agent normal-form games over specification structures.
//! * [`format`] and [`cli`]: the text formats and command layer.

pub mod cli;
pub mod contracts;
pub mod evaluator;
pub mod exec;
pub mod format;
pub mod game;
pub mod generate;
pub mod poset;
pub mod refinement;

pub use evaluator::{rank_partition, EvalVector, RankPartition};
pub use exec::Execution;
pub use poset::{ElementSet, Poset, PosetError, PropertyId};
