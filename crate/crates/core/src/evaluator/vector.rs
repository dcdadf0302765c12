use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use super::EvalError;

/// Per-rank satisfaction counts of a subset.
///
/// Stored rank 0 first; displayed and serialized highest rank first, which is
/// also the significance order used for comparison. Vectors of different
/// lengths order by length first; use [`w_compare`] to reject such pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EvalVector {
    counts: Vec<u32>,
}

impl EvalVector {
    pub fn new(counts: Vec<u32>) -> Self {
        EvalVector { counts }
    }

    pub fn zero(ranks: usize) -> Self {
        EvalVector { counts: vec![0; ranks] }
    }

    /// Builds from the most-significant-first notation, e.g. `[1, 0, 2]`.
    pub fn from_most_significant(digits: &[u32]) -> Self {
        EvalVector { counts: digits.iter().rev().copied().collect() }
    }

    /// Counts indexed by rank.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn num_ranks(&self) -> usize {
        self.counts.len()
    }

    pub fn most_significant_first(&self) -> Vec<u32> {
        self.counts.iter().rev().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// Order-preserving integer rendering with digit `i` in base
    /// `level_sizes[i] + 1`. For display only.
    pub fn mixed_radix(&self, level_sizes: &[usize]) -> u64 {
        let mut value = 0u64;
        let mut weight = 1u64;
        for (count, size) in self.counts.iter().zip(level_sizes) {
            value = value.saturating_add(weight.saturating_mul(u64::from(*count)));
            weight = weight.saturating_mul(*size as u64 + 1);
        }
        value
    }
}

impl Ord for EvalVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.counts
            .len()
            .cmp(&other.counts.len())
            .then_with(|| self.counts.iter().rev().cmp(other.counts.iter().rev()))
    }
}

impl PartialOrd for EvalVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EvalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits: Vec<String> = self.counts.iter().rev().map(u32::to_string).collect();
        write!(f, "[{}]", digits.join(", "))
    }
}

impl Serialize for EvalVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.counts.iter().rev())
    }
}

/// Lexicographic comparison, highest rank most significant.
pub fn w_compare(a: &EvalVector, b: &EvalVector) -> Result<Ordering, EvalError> {
    if a.num_ranks() != b.num_ranks() {
        return Err(EvalError::RankMismatch { left: a.num_ranks(), right: b.num_ranks() });
    }
    Ok(a.cmp(b))
}
