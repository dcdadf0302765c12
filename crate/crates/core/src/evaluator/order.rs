use serde::Serialize;

use super::{EvalError, EvalVector, RankPartition};
use crate::exec::{self, Execution};
use crate::poset::ElementSet;

/// Default cap on the number of elements for powerset enumeration.
pub const DEFAULT_POWERSET_BOUND: usize = 12;
/// Hard cap regardless of the configured bound.
pub const MAX_POWERSET: usize = 24;

/// Subsets sharing one evaluation vector, members in ascending bitmask order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceClass {
    pub vector: EvalVector,
    #[serde(skip)]
    pub members: Vec<ElementSet>,
}

/// The weak order on all subsets induced by the rank partition: subsets
/// grouped by equal vectors, classes in ascending order.
pub fn powerset_order(rp: &RankPartition, bound: usize) -> Result<Vec<EquivalenceClass>, EvalError> {
    powerset_order_with(rp, bound, Execution::default())
}

pub fn powerset_order_with(
    rp: &RankPartition,
    bound: usize,
    exec: Execution,
) -> Result<Vec<EquivalenceClass>, EvalError> {
    let n = rp.num_elements();
    let bound = bound.min(MAX_POWERSET);
    if n > bound {
        return Err(EvalError::TooLarge { size: n, bound });
    }
    let mut scored = exec::map_range(exec, 0..1u64 << n, |bits| {
        let set = ElementSet::from_bits(bits);
        (rp.evaluate_set(set), set)
    });
    scored.sort_unstable();
    let mut classes: Vec<EquivalenceClass> = Vec::new();
    for (vector, set) in scored {
        match classes.last_mut() {
            Some(last) if last.vector == vector => last.members.push(set),
            _ => classes.push(EquivalenceClass { vector, members: vec![set] }),
        }
    }
    Ok(classes)
}
