//! Assume-guarantee profiles over specification structures.
//!
//! An agent guarantees to act by one graded structure and assumes that
//! every other agent's structure contains certain properties, has a given
//! property as its greatest element, and orders some pairs. A group of
//! profiles is compatible when each guarantee meets every other agent's
//! assumptions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::evaluator::{rank_partition, EvalError, EvalVector, RankPartition};
use crate::exec::{self, Execution};
use crate::poset::{Poset, PosetError, PropertyId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContractError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("compatibility needs at least two profiles, got {0}")]
    TooFewProfiles(usize),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
}

/// Constraints an agent places on the structures of the agents around it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssumptionConstraint {
    pub required: BTreeSet<PropertyId>,
    pub top: PropertyId,
    pub extra_orders: BTreeSet<(PropertyId, PropertyId)>,
}

fn id(s: &str) -> PropertyId {
    PropertyId::new(s).expect("static ids are valid")
}

impl Default for AssumptionConstraint {
    /// Safety and lawfulness present, safety greatest, lawfulness below safety.
    fn default() -> Self {
        AssumptionConstraint {
            required: [id("safety"), id("lawfulness")].into_iter().collect(),
            top: id("safety"),
            extra_orders: [(id("lawfulness"), id("safety"))].into_iter().collect(),
        }
    }
}

impl AssumptionConstraint {
    /// The top property is always added to the required set.
    pub fn new(
        required: BTreeSet<PropertyId>,
        top: PropertyId,
        extra_orders: BTreeSet<(PropertyId, PropertyId)>,
    ) -> Self {
        let mut required = required;
        required.insert(top.clone());
        AssumptionConstraint { required, top, extra_orders }
    }
}

/// One reason a structure falls outside an assumption set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AssumptionFailure {
    MissingProperty { property: PropertyId },
    TopNotGreatest { top: PropertyId, unrelated: PropertyId },
    OrderMissing { lower: PropertyId, upper: PropertyId },
}

impl fmt::Display for AssumptionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssumptionFailure::MissingProperty { property } => write!(f, "missing property `{property}`"),
            AssumptionFailure::TopNotGreatest { top, unrelated } => {
                write!(f, "`{unrelated}` is not below `{top}`")
            }
            AssumptionFailure::OrderMissing { lower, upper } => write!(f, "`{lower}` is not below `{upper}`"),
        }
    }
}

/// Every way `s` fails `c`; empty when `s` belongs to the assumption set.
pub fn assumption_failures(s: &Poset, c: &AssumptionConstraint) -> Result<Vec<AssumptionFailure>, ContractError> {
    s.ranks()?;
    let mut failures: Vec<AssumptionFailure> = c
        .required
        .iter()
        .filter(|p| !s.contains(p.as_str()))
        .map(|p| AssumptionFailure::MissingProperty { property: p.clone() })
        .collect();
    if let Ok(top) = s.index_of(c.top.as_str()) {
        for i in (0..s.len()).filter(|&i| !s.leq_idx(i, top)) {
            failures.push(AssumptionFailure::TopNotGreatest { top: c.top.clone(), unrelated: s.name(i).clone() });
        }
    }
    for (lower, upper) in &c.extra_orders {
        if !s.leq(lower.as_str(), upper.as_str()).unwrap_or(false) {
            failures.push(AssumptionFailure::OrderMissing { lower: lower.clone(), upper: upper.clone() });
        }
    }
    Ok(failures)
}

/// Membership of a graded structure in the assumption set described by `c`.
pub fn satisfies_assumption(s: &Poset, c: &AssumptionConstraint) -> Result<bool, ContractError> {
    Ok(assumption_failures(s, c)?.is_empty())
}

/// An agent's assumptions about others and its own guaranteed structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AGProfile {
    agent_id: String,
    assumptions: AssumptionConstraint,
    guarantee: Poset,
    partition: RankPartition,
}

impl AGProfile {
    /// Fails unless `guarantee` is graded.
    pub fn new(
        agent_id: impl Into<String>,
        assumptions: AssumptionConstraint,
        guarantee: Poset,
    ) -> Result<Self, ContractError> {
        guarantee.ranks()?;
        let partition = rank_partition(&guarantee)?;
        Ok(AGProfile { agent_id: agent_id.into(), assumptions, guarantee, partition })
    }

    pub fn agent_id(&self) -> &str {
        &self.agent_id
    }

    pub fn assumptions(&self) -> &AssumptionConstraint {
        &self.assumptions
    }

    pub fn guarantee(&self) -> &Poset {
        &self.guarantee
    }

    pub fn partition(&self) -> &RankPartition {
        &self.partition
    }
}

/// A guarantor whose structure misses an assumer's assumptions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncompatiblePair {
    pub guarantor: String,
    pub assumer: String,
    pub failures: Vec<AssumptionFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "pairs", rename_all = "snake_case")]
pub enum Compatibility {
    Compatible,
    Incompatible(Vec<IncompatiblePair>),
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible)
    }
}

/// Checks every ordered pair `(guarantor, assumer)` of distinct profiles.
pub fn compatible(profiles: &[AGProfile]) -> Result<Compatibility, ContractError> {
    if profiles.len() < 2 {
        return Err(ContractError::TooFewProfiles(profiles.len()));
    }
    let pairs: Vec<(usize, usize)> = (0..profiles.len())
        .flat_map(|j| (0..profiles.len()).filter(move |&i| i != j).map(move |i| (j, i)))
        .collect();
    let checked = exec::map_slice(Execution::default(), &pairs, |&(j, i)| {
        assumption_failures(&profiles[j].guarantee, &profiles[i].assumptions).map(|f| (j, i, f))
    });
    let mut failing = Vec::new();
    for result in checked {
        let (j, i, failures) = result?;
        if !failures.is_empty() {
            failing.push(IncompatiblePair {
                guarantor: profiles[j].agent_id.clone(),
                assumer: profiles[i].agent_id.clone(),
                failures,
            });
        }
    }
    Ok(if failing.is_empty() { Compatibility::Compatible } else { Compatibility::Incompatible(failing) })
}

/// Whether the chosen action is strictly dominated under the agent's own
/// structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlameVerdict {
    pub agent_id: String,
    pub blameworthy: bool,
    pub chosen_action: String,
    pub chosen_vector: EvalVector,
    pub dominating_action: Option<String>,
    pub dominating_vector: Option<EvalVector>,
}

/// Compares the chosen action against every available one. The dominating
/// action reported is the best available (first by name among equals).
pub fn assign_blame(
    profile: &AGProfile,
    available: &BTreeMap<String, BTreeSet<PropertyId>>,
    chosen: &str,
) -> Result<BlameVerdict, ContractError> {
    let chosen_set = available.get(chosen).ok_or_else(|| ContractError::UnknownAction(chosen.to_string()))?;
    let chosen_vector = profile.partition.evaluate(chosen_set)?;
    let mut best: Option<(&String, EvalVector)> = None;
    for (action, satisfied) in available {
        let v = profile.partition.evaluate(satisfied)?;
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((action, v));
        }
    }
    let (best_action, best_vector) = best.expect("chosen action is available");
    let blameworthy = best_vector > chosen_vector;
    Ok(BlameVerdict {
        agent_id: profile.agent_id.clone(),
        blameworthy,
        chosen_action: chosen.to_string(),
        chosen_vector,
        dominating_action: blameworthy.then(|| best_action.clone()),
        dominating_vector: blameworthy.then_some(best_vector),
    })
}

/// The road-axiom root structures: an assumption-side structure (for
/// instance an ambulance) and a civilian guarantee structure.
///
/// Assumption side: lawfulness < courtesy < {no-delay, well-being} < safety.
/// Guarantee side: {fuel-econ, local-etiquette} < {comfort, no-delay,
/// courtesy} < lawfulness < no-deadlock < safety, with fuel-econ under
/// comfort and local-etiquette under no-delay and courtesy.
pub fn axioms_root_structures() -> (Poset, Poset) {
    let assumption = Poset::new(
        ["safety", "no-delay", "well-being", "courtesy", "lawfulness"],
        [
            ("no-delay", "safety"),
            ("well-being", "safety"),
            ("courtesy", "no-delay"),
            ("courtesy", "well-being"),
            ("lawfulness", "courtesy"),
        ],
    )
    .expect("static structure");
    let guarantee = Poset::new(
        [
            "safety",
            "no-deadlock",
            "lawfulness",
            "comfort",
            "no-delay",
            "courtesy",
            "fuel-econ",
            "local-etiquette",
        ],
        [
            ("no-deadlock", "safety"),
            ("lawfulness", "no-deadlock"),
            ("comfort", "lawfulness"),
            ("no-delay", "lawfulness"),
            ("courtesy", "lawfulness"),
            ("fuel-econ", "comfort"),
            ("local-etiquette", "no-delay"),
            ("local-etiquette", "courtesy"),
        ],
    )
    .expect("static structure");
    (assumption, guarantee)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[&str]) -> BTreeSet<PropertyId> {
        ids.iter().map(|s| id(s)).collect()
    }

    #[test]
    fn root_structures_shape() {
        let (assume, guarantee) = axioms_root_structures();
        assert!(guarantee.is_graded());
        assert_eq!(guarantee.maximal_chain_lengths(), vec![5]);
        assert!(assume.is_graded());
        assert_eq!(assume.maximal_chain_lengths(), vec![4]);
        let c = AssumptionConstraint::default();
        assert!(satisfies_assumption(&guarantee, &c).unwrap());
        assert!(satisfies_assumption(&assume, &c).unwrap());
    }

    #[test]
    fn missing_lawfulness_fails() {
        let s = Poset::new(["comfort", "safety"], [("comfort", "safety")]).unwrap();
        let failures = assumption_failures(&s, &AssumptionConstraint::default()).unwrap();
        assert!(failures.contains(&AssumptionFailure::MissingProperty { property: id("lawfulness") }));
        assert!(failures.contains(&AssumptionFailure::OrderMissing { lower: id("lawfulness"), upper: id("safety") }));
    }

    #[test]
    fn safety_sharing_the_top_level_fails() {
        let s = Poset::new(
            ["lawfulness", "safety", "courtesy"],
            [("lawfulness", "safety"), ("lawfulness", "courtesy")],
        )
        .unwrap();
        assert!(s.is_graded());
        assert_eq!(
            assumption_failures(&s, &AssumptionConstraint::default()).unwrap(),
            vec![AssumptionFailure::TopNotGreatest { top: id("safety"), unrelated: id("courtesy") }]
        );
    }

    #[test]
    fn ungraded_structures_are_rejected() {
        let s = Poset::new(["lawfulness", "safety", "x"], [("lawfulness", "safety")]).unwrap();
        assert!(matches!(
            satisfies_assumption(&s, &AssumptionConstraint::default()),
            Err(ContractError::Poset(PosetError::NotGraded { .. }))
        ));
        assert!(AGProfile::new("x", AssumptionConstraint::default(), s).is_err());
    }

    #[test]
    fn top_is_always_required() {
        let c = AssumptionConstraint::new(BTreeSet::new(), id("no-collision"), BTreeSet::new());
        assert!(c.required.contains(&id("no-collision")));
    }

    #[test]
    fn compatibility_checks() {
        let (_, guarantee) = axioms_root_structures();
        let a = AGProfile::new("a", AssumptionConstraint::default(), guarantee.clone()).unwrap();
        let b = AGProfile::new("b", AssumptionConstraint::default(), guarantee).unwrap();
        assert_eq!(compatible(&[a.clone(), b.clone()]).unwrap(), Compatibility::Compatible);
        assert_eq!(compatible(std::slice::from_ref(&a)).unwrap_err(), ContractError::TooFewProfiles(1));

        let rude = Poset::new(
            ["lawfulness", "safety", "courtesy"],
            [("lawfulness", "safety"), ("safety", "courtesy")],
        )
        .unwrap();
        let c = AGProfile::new("c", AssumptionConstraint::default(), rude).unwrap();
        let Compatibility::Incompatible(pairs) = compatible(&[a, b, c]).unwrap() else {
            panic!("courtesy above safety must be flagged");
        };
        let flagged: Vec<(&str, &str)> = pairs.iter().map(|p| (p.guarantor.as_str(), p.assumer.as_str())).collect();
        assert_eq!(flagged, vec![("c", "a"), ("c", "b")]);
    }

    #[test]
    fn blame_examples() {
        let s = Poset::new(["low", "mid", "top"], [("low", "mid"), ("mid", "top")]).unwrap();
        let profile = AGProfile::new("y", AssumptionConstraint::default(), s).unwrap();
        let actions: BTreeMap<String, BTreeSet<PropertyId>> = [
            ("stay".to_string(), set(&["top", "low"])),
            ("pass".to_string(), set(&[])),
        ]
        .into_iter()
        .collect();
        let v = assign_blame(&profile, &actions, "pass").unwrap();
        assert!(v.blameworthy);
        assert_eq!(v.dominating_action.as_deref(), Some("stay"));
        assert_eq!(v.chosen_vector, EvalVector::from_most_significant(&[0, 0, 0]));
        assert_eq!(v.dominating_vector, Some(EvalVector::from_most_significant(&[1, 0, 1])));

        let v = assign_blame(&profile, &actions, "stay").unwrap();
        assert!(!v.blameworthy && v.dominating_action.is_none());

        let tied: BTreeMap<String, BTreeSet<PropertyId>> =
            [("a".to_string(), set(&["mid"])), ("b".to_string(), set(&["mid"]))].into_iter().collect();
        assert!(!assign_blame(&profile, &tied, "b").unwrap().blameworthy);
        assert_eq!(
            assign_blame(&profile, &tied, "zz").unwrap_err(),
            ContractError::UnknownAction("zz".into())
        );
    }
}
