//! Normal-form games between agents that rank outcomes by their own
//! specification structures.
//!
//! Each agent's payoff at a joint profile is the evaluation vector of the
//! properties an oracle table says it satisfies there. Agents may hold
//! different oracle tables (beliefs); an optional ground-truth table is used
//! to report what actually happens when each agent acts on its own belief.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::evaluator::{rank_partition, EvalError, EvalVector, RankPartition};
use crate::exec::{self, Execution};
use crate::poset::{Poset, PosetError, PropertyId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("a game needs at least two agents, got {0}")]
    TooFewAgents(usize),
    #[error("duplicate agent `{0}`")]
    DuplicateAgent(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("agent `{0}` has no actions")]
    NoActions(String),
    #[error("agent `{agent}` has no action `{action}`")]
    UnknownAction { agent: String, action: String },
    #[error("profile ({profile}) names {got} actions, expected {expected}")]
    ProfileArity { profile: String, got: usize, expected: usize },
    #[error("property `{property}` is not in the structure of agent `{agent}`")]
    UnknownProperty { agent: String, property: PropertyId },
    #[error("no belief table for agent `{0}`")]
    MissingBelief(String),
    #[error("oracle of `{observer}` has no entry for agent `{agent}` at ({profile})")]
    IncompleteOracle { observer: String, profile: String, agent: String },
    #[error("belief game of `{agent}` has several equilibria: {equilibria}")]
    AmbiguousEquilibria { agent: String, equilibria: String },
    #[error("belief game of `{0}` has no pure equilibrium")]
    NoEquilibrium(String),
}

/// An agent: its guarantee structure, the rank partition used to score it,
/// and its ordered action list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameAgent {
    pub id: String,
    pub structure: Poset,
    pub partition: RankPartition,
    pub actions: Vec<String>,
}

impl GameAgent {
    pub fn new(id: impl Into<String>, structure: Poset, actions: Vec<String>) -> Result<Self, GameError> {
        let id = id.into();
        if actions.is_empty() {
            return Err(GameError::NoActions(id));
        }
        let partition = rank_partition(&structure)?;
        Ok(GameAgent { id, structure, partition, actions })
    }

    fn action_index(&self, action: &str) -> Result<usize, GameError> {
        self.actions
            .iter()
            .position(|a| a == action)
            .ok_or_else(|| GameError::UnknownAction { agent: self.id.clone(), action: action.to_string() })
    }
}

/// Satisfied properties per (joint profile, agent), keyed by action and
/// agent names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleTable {
    entries: BTreeMap<(Vec<String>, String), BTreeSet<PropertyId>>,
}

impl OracleTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the previous entry, if any.
    pub fn insert(
        &mut self,
        profile: Vec<String>,
        agent: impl Into<String>,
        satisfied: BTreeSet<PropertyId>,
    ) -> Option<BTreeSet<PropertyId>> {
        self.entries.insert((profile, agent.into()), satisfied)
    }

    pub fn get(&self, profile: &[String], agent: &str) -> Option<&BTreeSet<PropertyId>> {
        self.entries.get(&(profile.to_vec(), agent.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[String], &str, &BTreeSet<PropertyId>)> {
        self.entries.iter().map(|((p, a), s)| (p.as_slice(), a.as_str(), s))
    }
}

/// Agents, their actions, each agent's belief table and an optional ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameScenario {
    pub name: String,
    agents: Vec<GameAgent>,
    beliefs: BTreeMap<String, OracleTable>,
    ground_truth: Option<OracleTable>,
}

impl GameScenario {
    pub fn new(name: impl Into<String>, agents: Vec<GameAgent>) -> Result<Self, GameError> {
        if agents.len() < 2 {
            return Err(GameError::TooFewAgents(agents.len()));
        }
        let mut seen = BTreeSet::new();
        for a in &agents {
            if !seen.insert(a.id.as_str()) {
                return Err(GameError::DuplicateAgent(a.id.clone()));
            }
        }
        Ok(GameScenario { name: name.into(), agents, beliefs: BTreeMap::new(), ground_truth: None })
    }

    pub fn agents(&self) -> &[GameAgent] {
        &self.agents
    }

    pub fn agent_index(&self, id: &str) -> Result<usize, GameError> {
        self.agents
            .iter()
            .position(|a| a.id == id)
            .ok_or_else(|| GameError::UnknownAgent(id.to_string()))
    }

    pub fn set_belief(&mut self, observer: &str, table: OracleTable) -> Result<(), GameError> {
        self.agent_index(observer)?;
        self.beliefs.insert(observer.to_string(), table);
        Ok(())
    }

    pub fn belief(&self, observer: &str) -> Option<&OracleTable> {
        self.beliefs.get(observer)
    }

    pub fn set_ground_truth(&mut self, table: OracleTable) {
        self.ground_truth = Some(table);
    }

    pub fn ground_truth(&self) -> Option<&OracleTable> {
        self.ground_truth.as_ref()
    }

    fn num_profiles(&self) -> usize {
        self.agents.iter().map(|a| a.actions.len()).product()
    }

    /// Action indices of the `index`-th profile, last agent varying fastest.
    fn profile_at(&self, mut index: usize) -> Vec<usize> {
        let mut profile = vec![0; self.agents.len()];
        for (slot, agent) in profile.iter_mut().zip(&self.agents).rev() {
            *slot = index % agent.actions.len();
            index /= agent.actions.len();
        }
        profile
    }

    fn names_of(&self, profile: &[usize]) -> Vec<String> {
        profile.iter().zip(&self.agents).map(|(&a, agent)| agent.actions[a].clone()).collect()
    }

    /// Action indices for a profile given by names.
    pub fn profile_of(&self, names: &[String]) -> Result<Vec<usize>, GameError> {
        if names.len() != self.agents.len() {
            return Err(GameError::ProfileArity {
                profile: names.join(","),
                got: names.len(),
                expected: self.agents.len(),
            });
        }
        names.iter().zip(&self.agents).map(|(n, a)| a.action_index(n)).collect()
    }

    /// Checks that every key of `table` names a valid profile and agent and
    /// every satisfied property belongs to that agent's structure.
    pub fn validate_table(&self, table: &OracleTable) -> Result<(), GameError> {
        for (profile, agent, satisfied) in table.iter() {
            self.profile_of(profile)?;
            let a = &self.agents[self.agent_index(agent)?];
            if let Some(p) = satisfied.iter().find(|p| !a.structure.contains(p.as_str())) {
                return Err(GameError::UnknownProperty { agent: a.id.clone(), property: p.clone() });
            }
        }
        Ok(())
    }

    fn payoffs_from(&self, observer: &str, table: &OracleTable) -> Result<PayoffMatrix, GameError> {
        self.validate_table(table)?;
        let rows = exec::map_range(Execution::default(), 0..self.num_profiles() as u64, |i| {
            let names = self.names_of(&self.profile_at(i as usize));
            self.agents
                .iter()
                .map(|agent| {
                    let satisfied = table.get(&names, &agent.id).ok_or_else(|| GameError::IncompleteOracle {
                        observer: observer.to_string(),
                        profile: names.join(","),
                        agent: agent.id.clone(),
                    })?;
                    Ok(agent.partition.evaluate(satisfied)?)
                })
                .collect::<Result<Vec<EvalVector>, GameError>>()
        });
        Ok(PayoffMatrix {
            agents: self.agents.iter().map(|a| a.id.clone()).collect(),
            actions: self.agents.iter().map(|a| a.actions.clone()).collect(),
            payoffs: rows.into_iter().collect::<Result<_, _>>()?,
        })
    }
}

/// Evaluation vectors of every agent at every joint profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffMatrix {
    agents: Vec<String>,
    actions: Vec<Vec<String>>,
    payoffs: Vec<Vec<EvalVector>>,
}

impl PayoffMatrix {
    /// Builds a matrix directly; `payoffs` lists profiles with the last
    /// agent's action varying fastest.
    pub fn new(
        agents: Vec<String>,
        actions: Vec<Vec<String>>,
        payoffs: Vec<Vec<EvalVector>>,
    ) -> Result<Self, GameError> {
        if agents.len() < 2 {
            return Err(GameError::TooFewAgents(agents.len()));
        }
        assert_eq!(agents.len(), actions.len(), "one action list per agent");
        if let Some(i) = actions.iter().position(Vec::is_empty) {
            return Err(GameError::NoActions(agents[i].clone()));
        }
        let expected: usize = actions.iter().map(Vec::len).product();
        assert_eq!(payoffs.len(), expected, "one payoff row per joint profile");
        assert!(payoffs.iter().all(|row| row.len() == agents.len()), "one vector per agent");
        Ok(PayoffMatrix { agents, actions, payoffs })
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn actions(&self) -> &[Vec<String>] {
        &self.actions
    }

    pub fn num_profiles(&self) -> usize {
        self.payoffs.len()
    }

    pub fn profile_at(&self, mut index: usize) -> Vec<usize> {
        let mut profile = vec![0; self.actions.len()];
        for (slot, acts) in profile.iter_mut().zip(&self.actions).rev() {
            *slot = index % acts.len();
            index /= acts.len();
        }
        profile
    }

    pub fn index_of(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.actions).fold(0, |acc, (&a, acts)| acc * acts.len() + a)
    }

    pub fn payoff(&self, profile: &[usize]) -> &[EvalVector] {
        &self.payoffs[self.index_of(profile)]
    }

    pub fn names(&self, profile: &[usize]) -> Vec<String> {
        profile.iter().zip(&self.actions).map(|(&a, acts)| acts[a].clone()).collect()
    }

    fn is_nash(&self, profile: &[usize]) -> bool {
        let here = self.payoff(profile);
        (0..self.agents.len()).all(|agent| {
            let mut deviation = profile.to_vec();
            (0..self.actions[agent].len()).all(|alt| {
                deviation[agent] = alt;
                self.payoff(&deviation)[agent] <= here[agent]
            })
        })
    }

    fn is_dominated(&self, profile: &[usize]) -> bool {
        let here = self.payoff(profile);
        self.payoffs.iter().any(|other| {
            other.iter().zip(here).all(|(o, h)| o >= h) && other.iter().zip(here).any(|(o, h)| o > h)
        })
    }
}

/// Profiles (as action indices, in profile order) where no agent has a
/// strictly better unilateral deviation.
pub fn pure_nash(pm: &PayoffMatrix) -> Vec<Vec<usize>> {
    pure_nash_with(pm, Execution::default())
}

pub fn pure_nash_with(pm: &PayoffMatrix, exec: Execution) -> Vec<Vec<usize>> {
    exec::map_range(exec, 0..pm.num_profiles() as u64, |i| {
        let profile = pm.profile_at(i as usize);
        pm.is_nash(&profile).then_some(profile)
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Profiles no other profile weakly improves for every agent and strictly
/// for one.
pub fn pareto_efficient(pm: &PayoffMatrix) -> Vec<Vec<usize>> {
    pareto_efficient_with(pm, Execution::default())
}

pub fn pareto_efficient_with(pm: &PayoffMatrix, exec: Execution) -> Vec<Vec<usize>> {
    exec::map_range(exec, 0..pm.num_profiles() as u64, |i| {
        let profile = pm.profile_at(i as usize);
        (!pm.is_dominated(&profile)).then_some(profile)
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Payoffs of the game as `belief_of`'s oracle predicts it.
pub fn build_payoffs(sc: &GameScenario, belief_of: &str) -> Result<PayoffMatrix, GameError> {
    sc.agent_index(belief_of)?;
    let table = sc.belief(belief_of).ok_or_else(|| GameError::MissingBelief(belief_of.to_string()))?;
    sc.payoffs_from(belief_of, table)
}

/// Payoffs under the ground-truth table, if the scenario has one.
pub fn ground_truth_payoffs(sc: &GameScenario) -> Result<Option<PayoffMatrix>, GameError> {
    sc.ground_truth().map(|t| sc.payoffs_from("truth", t)).transpose()
}

/// How an agent picks an action when its belief game has no unique equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Fail with [`GameError::AmbiguousEquilibria`] or [`GameError::NoEquilibrium`].
    #[default]
    Refuse,
    /// The action whose worst outcome for the agent is best; earliest on ties.
    RiskAverse,
    /// The agent's action in the first equilibrium in profile order.
    IndexOrder,
}

impl std::str::FromStr for Selection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "refuse" => Ok(Selection::Refuse),
            "risk-averse" => Ok(Selection::RiskAverse),
            "index-order" => Ok(Selection::IndexOrder),
            other => Err(format!("unknown selection rule `{other}`")),
        }
    }
}

fn maximin(pm: &PayoffMatrix, agent: usize) -> usize {
    let worst = |action: usize| {
        (0..pm.num_profiles())
            .map(|i| pm.profile_at(i))
            .filter(|p| p[agent] == action)
            .map(|p| pm.payoff(&p)[agent].clone())
            .min()
            .expect("every action appears in some profile")
    };
    let mut best = 0;
    let mut best_worst = worst(0);
    for action in 1..pm.actions[agent].len() {
        let w = worst(action);
        if w > best_worst {
            best = action;
            best_worst = w;
        }
    }
    best
}

/// Properties of an agent's top rank left unsatisfied in ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub agent: String,
    pub unsatisfied_top: Vec<PropertyId>,
    pub vector: EvalVector,
}

/// What the realized profile does under ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConflictReport {
    pub realized: Vec<String>,
    pub conflicts: Vec<Conflict>,
}

impl ConflictReport {
    pub fn collision(&self) -> bool {
        !self.conflicts.is_empty()
    }
}

/// One agent's choice and the equilibria of its belief game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgentChoice {
    pub agent: String,
    pub action: String,
    pub belief_equilibria: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivergentOutcome {
    pub choices: Vec<AgentChoice>,
    pub report: Option<ConflictReport>,
}

/// Each agent solves the game under its own belief and plays its part of
/// that game's equilibrium; the joint result is checked against ground truth.
pub fn resolve_divergent(sc: &GameScenario, selection: Selection) -> Result<DivergentOutcome, GameError> {
    let mut choices = Vec::with_capacity(sc.agents.len());
    let mut realized = Vec::with_capacity(sc.agents.len());
    for (i, agent) in sc.agents.iter().enumerate() {
        let pm = build_payoffs(sc, &agent.id)?;
        let equilibria = pure_nash(&pm);
        let listed: Vec<Vec<String>> = equilibria.iter().map(|p| pm.names(p)).collect();
        let action = match (equilibria.as_slice(), selection) {
            ([only], _) => only[i],
            (_, Selection::RiskAverse) => maximin(&pm, i),
            ([first, ..], Selection::IndexOrder) => first[i],
            ([], _) => return Err(GameError::NoEquilibrium(agent.id.clone())),
            (_, Selection::Refuse) => {
                return Err(GameError::AmbiguousEquilibria {
                    agent: agent.id.clone(),
                    equilibria: listed.iter().map(|p| format!("({})", p.join(","))).collect::<Vec<_>>().join(" "),
                })
            }
        };
        realized.push(action);
        choices.push(AgentChoice { agent: agent.id.clone(), action: agent.actions[action].clone(), belief_equilibria: listed });
    }
    let report = match ground_truth_payoffs(sc)? {
        None => None,
        Some(truth) => {
            let names = sc.names_of(&realized);
            let table = sc.ground_truth().expect("truth payoffs imply a table");
            let conflicts = sc
                .agents
                .iter()
                .enumerate()
                .filter_map(|(i, agent)| {
                    let satisfied = table.get(&names, &agent.id).expect("validated as complete");
                    let unsatisfied_top: Vec<PropertyId> =
                        agent.partition.top_level().into_iter().filter(|p| !satisfied.contains(p)).collect();
                    (!unsatisfied_top.is_empty()).then(|| Conflict {
                        agent: agent.id.clone(),
                        unsatisfied_top,
                        vector: truth.payoff(&realized)[i].clone(),
                    })
                })
                .collect();
            Some(ConflictReport { realized: names, conflicts })
        }
    };
    Ok(DivergentOutcome { choices, report })
}

impl fmt::Display for PayoffMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.num_profiles() {
            let profile = self.profile_at(i);
            write!(f, "({})", self.names(&profile).join(","))?;
            for (agent, v) in self.agents.iter().zip(self.payoff(&profile)) {
                write!(f, " {agent}={v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
