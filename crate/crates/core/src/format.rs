//! Line-oriented text formats.
//!
//! A file is a sequence of blocks, each opened by a header line. `#` starts
//! a comment; blank lines are ignored.
//!
//! ```text
//! structure road
//! prop safety
//! prop lawfulness
//! rel lawfulness safety
//!
//! profile car-a
//! guarantee road
//! assume require lawfulness
//! assume top safety
//! assume order lawfulness safety
//!
//! game debris
//! agent x structure sx
//! agent y structure sy
//! actions x move accelerate
//! actions y stay pass
//! belief * move,stay x x-top,x-mid
//! truth move,stay y none
//! ```
//!
//! `belief *` writes the entry into every agent's belief table. Profiles
//! without `assume` lines of a kind take the default for that kind. Blocks
//! may refer to structures defined later or in another file.
//!
//! Evaluator tables are a separate format of `eval <score> <subset|empty>`
//! lines with integer scores.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::contracts::{AGProfile, AssumptionConstraint};
use crate::evaluator::EvaluatorTable;
use crate::game::{GameAgent, GameScenario, OracleTable};
use crate::poset::{ElementSet, Poset, PropertyId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("{file}: {message}")]
    Io { file: String, message: String },
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("{file}:{line}: {kind} `{name}` is not defined")]
    DanglingReference { file: String, line: usize, kind: &'static str, name: String },
}

#[derive(Debug, Clone, Copy)]
struct Loc<'a> {
    file: &'a str,
    line: usize,
}

impl Loc<'_> {
    fn err(self, message: impl Into<String>) -> FormatError {
        FormatError::Parse { file: self.file.to_string(), line: self.line, message: message.into() }
    }

    fn dangling(self, kind: &'static str, name: &str) -> FormatError {
        FormatError::DanglingReference { file: self.file.to_string(), line: self.line, kind, name: name.to_string() }
    }
}

#[derive(Debug, Clone)]
struct Owned {
    file: String,
    line: usize,
}

impl Owned {
    fn loc(&self) -> Loc<'_> {
        Loc { file: &self.file, line: self.line }
    }
}

#[derive(Debug)]
struct RawStructure {
    at: Owned,
    props: Vec<String>,
    rels: Vec<(String, String, Owned)>,
}

#[derive(Debug)]
struct RawProfile {
    at: Owned,
    guarantee: Option<(String, Owned)>,
    required: Vec<PropertyId>,
    top: Option<PropertyId>,
    orders: Vec<(PropertyId, PropertyId)>,
}

#[derive(Debug)]
struct RawEntry {
    at: Owned,
    observer: Option<String>,
    profile: Vec<String>,
    agent: String,
    satisfied: BTreeSet<PropertyId>,
}

#[derive(Debug)]
struct RawGame {
    at: Owned,
    agents: Vec<(String, String, Owned)>,
    actions: BTreeMap<String, (Vec<String>, Owned)>,
    entries: Vec<RawEntry>,
}

enum Block {
    Structure(String, RawStructure),
    Profile(String, RawProfile),
    Game(String, RawGame),
}

/// Everything loaded from a set of files, with cross-references resolved.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub structures: BTreeMap<String, Poset>,
    pub profiles: BTreeMap<String, AGProfile>,
    pub scenarios: BTreeMap<String, GameScenario>,
}

fn tokens(line: &str) -> Vec<&str> {
    line.split('#').next().unwrap_or("").split_whitespace().collect()
}

fn property(loc: Loc<'_>, s: &str) -> Result<PropertyId, FormatError> {
    PropertyId::new(s).map_err(|e| loc.err(e.to_string()))
}

fn property_list(loc: Loc<'_>, s: &str) -> Result<BTreeSet<PropertyId>, FormatError> {
    if s == "none" || s == "empty" {
        return Ok(BTreeSet::new());
    }
    s.split(',').map(|p| property(loc, p)).collect()
}

fn profile_list(s: &str) -> Vec<String> {
    s.split(',').map(str::to_string).collect()
}

fn parse_blocks(file: &str, text: &str) -> Result<Vec<Block>, FormatError> {
    let mut blocks: Vec<Block> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let loc = Loc { file, line: i + 1 };
        let at = Owned { file: file.to_string(), line: i + 1 };
        let t = tokens(raw);
        let Some(&keyword) = t.first() else { continue };
        let arity = |n: usize| -> Result<(), FormatError> {
            if t.len() == n {
                Ok(())
            } else {
                Err(loc.err(format!("`{keyword}` takes {} argument(s), got {}", n - 1, t.len() - 1)))
            }
        };
        match keyword {
            "structure" => {
                arity(2)?;
                blocks.push(Block::Structure(t[1].to_string(), RawStructure { at, props: vec![], rels: vec![] }));
            }
            "profile" => {
                arity(2)?;
                blocks.push(Block::Profile(
                    t[1].to_string(),
                    RawProfile { at, guarantee: None, required: vec![], top: None, orders: vec![] },
                ));
            }
            "game" => {
                arity(2)?;
                blocks.push(Block::Game(
                    t[1].to_string(),
                    RawGame { at, agents: vec![], actions: BTreeMap::new(), entries: vec![] },
                ));
            }
            _ => match blocks.last_mut() {
                None => return Err(loc.err(format!("`{keyword}` outside of a block"))),
                Some(Block::Structure(_, s)) => match keyword {
                    "prop" => {
                        arity(2)?;
                        property(loc, t[1])?;
                        if s.props.iter().any(|p| p == t[1]) {
                            return Err(loc.err(format!("duplicate prop `{}`", t[1])));
                        }
                        s.props.push(t[1].to_string());
                    }
                    "rel" => {
                        arity(3)?;
                        s.rels.push((t[1].to_string(), t[2].to_string(), at));
                    }
                    _ => return Err(loc.err(format!("unexpected `{keyword}` in a structure block"))),
                },
                Some(Block::Profile(_, p)) => match keyword {
                    "guarantee" => {
                        arity(2)?;
                        if p.guarantee.is_some() {
                            return Err(loc.err("duplicate `guarantee`"));
                        }
                        p.guarantee = Some((t[1].to_string(), at));
                    }
                    "assume" => match t.get(1).copied() {
                        Some("require") => {
                            arity(3)?;
                            p.required.push(property(loc, t[2])?);
                        }
                        Some("top") => {
                            arity(3)?;
                            if p.top.is_some() {
                                return Err(loc.err("duplicate `assume top`"));
                            }
                            p.top = Some(property(loc, t[2])?);
                        }
                        Some("order") => {
                            arity(4)?;
                            p.orders.push((property(loc, t[2])?, property(loc, t[3])?));
                        }
                        _ => return Err(loc.err("expected `assume require|top|order`")),
                    },
                    _ => return Err(loc.err(format!("unexpected `{keyword}` in a profile block"))),
                },
                Some(Block::Game(_, g)) => match keyword {
                    "agent" => {
                        arity(4)?;
                        if t[2] != "structure" {
                            return Err(loc.err("expected `agent <id> structure <name>`"));
                        }
                        if g.agents.iter().any(|(id, _, _)| id == t[1]) {
                            return Err(loc.err(format!("duplicate agent `{}`", t[1])));
                        }
                        g.agents.push((t[1].to_string(), t[3].to_string(), at));
                    }
                    "actions" => {
                        if t.len() < 3 {
                            return Err(loc.err("expected `actions <agent> <action>..`"));
                        }
                        let acts: Vec<String> = t[2..].iter().map(|s| s.to_string()).collect();
                        if acts.iter().collect::<BTreeSet<_>>().len() != acts.len() {
                            return Err(loc.err("duplicate action name"));
                        }
                        if g.actions.insert(t[1].to_string(), (acts, at)).is_some() {
                            return Err(loc.err(format!("duplicate `actions` for `{}`", t[1])));
                        }
                    }
                    "belief" => {
                        arity(5)?;
                        g.entries.push(RawEntry {
                            at,
                            observer: Some(t[1].to_string()),
                            profile: profile_list(t[2]),
                            agent: t[3].to_string(),
                            satisfied: property_list(loc, t[4])?,
                        });
                    }
                    "truth" => {
                        arity(4)?;
                        g.entries.push(RawEntry {
                            at,
                            observer: None,
                            profile: profile_list(t[1]),
                            agent: t[2].to_string(),
                            satisfied: property_list(loc, t[3])?,
                        });
                    }
                    _ => return Err(loc.err(format!("unexpected `{keyword}` in a game block"))),
                },
            },
        }
    }
    Ok(blocks)
}

fn build_structure(s: &RawStructure) -> Result<Poset, FormatError> {
    if s.props.is_empty() {
        return Err(s.at.loc().err("structure has no `prop` lines"));
    }
    for (lo, hi, at) in &s.rels {
        for end in [lo, hi] {
            if !s.props.contains(end) {
                return Err(at.loc().err(format!("unknown prop `{end}`")));
            }
        }
    }
    let rels: Vec<(&str, &str)> = s.rels.iter().map(|(a, b, _)| (a.as_str(), b.as_str())).collect();
    Poset::new(&s.props, rels).map_err(|e| s.at.loc().err(e.to_string()))
}

fn build_profile(
    agent: &str,
    p: &RawProfile,
    structures: &BTreeMap<String, Poset>,
) -> Result<AGProfile, FormatError> {
    let (name, at) = p.guarantee.as_ref().ok_or_else(|| p.at.loc().err("profile has no `guarantee` line"))?;
    let guarantee = structures.get(name).ok_or_else(|| at.loc().dangling("structure", name))?;
    let defaults = AssumptionConstraint::default();
    let required = if p.required.is_empty() { defaults.required } else { p.required.iter().cloned().collect() };
    let top = p.top.clone().unwrap_or(defaults.top);
    let orders = if p.orders.is_empty() { defaults.extra_orders } else { p.orders.iter().cloned().collect() };
    AGProfile::new(agent, AssumptionConstraint::new(required, top, orders), guarantee.clone())
        .map_err(|e| at.loc().err(format!("guarantee `{name}`: {e}")))
}

fn build_game(name: &str, g: &RawGame, structures: &BTreeMap<String, Poset>) -> Result<GameScenario, FormatError> {
    let mut agents = Vec::new();
    for (id, structure, at) in &g.agents {
        let poset = structures.get(structure).ok_or_else(|| at.loc().dangling("structure", structure))?;
        let (actions, _) = g.actions.get(id).ok_or_else(|| at.loc().err(format!("no `actions` line for `{id}`")))?;
        agents.push(GameAgent::new(id, poset.clone(), actions.clone()).map_err(|e| at.loc().err(e.to_string()))?);
    }
    for (id, (_, at)) in &g.actions {
        if !g.agents.iter().any(|(a, _, _)| a == id) {
            return Err(at.loc().dangling("agent", id));
        }
    }
    let mut sc = GameScenario::new(name, agents).map_err(|e| g.at.loc().err(e.to_string()))?;
    let ids: Vec<String> = sc.agents().iter().map(|a| a.id.clone()).collect();
    let mut beliefs: BTreeMap<String, OracleTable> = BTreeMap::new();
    let mut truth: Option<OracleTable> = None;
    for e in &g.entries {
        let loc = e.at.loc();
        let observers: Vec<String> = match &e.observer {
            Some(o) if o == "*" => ids.clone(),
            Some(o) if ids.contains(o) => vec![o.clone()],
            Some(o) => return Err(loc.dangling("agent", o)),
            None => vec![],
        };
        let mut single = OracleTable::new();
        single.insert(e.profile.clone(), &e.agent, e.satisfied.clone());
        sc.validate_table(&single).map_err(|err| loc.err(err.to_string()))?;
        let targets: Vec<Option<&str>> = match &e.observer {
            None => vec![None],
            Some(_) => observers.iter().map(|o| Some(o.as_str())).collect(),
        };
        for target in targets {
            let table = match target {
                None => truth.get_or_insert_with(OracleTable::new),
                Some(o) => beliefs.entry(o.to_string()).or_default(),
            };
            if table.insert(e.profile.clone(), &e.agent, e.satisfied.clone()).is_some() {
                return Err(loc.err(format!("duplicate entry for `{}` at ({})", e.agent, e.profile.join(","))));
            }
        }
    }
    for (observer, table) in beliefs {
        sc.set_belief(&observer, table).expect("observers are agents");
    }
    if let Some(t) = truth {
        sc.set_ground_truth(t);
    }
    Ok(sc)
}

impl Workspace {
    /// Parses and links the given sources, `(file name, contents)`.
    pub fn from_sources<N: AsRef<str>, T: AsRef<str>>(sources: &[(N, T)]) -> Result<Self, FormatError> {
        let mut structures_raw: BTreeMap<String, RawStructure> = BTreeMap::new();
        let mut profiles_raw: BTreeMap<String, RawProfile> = BTreeMap::new();
        let mut games_raw: BTreeMap<String, RawGame> = BTreeMap::new();
        for (file, text) in sources {
            for block in parse_blocks(file.as_ref(), text.as_ref())? {
                let (kind, name, at) = match block {
                    Block::Structure(name, s) => {
                        let at = s.at.clone();
                        ("structure", structures_raw.insert(name.clone(), s).map(|_| name), at)
                    }
                    Block::Profile(name, p) => {
                        let at = p.at.clone();
                        ("profile", profiles_raw.insert(name.clone(), p).map(|_| name), at)
                    }
                    Block::Game(name, g) => {
                        let at = g.at.clone();
                        ("game", games_raw.insert(name.clone(), g).map(|_| name), at)
                    }
                };
                if let Some(name) = name {
                    return Err(at.loc().err(format!("duplicate {kind} `{name}`")));
                }
            }
        }
        let mut ws = Workspace::default();
        for (name, s) in &structures_raw {
            ws.structures.insert(name.clone(), build_structure(s)?);
        }
        for (agent, p) in &profiles_raw {
            ws.profiles.insert(agent.clone(), build_profile(agent, p, &ws.structures)?);
        }
        for (name, g) in &games_raw {
            ws.scenarios.insert(name.clone(), build_game(name, g, &ws.structures)?);
        }
        Ok(ws)
    }

    pub fn parse_str(file: &str, text: &str) -> Result<Self, FormatError> {
        Self::from_sources(&[(file, text)])
    }

    /// Reads, parses and links every file.
    pub fn parse_files<P: AsRef<Path>>(paths: &[P]) -> Result<Self, FormatError> {
        let sources = paths
            .iter()
            .map(|p| {
                let name = p.as_ref().display().to_string();
                std::fs::read_to_string(p)
                    .map(|text| (name.clone(), text))
                    .map_err(|e| FormatError::Io { file: name, message: e.to_string() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_sources(&sources)
    }
}

/// A structure block: sorted `prop` lines, then the cover relation as sorted
/// `rel` lines.
pub fn emit_structure(name: &str, p: &Poset) -> String {
    let mut out = format!("structure {name}\n");
    for id in p.names() {
        writeln!(out, "prop {id}").unwrap();
    }
    for (lo, hi) in p.covers() {
        writeln!(out, "rel {lo} {hi}").unwrap();
    }
    out
}

/// A profile block with every assumption spelled out.
pub fn emit_profile(profile: &AGProfile, guarantee_name: &str) -> String {
    let mut out = format!("profile {}\nguarantee {guarantee_name}\n", profile.agent_id());
    let c = profile.assumptions();
    for r in &c.required {
        writeln!(out, "assume require {r}").unwrap();
    }
    writeln!(out, "assume top {}", c.top).unwrap();
    for (lo, hi) in &c.extra_orders {
        writeln!(out, "assume order {lo} {hi}").unwrap();
    }
    out
}

/// Parses `eval <score> <p1,p2,..|empty>` lines into a total table over `p`.
pub fn parse_eval_table(file: &str, text: &str, p: &Poset) -> Result<EvaluatorTable<i64>, FormatError> {
    let mut entries: Vec<(ElementSet, i64)> = Vec::new();
    let mut seen: BTreeMap<u64, (i64, usize)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let loc = Loc { file, line: i + 1 };
        let t = tokens(raw);
        if t.is_empty() {
            continue;
        }
        if t[0] != "eval" || t.len() != 3 {
            return Err(loc.err("expected `eval <score> <subset|empty>`"));
        }
        let score: i64 = t[1].parse().map_err(|_| loc.err(format!("score `{}` is not an integer", t[1])))?;
        let names = property_list(loc, t[2])?;
        let set = p.set_of(names.iter().map(PropertyId::as_str)).map_err(|e| loc.err(e.to_string()))?;
        if let Some((prev, line)) = seen.insert(set.bits(), (score, i + 1)) {
            if prev != score {
                return Err(loc.err(format!("conflicts with line {line} for {}", p.format_set(set))));
            }
        }
        entries.push((set, score));
    }
    EvaluatorTable::from_entries(p, entries).map_err(|e| FormatError::Parse {
        file: file.to_string(),
        line: 0,
        message: e.to_string(),
    })
}
