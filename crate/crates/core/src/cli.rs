//! Command layer behind the `specstruct` binary.
//!
//! Every command loads the given files into a [`Workspace`], runs one
//! operation and prints a plain-text report, or JSON with `--json`. Exit
//! status is 0 on success, 1 on a negative verdict and 2 on bad input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::contracts::{assign_blame, compatible, AGProfile, Compatibility};
use crate::evaluator::{
    canonicalize, level_skipping_covers, powerset_order, rank_partition, verify_consistent_evaluator, w_compare,
    EvalError, Verdict, DEFAULT_POWERSET_BOUND,
};
use crate::format::{emit_structure, parse_eval_table, Workspace};
use crate::game::{build_payoffs, pareto_efficient, pure_nash, resolve_divergent, GameError, GameScenario, Selection};
use crate::poset::{Poset, PosetError, PropertyId};
use crate::refinement::{refine, repair, RefineError, RefinementRequest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "specstruct", version, about = "Specification structures, evaluators, contracts and games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Structure, profile and game files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Print a JSON report instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct StructureArg {
    /// Structure name; may be omitted when exactly one is loaded.
    #[arg(long, short)]
    pub structure: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gradedness and consistent evaluability, optionally verifying an evaluator table.
    Check {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        structure: StructureArg,
        /// File of `eval <score> <subset|empty>` lines to verify.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// The rank partition.
    Rank {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        structure: StructureArg,
    },
    /// All subsets grouped into equivalence classes, lowest first.
    Order {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        structure: StructureArg,
        /// Largest structure to enumerate.
        #[arg(long, default_value_t = DEFAULT_POWERSET_BOUND)]
        bound: usize,
    },
    /// Evaluation vectors of subsets.
    Eval {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        structure: StructureArg,
        /// Comma-separated subset (`empty` for none); repeatable.
        #[arg(long = "set", required = true)]
        sets: Vec<String>,
    },
    /// Compares two subsets.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        structure: StructureArg,
        /// Exactly two comma-separated subsets.
        #[arg(long = "set", required = true, num_args = 1)]
        sets: Vec<String>,
    },
    /// Graded structure with the same rank partition.
    Canonicalize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        structure: StructureArg,
    },
    /// Adds a property or comparison, repairing gradedness if needed.
    Refine {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        structure: StructureArg,
        /// New property name.
        #[arg(long, conflicts_with = "add_edge")]
        add_node: Option<String>,
        /// Existing properties below the new one (comma-separated).
        #[arg(long, requires = "add_node")]
        below: Option<String>,
        /// Existing properties above the new one (comma-separated).
        #[arg(long, requires = "add_node")]
        above: Option<String>,
        /// New comparison `LOWER UPPER`.
        #[arg(long, num_args = 2, value_names = ["LOWER", "UPPER"])]
        add_edge: Option<Vec<String>>,
        /// Largest repair to search for (default: twice the property count).
        #[arg(long)]
        budget: Option<usize>,
        /// Fail instead of repairing.
        #[arg(long)]
        no_repair: bool,
    },
    /// Compatibility of assume-guarantee profiles.
    ContractCheck {
        #[command(flatten)]
        common: Common,
        /// Profiles to check (default: all loaded).
        #[arg(long = "profile")]
        profiles: Vec<String>,
    },
    /// Whether a chosen action is strictly dominated under the agent's structure.
    Blame {
        #[command(flatten)]
        common: Common,
        /// Profile of the acting agent.
        #[arg(long)]
        profile: String,
        /// Available action as `name=p1,p2` (or `name=none`); repeatable.
        #[arg(long = "action", required = true)]
        actions: Vec<String>,
        /// Action taken.
        #[arg(long)]
        chosen: String,
    },
    /// Payoffs, pure Nash equilibria and Pareto-efficient profiles.
    GameSolve {
        #[command(flatten)]
        common: Common,
        /// Game name; may be omitted when exactly one is loaded.
        #[arg(long)]
        game: Option<String>,
        /// Whose belief table to use (default: the first agent).
        #[arg(long)]
        belief: Option<String>,
    },
    /// Each agent plays its own belief game; the result is checked against ground truth.
    GameDivergent {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        game: Option<String>,
        /// refuse, risk-averse or index-order.
        #[arg(long, default_value = "refuse")]
        selection: Selection,
    },
}

/// Exit status and the text written to stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    text: String,
    json: Value,
}

impl Report {
    fn new(code: i32, text: String, json: Value) -> Self {
        Report { code, text, json }
    }
}

type CmdResult = Result<Report, String>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: rendered }
            } else {
                Outcome { code, stdout: rendered, stderr: String::new() }
            }
        }
    }
}

pub fn execute(cmd: Command) -> Outcome {
    let json = common(&cmd).json;
    match dispatch(cmd) {
        Ok(report) => {
            let stdout = if json {
                let mut s = serde_json::to_string_pretty(&report.json).expect("reports serialize");
                s.push('\n');
                s
            } else {
                report.text
            };
            Outcome { code: report.code, stdout, stderr: String::new() }
        }
        Err(message) => Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {message}\n") },
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Check { common, .. }
        | Command::Rank { common, .. }
        | Command::Order { common, .. }
        | Command::Eval { common, .. }
        | Command::Compare { common, .. }
        | Command::Canonicalize { common, .. }
        | Command::Refine { common, .. }
        | Command::ContractCheck { common, .. }
        | Command::Blame { common, .. }
        | Command::GameSolve { common, .. }
        | Command::GameDivergent { common, .. } => common,
    }
}

fn load(common: &Common) -> Result<Workspace, String> {
    Workspace::parse_files(&common.files).map_err(|e| e.to_string())
}

fn pick<'a, T>(map: &'a BTreeMap<String, T>, name: Option<&str>, kind: &str) -> Result<(&'a str, &'a T), String> {
    match name {
        Some(n) => map.get_key_value(n).map(|(k, v)| (k.as_str(), v)).ok_or_else(|| format!("no {kind} named `{n}`")),
        None if map.len() == 1 => {
            let (k, v) = map.iter().next().expect("one entry");
            Ok((k.as_str(), v))
        }
        None if map.is_empty() => Err(format!("no {kind} loaded")),
        None => Err(format!(
            "several {kind}s loaded ({}); choose one with --{kind}",
            map.keys().cloned().collect::<Vec<_>>().join(", ")
        )),
    }
}

fn split_list(s: &str) -> Vec<&str> {
    if s == "empty" || s == "none" || s.is_empty() {
        Vec::new()
    } else {
        s.split(',').collect()
    }
}

fn ids(list: &[PropertyId]) -> Vec<String> {
    list.iter().map(ToString::to_string).collect()
}

fn dispatch(cmd: Command) -> CmdResult {
    match cmd {
        Command::Check { common, structure, table } => {
            let ws = load(&common)?;
            let (name, p) = pick(&ws.structures, structure.structure.as_deref(), "structure")?;
            check(name, p, table)
        }
        Command::Rank { common, structure } => {
            let ws = load(&common)?;
            let (name, p) = pick(&ws.structures, structure.structure.as_deref(), "structure")?;
            rank(name, p)
        }
        Command::Order { common, structure, bound } => {
            let ws = load(&common)?;
            let (name, p) = pick(&ws.structures, structure.structure.as_deref(), "structure")?;
            order(name, p, bound)
        }
        Command::Eval { common, structure, sets } => {
            let ws = load(&common)?;
            let (name, p) = pick(&ws.structures, structure.structure.as_deref(), "structure")?;
            eval(name, p, &sets)
        }
        Command::Compare { common, structure, sets } => {
            let ws = load(&common)?;
            let (name, p) = pick(&ws.structures, structure.structure.as_deref(), "structure")?;
            compare(name, p, &sets)
        }
        Command::Canonicalize { common, structure } => {
            let ws = load(&common)?;
            let (name, p) = pick(&ws.structures, structure.structure.as_deref(), "structure")?;
            canonical(name, p)
        }
        Command::Refine { common, structure, add_node, below, above, add_edge, budget, no_repair } => {
            let ws = load(&common)?;
            let (name, p) = pick(&ws.structures, structure.structure.as_deref(), "structure")?;
            let req = match (add_node, add_edge) {
                (Some(id), None) => RefinementRequest::add_node(
                    &id,
                    split_list(below.as_deref().unwrap_or("")),
                    split_list(above.as_deref().unwrap_or("")),
                ),
                (None, Some(edge)) => RefinementRequest::add_edge(&edge[0], &edge[1]),
                _ => return Err("refine needs exactly one of --add-node or --add-edge".into()),
            }
            .map_err(|e| e.to_string())?;
            refinement(name, p, &req, budget, no_repair)
        }
        Command::ContractCheck { common, profiles } => {
            let ws = load(&common)?;
            let chosen: Vec<AGProfile> = if profiles.is_empty() {
                ws.profiles.values().cloned().collect()
            } else {
                profiles
                    .iter()
                    .map(|n| ws.profiles.get(n).cloned().ok_or_else(|| format!("no profile named `{n}`")))
                    .collect::<Result<_, _>>()?
            };
            contract_check(&chosen)
        }
        Command::Blame { common, profile, actions, chosen } => {
            let ws = load(&common)?;
            let (_, prof) = pick(&ws.profiles, Some(&profile), "profile")?;
            blame(prof, &actions, &chosen)
        }
        Command::GameSolve { common, game, belief } => {
            let ws = load(&common)?;
            let (name, sc) = pick(&ws.scenarios, game.as_deref(), "game")?;
            game_solve(name, sc, belief.as_deref())
        }
        Command::GameDivergent { common, game, selection } => {
            let ws = load(&common)?;
            let (name, sc) = pick(&ws.scenarios, game.as_deref(), "game")?;
            game_divergent(name, sc, selection)
        }
    }
}

fn check(name: &str, p: &Poset, table: Option<PathBuf>) -> CmdResult {
    let mut text = format!("structure {name}\nelements {}\n", p.len());
    let mut out = json!({ "structure": name, "elements": p.len() });
    match p.ranks() {
        Ok(_) => {
            text.push_str("graded true\n");
            out["graded"] = json!(true);
        }
        Err(PosetError::NotGraded { shortest, longest }) => {
            writeln!(text, "graded false\nshortest maximal chain length {shortest}\nlongest maximal chain length {longest}").unwrap();
            out["graded"] = json!(false);
            out["shortest_chain_length"] = json!(shortest);
            out["longest_chain_length"] = json!(longest);
        }
        Err(e) => return Err(e.to_string()),
    }
    let mut code = EXIT_OK;
    match rank_partition(p) {
        Ok(rp) => {
            writeln!(text, "evaluable true\nranks {}", rp.num_ranks()).unwrap();
            out["evaluable"] = json!(true);
            out["ranks"] = json!(rp.num_ranks());
        }
        Err(EvalError::NotEvaluable(w)) => {
            writeln!(text, "evaluable false\nwitness {w}").unwrap();
            out["evaluable"] = json!(false);
            out["witness"] = json!(w);
            code = EXIT_NEGATIVE;
        }
        Err(e) => return Err(e.to_string()),
    }
    if let Some(path) = table {
        let file = path.display().to_string();
        let contents = std::fs::read_to_string(&path).map_err(|e| format!("{file}: {e}"))?;
        let t = parse_eval_table(&file, &contents, p).map_err(|e| e.to_string())?;
        match verify_consistent_evaluator(p, &t).map_err(|e| e.to_string())? {
            Verdict::Consistent => {
                text.push_str("table consistent\n");
                out["table"] = json!({ "consistent": true });
            }
            Verdict::Violated(v) => {
                writeln!(text, "table violated\nviolation {v}").unwrap();
                out["table"] = json!({ "consistent": false, "requirement": v.requirement(), "violation": v });
                code = EXIT_NEGATIVE;
            }
        }
    }
    Ok(Report::new(code, text, out))
}

fn not_evaluable(name: &str, e: EvalError) -> CmdResult {
    match e {
        EvalError::NotEvaluable(w) => Ok(Report::new(
            EXIT_NEGATIVE,
            format!("structure {name}\nevaluable false\nwitness {w}\n"),
            json!({ "structure": name, "evaluable": false, "witness": w }),
        )),
        other => Err(other.to_string()),
    }
}

fn rank(name: &str, p: &Poset) -> CmdResult {
    let rp = match rank_partition(p) {
        Ok(rp) => rp,
        Err(e) => return not_evaluable(name, e),
    };
    let mut text = format!("structure {name}\n");
    let mut levels = Vec::new();
    for (r, level) in rp.antichains().iter().enumerate() {
        writeln!(text, "rank {r}: {}", ids(&level.0).join(" ")).unwrap();
        levels.push(json!({ "rank": r, "properties": level.0 }));
    }
    Ok(Report::new(EXIT_OK, text, json!({ "structure": name, "graded": p.is_graded(), "levels": levels })))
}

fn order(name: &str, p: &Poset, bound: usize) -> CmdResult {
    let rp = match rank_partition(p) {
        Ok(rp) => rp,
        Err(e) => return not_evaluable(name, e),
    };
    let classes = powerset_order(&rp, bound).map_err(|e| e.to_string())?;
    let mut text = format!("structure {name}\nclasses {}\n", classes.len());
    let mut list = Vec::new();
    for c in &classes {
        let members: Vec<String> = c.members.iter().map(|&s| p.format_set(s)).collect();
        writeln!(text, "{} {}", c.vector, members.join(" ")).unwrap();
        list.push(json!({ "vector": c.vector, "members": members }));
    }
    Ok(Report::new(EXIT_OK, text, json!({ "structure": name, "classes": list })))
}

fn eval(name: &str, p: &Poset, sets: &[String]) -> CmdResult {
    let rp = match rank_partition(p) {
        Ok(rp) => rp,
        Err(e) => return not_evaluable(name, e),
    };
    let mut text = format!("structure {name}\n");
    let mut list = Vec::new();
    for s in sets {
        let set = p.set_of(split_list(s)).map_err(|e| e.to_string())?;
        let v = rp.evaluate_set(set);
        writeln!(text, "{} {v}", p.format_set(set)).unwrap();
        list.push(json!({ "set": p.format_set(set), "vector": v }));
    }
    Ok(Report::new(EXIT_OK, text, json!({ "structure": name, "evaluations": list })))
}

fn compare(name: &str, p: &Poset, sets: &[String]) -> CmdResult {
    if sets.len() != 2 {
        return Err(format!("compare needs exactly two --set arguments, got {}", sets.len()));
    }
    let rp = match rank_partition(p) {
        Ok(rp) => rp,
        Err(e) => return not_evaluable(name, e),
    };
    let a = p.set_of(split_list(&sets[0])).map_err(|e| e.to_string())?;
    let b = p.set_of(split_list(&sets[1])).map_err(|e| e.to_string())?;
    let (va, vb) = (rp.evaluate_set(a), rp.evaluate_set(b));
    let verdict = match w_compare(&va, &vb).map_err(|e| e.to_string())? {
        std::cmp::Ordering::Greater => "first dominates",
        std::cmp::Ordering::Less => "second dominates",
        std::cmp::Ordering::Equal => "equivalent",
    };
    let text = format!(
        "structure {name}\nfirst {} {va}\nsecond {} {vb}\nverdict {verdict}\n",
        p.format_set(a),
        p.format_set(b)
    );
    let out = json!({
        "structure": name,
        "first": { "set": p.format_set(a), "vector": va },
        "second": { "set": p.format_set(b), "vector": vb },
        "verdict": verdict.replace(' ', "_"),
    });
    Ok(Report::new(EXIT_OK, text, out))
}

fn edge_names(p: &Poset, edges: &[(usize, usize)]) -> Vec<(PropertyId, PropertyId)> {
    edges.iter().map(|&(a, b)| (p.name(a).clone(), p.name(b).clone())).collect()
}

fn canonical(name: &str, p: &Poset) -> CmdResult {
    let rp = match rank_partition(p) {
        Ok(rp) => rp,
        Err(e) => return not_evaluable(name, e),
    };
    let removed = edge_names(p, &level_skipping_covers(p, &rp));
    let c = canonicalize(p).map_err(|e| e.to_string())?;
    let mut text = emit_structure(name, &c);
    for (a, b) in &removed {
        writeln!(text, "-edge {a} {b}").unwrap();
    }
    let out = json!({ "structure": name, "covers": c.covers(), "removed_edges": removed });
    Ok(Report::new(EXIT_OK, text, out))
}

fn refinement(name: &str, p: &Poset, req: &RefinementRequest, budget: Option<usize>, no_repair: bool) -> CmdResult {
    let result = if no_repair {
        refine(p, req).map(|poset| crate::refinement::Repair { poset, diff: Default::default() })
    } else {
        repair(p, req, budget)
    };
    match result {
        Ok(r) => {
            let mut text = emit_structure(name, &r.poset);
            text.push_str(&r.diff.to_string());
            let out = json!({
                "structure": name,
                "repaired": !r.diff.is_empty(),
                "covers": r.poset.covers(),
                "diff": r.diff,
            });
            Ok(Report::new(EXIT_OK, text, out))
        }
        Err(RefineError::NotGradedAfter { shortest, longest }) => Ok(Report::new(
            EXIT_NEGATIVE,
            format!("structure {name}\ngraded false\nshortest maximal chain length {shortest}\nlongest maximal chain length {longest}\n"),
            json!({ "structure": name, "graded": false, "shortest_chain": shortest, "longest_chain": longest }),
        )),
        Err(e @ RefineError::Unrepairable { .. }) => Ok(Report::new(
            EXIT_NEGATIVE,
            format!("structure {name}\n{e}\n"),
            json!({ "structure": name, "repaired": false, "error": e.to_string() }),
        )),
        Err(e) => Err(e.to_string()),
    }
}

fn contract_check(profiles: &[AGProfile]) -> CmdResult {
    let verdict = compatible(profiles).map_err(|e| e.to_string())?;
    let names: Vec<&str> = profiles.iter().map(AGProfile::agent_id).collect();
    let mut text = format!("profiles {}\n", names.join(" "));
    let code = match &verdict {
        Compatibility::Compatible => {
            text.push_str("compatible\n");
            EXIT_OK
        }
        Compatibility::Incompatible(pairs) => {
            text.push_str("incompatible\n");
            for pair in pairs {
                let reasons: Vec<String> = pair.failures.iter().map(ToString::to_string).collect();
                writeln!(text, "guarantee of {} fails assumptions of {}: {}", pair.guarantor, pair.assumer, reasons.join("; "))
                    .unwrap();
            }
            EXIT_NEGATIVE
        }
    };
    Ok(Report::new(code, text, json!({ "profiles": names, "result": verdict })))
}

fn blame(profile: &AGProfile, actions: &[String], chosen: &str) -> CmdResult {
    let mut available: BTreeMap<String, BTreeSet<PropertyId>> = BTreeMap::new();
    for a in actions {
        let (name, set) = a.split_once('=').ok_or_else(|| format!("action `{a}` is not `name=p1,p2`"))?;
        let props = split_list(set)
            .into_iter()
            .map(PropertyId::new)
            .collect::<Result<BTreeSet<_>, _>>()
            .map_err(|e| e.to_string())?;
        if available.insert(name.to_string(), props).is_some() {
            return Err(format!("duplicate action `{name}`"));
        }
    }
    let v = assign_blame(profile, &available, chosen).map_err(|e| e.to_string())?;
    let mut text = format!(
        "agent {}\nchosen {} {}\nblameworthy {}\n",
        v.agent_id, v.chosen_action, v.chosen_vector, v.blameworthy
    );
    if let (Some(a), Some(d)) = (&v.dominating_action, &v.dominating_vector) {
        writeln!(text, "dominating {a} {d}").unwrap();
    }
    let code = if v.blameworthy { EXIT_NEGATIVE } else { EXIT_OK };
    Ok(Report::new(code, text, serde_json::to_value(&v).expect("verdicts serialize")))
}

fn game_error(e: GameError) -> String {
    e.to_string()
}

fn two_agents(sc: &GameScenario) -> Result<(), String> {
    if sc.agents().len() != 2 {
        return Err(format!("game `{}` has {} agents; the CLI handles two", sc.name, sc.agents().len()));
    }
    Ok(())
}

fn game_solve(name: &str, sc: &GameScenario, belief: Option<&str>) -> CmdResult {
    two_agents(sc)?;
    let observer = belief.unwrap_or(&sc.agents()[0].id);
    let pm = build_payoffs(sc, observer).map_err(game_error)?;
    let nash = pure_nash(&pm);
    let pareto = pareto_efficient(&pm);
    let fmt_profiles = |ps: &[Vec<usize>]| -> Vec<String> { ps.iter().map(|p| format!("({})", pm.names(p).join(","))).collect() };
    let mut text = format!("game {name}\nbelief {observer}\n{pm}");
    writeln!(text, "nash {}", fmt_profiles(&nash).join(" ")).unwrap();
    writeln!(text, "pareto {}", fmt_profiles(&pareto).join(" ")).unwrap();
    let payoffs: Vec<Value> = (0..pm.num_profiles())
        .map(|i| {
            let p = pm.profile_at(i);
            let per_agent: serde_json::Map<String, Value> =
                pm.agents().iter().zip(pm.payoff(&p)).map(|(a, v)| (a.clone(), json!(v))).collect();
            json!({ "profile": pm.names(&p), "payoffs": per_agent })
        })
        .collect();
    let as_names = |ps: &[Vec<usize>]| -> Vec<Vec<String>> { ps.iter().map(|p| pm.names(p)).collect() };
    let out = json!({
        "game": name,
        "belief": observer,
        "agents": pm.agents(),
        "matrix": payoffs,
        "nash": as_names(&nash),
        "pareto": as_names(&pareto),
    });
    Ok(Report::new(EXIT_OK, text, out))
}

fn game_divergent(name: &str, sc: &GameScenario, selection: Selection) -> CmdResult {
    two_agents(sc)?;
    match resolve_divergent(sc, selection) {
        Ok(outcome) => {
            let mut text = format!("game {name}\n");
            for c in &outcome.choices {
                let eq: Vec<String> = c.belief_equilibria.iter().map(|p| format!("({})", p.join(","))).collect();
                writeln!(text, "agent {} plays {} (belief equilibria: {})", c.agent, c.action, eq.join(" ")).unwrap();
            }
            let mut code = EXIT_OK;
            match &outcome.report {
                None => text.push_str("ground truth not given\n"),
                Some(r) => {
                    writeln!(text, "realized ({})", r.realized.join(",")).unwrap();
                    if r.collision() {
                        code = EXIT_NEGATIVE;
                        text.push_str("conflict true\n");
                        for c in &r.conflicts {
                            writeln!(text, "agent {} loses {} {}", c.agent, ids(&c.unsatisfied_top).join(","), c.vector)
                                .unwrap();
                        }
                    } else {
                        text.push_str("conflict false\n");
                    }
                }
            }
            let mut out = serde_json::to_value(&outcome).expect("outcomes serialize");
            out["game"] = json!(name);
            out["conflict"] = json!(outcome.report.as_ref().is_some_and(|r| r.collision()));
            Ok(Report::new(code, text, out))
        }
        Err(GameError::AmbiguousEquilibria { agent, equilibria }) => Ok(Report::new(
            EXIT_NEGATIVE,
            format!("game {name}\nambiguous: belief game of {agent} has equilibria {equilibria}\n"),
            json!({ "game": name, "ambiguous": { "agent": agent, "equilibria": equilibria } }),
        )),
        Err(GameError::NoEquilibrium(agent)) => Ok(Report::new(
            EXIT_NEGATIVE,
            format!("game {name}\nno pure equilibrium in the belief game of {agent}\n"),
            json!({ "game": name, "no_equilibrium": agent }),
        )),
        Err(e) => Err(e.to_string()),
    }
}
