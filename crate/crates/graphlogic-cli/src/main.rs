//! `graphlogic`: batch front end for graphs, formulas and proofs.
//!
//! Exit codes: 0 success, 1 negative result (rejected, refuted, not
//! isomorphic), 2 usage or format error, 3 search bound exhausted.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use graphlogic::decomp::{canonical_form, decompose, find_isomorphism_with, Base, DEFAULT_BRUTE_BOUND};
use graphlogic::formula::{formula_of, graph_of, parse, parse_sequent, render, Formula};
use graphlogic::gen::{random_formula, random_graph, rng, FormulaSpec};
use graphlogic::glk::{
    check_counterexample, check_staged, classical_oracle, decompose_structural, refine_contractions, Evaluation,
    StagedDerivation,
};
use graphlogic::graph::{LabeledGraph, VertexId};
use graphlogic::gs::{
    check_derivation, gs_rules, gs_search, gs_to_mgl0, mgl0_to_gs, Derivation, GsOutcome, GsSearchConfig,
};
use graphlogic::sequent::{
    check_proof, eliminate_cut, eliminate_wd_par, expand_deep, prove_with, Outcome, Proof, Rule, RuleSet,
    SearchConfig, System,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "graphlogic", version, about = "Graphs as formulas: decomposition, proof search and proof transformation")]
struct Cli {
    /// Connective base to load; it is written back when new connectives get registered.
    #[arg(long, global = true)]
    base: Option<PathBuf>,
    /// Seed for the random generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SystemArg {
    Mgl,
    Mgl0,
    Glk,
    Mllconr,
    Gs,
}

impl SystemArg {
    fn sequent(self) -> Option<System> {
        match self {
            SystemArg::Mgl => Some(System::Mgl),
            SystemArg::Mgl0 => Some(System::Mgl0),
            SystemArg::Glk => Some(System::Glk),
            SystemArg::Mllconr => Some(System::MllConr),
            SystemArg::Gs => None,
        }
    }
}

#[derive(Subcommand)]
enum Verb {
    /// Parse a formula and report its shape. `--random N` draws one instead.
    Parse {
        formula: Option<String>,
        #[arg(long)]
        random: Option<usize>,
    },
    /// Graph of a formula, or a graph file normalized. `--random N` draws a graph.
    Graph {
        input: Option<String>,
        #[arg(long)]
        random: Option<usize>,
    },
    /// Modular decomposition tree and canonical formula of a graph.
    Decompose { input: String },
    /// Isomorphism test between two graphs or formulas.
    Iso { left: String, right: String },
    /// Proof search for a sequent (comma-separated formulas).
    Prove {
        sequent: String,
        #[arg(long, value_enum, default_value_t = SystemArg::Mgl)]
        system: SystemArg,
        /// Maximal proof height (sequent systems) or rewrite depth (GS).
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Check a proof, GS derivation or staged GLK derivation.
    Check {
        input: String,
        #[arg(long, value_enum, default_value_t = SystemArg::Mgl)]
        system: SystemArg,
        /// Extra sequent rules to admit, e.g. `cut,wd_par,deep`.
        #[arg(long, value_delimiter = ',')]
        extra: Vec<String>,
    },
    /// Eliminate every cut from a proof.
    Cutelim {
        input: String,
        #[arg(long, value_enum, default_value_t = SystemArg::Mgl)]
        system: SystemArg,
    },
    /// Expand deep nodes and eliminate wd_par nodes, giving a plain MGL° proof.
    Wdparelim { input: String },
    /// MGL° proof to GS derivation, or GS derivation to MGL° proof.
    Translate { input: String },
    /// Split a GLK proof into an MGL head and deep structural stages.
    DecomposeGlk {
        input: String,
        /// Refine contractions into medial and atomic contraction stages.
        #[arg(long)]
        refine: bool,
    },
    /// Classical truth-table evaluation of a ⅋/⊗ formula.
    Oracle {
        formula: String,
        /// Assignment such as `a=1,b=0`; exhaustive tautology check when absent.
        #[arg(long)]
        assign: Option<String>,
    },
    /// Certify the six-cycle counterexample graph.
    Counterexample,
}

/// An exit code with a message for stderr.
struct Failure {
    code: u8,
    message: String,
}

type Run = Result<Output, Failure>;

/// Success or a negative result, with what to print.
struct Output {
    code: u8,
    text: String,
}

fn usage(e: impl Display) -> Failure {
    Failure { code: 2, message: e.to_string() }
}

fn negative(e: impl Display) -> Failure {
    Failure { code: 1, message: e.to_string() }
}

fn ok(text: String) -> Run {
    Ok(Output { code: 0, text })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

/// A file's contents when `arg` names a file, otherwise `arg` itself.
fn read_arg(arg: &str) -> Result<String, Failure> {
    let path = std::path::Path::new(arg);
    if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| usage(format!("{arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn load_graph(arg: &str, base: &Base) -> Result<LabeledGraph, Failure> {
    let text = read_arg(arg)?;
    if is_json(&text) {
        LabeledGraph::from_json_str(&text).map_err(usage)
    } else {
        Ok(graph_of(&parse(&text, base).map_err(usage)?))
    }
}

enum Artifact {
    Proof(Proof),
    Gs(Derivation),
    Staged(StagedDerivation),
}

fn load_artifact(arg: &str, base: &Base) -> Result<Artifact, Failure> {
    let text = read_arg(arg)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{arg}: {e}")))?;
    if value.get("stages").is_some() {
        StagedDerivation::from_json_str(&text, base).map(Artifact::Staged).map_err(usage)
    } else if value.get("node").is_some() {
        Derivation::from_json_str(&text).map(Artifact::Gs).map_err(usage)
    } else {
        Proof::from_json_str(&text, base).map(Artifact::Proof).map_err(usage)
    }
}

fn load_proof(arg: &str, base: &Base) -> Result<Proof, Failure> {
    match load_artifact(arg, base)? {
        Artifact::Proof(p) => Ok(p),
        _ => Err(usage(format!("{arg}: expected a sequent proof"))),
    }
}

fn rule_set(system: SystemArg, extra: &[String]) -> Result<RuleSet, Failure> {
    let sys = system.sequent().ok_or_else(|| usage("this verb needs a sequent system"))?;
    let mut rules = RuleSet::from(sys);
    for name in extra {
        let rule: Rule = serde_json::from_value(Value::String(name.clone()))
            .map_err(|_| usage(format!("unknown rule {name}")))?;
        rules = rules.with(rule);
    }
    Ok(rules)
}

fn proof_out(p: &Proof, format: Format) -> String {
    match format {
        Format::Dot => p.to_dot(),
        Format::Text => p.to_string(),
        Format::Json => p.to_json_string(),
    }
}

fn graph_out(g: &LabeledGraph, format: Format) -> String {
    match format {
        Format::Dot => g.to_dot(),
        _ => pretty(&serde_json::to_value(g.to_json()).expect("graph serializes")),
    }
}

/// Re-check a proof before printing it.
fn verified(p: &Proof, rules: &RuleSet, base: &Base) -> Result<(), Failure> {
    check_proof(p, rules, base).map_err(|d| negative(format!("internal check failed: {d:?}")))
}

fn unlabeled(g: &LabeledGraph) -> LabeledGraph {
    LabeledGraph::from_parts(g.vertices().map(|v| (v, None)), g.edges()).expect("same vertices")
}

fn iso_map_json(map: &BTreeMap<VertexId, VertexId>) -> Value {
    Value::Array(map.iter().map(|(a, b)| json!([a.0, b.0])).collect())
}

fn run(cli: &Cli, base: &Base) -> Run {
    let format = cli.format;
    match &cli.verb {
        Verb::Parse { formula, random } => {
            let f = match (formula, random) {
                (Some(text), None) => parse(&read_arg(text)?, base).map_err(usage)?,
                (None, Some(n)) => random_formula(&mut rng(cli.seed), &FormulaSpec::standard(*n, 3, base)),
                _ => return Err(usage("give a formula or --random N")),
            };
            if format == Format::Text {
                return ok(render(&f));
            }
            ok(pretty(&json!({
                "formula": render(&f),
                "literals": f.literal_count(),
                "units": f.unit_count(),
                "pure": f.is_pure(),
                "mll": f.is_mll(),
                "atoms": f.atoms(),
            })))
        }
        Verb::Graph { input, random } => {
            let g = match (input, random) {
                (Some(arg), None) => load_graph(arg, base)?,
                (None, Some(n)) => random_graph(&mut rng(cli.seed), *n, 3, 0.5),
                _ => return Err(usage("give an input or --random N")),
            };
            ok(graph_out(&g, format))
        }
        Verb::Decompose { input } => {
            let g = load_graph(input, base)?;
            let t = decompose(&g, base).map_err(negative)?;
            let c = canonical_form(&t);
            let f = formula_of(&g, base).map_err(negative)?;
            if format == Format::Text {
                return ok(format!("{t}\n{}", render(&f)));
            }
            ok(pretty(&json!({
                "tree": t.to_json(),
                "canonical": c.to_json(),
                "formula": render(&f),
                "cograph": t.is_cograph_tree(),
            })))
        }
        Verb::Iso { left, right } => {
            let (g, h) = (load_graph(left, base)?, load_graph(right, base)?);
            let found = find_isomorphism_with(&g, &h, None, base, DEFAULT_BRUTE_BOUND).map_err(usage)?;
            match found {
                Some(map) => {
                    debug_assert!(g.verify_isomorphism(&h, &map).unwrap_or(false));
                    ok(pretty(&json!({ "isomorphic": true, "map": iso_map_json(&map) })))
                }
                None => {
                    let similar = find_isomorphism_with(&unlabeled(&g), &unlabeled(&h), None, base, DEFAULT_BRUTE_BOUND)
                        .map_err(usage)?
                        .is_some();
                    let msg = if similar { "similar but not isomorphic" } else { "not isomorphic" };
                    Ok(Output { code: 1, text: msg.to_string() })
                }
            }
        }
        Verb::Prove { sequent, system, depth } => {
            let seq = parse_sequent(&read_arg(sequent)?, base).map_err(usage)?;
            match system.sequent() {
                Some(sys) => {
                    let mut cfg = SearchConfig::default();
                    if let Some(d) = depth {
                        cfg.depth_bound = *d;
                    }
                    match prove_with(&seq, sys, base, &cfg) {
                        Outcome::Found(p) => {
                            verified(&p, &sys.into(), base)?;
                            ok(proof_out(&p, format))
                        }
                        Outcome::Refuted => Ok(Output { code: 1, text: "refuted".into() }),
                        Outcome::Unknown => Ok(Output { code: 3, text: "unknown".into() }),
                    }
                }
                None => {
                    let f = Formula::par_all(seq).ok_or_else(|| usage("empty sequent"))?;
                    let mut cfg = GsSearchConfig::default();
                    if let Some(d) = depth {
                        cfg.bound = *d;
                    }
                    match gs_search(&graph_of(&f), &gs_rules(), cfg, base).map_err(usage)? {
                        GsOutcome::Found(d) => {
                            check_derivation(&d, &gs_rules()).map_err(negative)?;
                            ok(d.to_json_string())
                        }
                        GsOutcome::Refuted => Ok(Output { code: 1, text: "refuted".into() }),
                        GsOutcome::Unknown => Ok(Output { code: 3, text: "unknown".into() }),
                    }
                }
            }
        }
        Verb::Check { input, system, extra } => {
            let verdict = match load_artifact(input, base)? {
                Artifact::Proof(p) => check_proof(&p, &rule_set(*system, extra)?, base).map_err(|d| format!("{d:?}")),
                Artifact::Gs(d) => check_derivation(&d, &gs_rules()).map_err(|e| e.to_string()),
                Artifact::Staged(s) => check_staged(&s, base).map_err(|e| e.to_string()),
            };
            match verdict {
                Ok(()) => ok("accepted".into()),
                Err(msg) => Ok(Output { code: 1, text: format!("rejected: {msg}") }),
            }
        }
        Verb::Cutelim { input, system } => {
            let sys = system.sequent().ok_or_else(|| usage("cut-elimination needs a sequent system"))?;
            let p = load_proof(input, base)?;
            check_proof(&p, &RuleSet::from(sys).with(Rule::Cut), base).map_err(|d| negative(format!("{d:?}")))?;
            let out = eliminate_cut(&p, sys, base).map_err(negative)?;
            verified(&out.proof, &sys.into(), base)?;
            ok(proof_out(&out.proof, format))
        }
        Verb::Wdparelim { input } => {
            let p = load_proof(input, base)?;
            let admitted = RuleSet::from(System::Mgl0).with(Rule::WdPar).with(Rule::Deep);
            check_proof(&p, &admitted, base).map_err(|d| negative(format!("{d:?}")))?;
            let out = eliminate_wd_par(&expand_deep(&p, base).map_err(negative)?, base).map_err(negative)?;
            verified(&out, &System::Mgl0.into(), base)?;
            ok(proof_out(&out, format))
        }
        Verb::Translate { input } => match load_artifact(input, base)? {
            Artifact::Proof(p) => {
                check_proof(&p, &System::Mgl0.into(), base).map_err(|d| negative(format!("{d:?}")))?;
                let d = mgl0_to_gs(&p, base).map_err(negative)?;
                check_derivation(&d, &gs_rules()).map_err(negative)?;
                ok(d.to_json_string())
            }
            Artifact::Gs(d) => {
                check_derivation(&d, &gs_rules()).map_err(negative)?;
                let p = gs_to_mgl0(&d, base).map_err(negative)?;
                verified(&p, &System::Mgl0.into(), base)?;
                ok(proof_out(&p, format))
            }
            Artifact::Staged(_) => Err(usage("staged derivations have no translation")),
        },
        Verb::DecomposeGlk { input, refine } => {
            let p = load_proof(input, base)?;
            let mut s = decompose_structural(&p, base).map_err(negative)?;
            if *refine {
                s = refine_contractions(&s, base).map_err(negative)?;
            }
            check_staged(&s, base).map_err(|e| negative(format!("internal check failed: {e}")))?;
            ok(s.to_json_string())
        }
        Verb::Oracle { formula, assign } => {
            let f = parse(&read_arg(formula)?, base).map_err(usage)?;
            let value = match assign {
                None => classical_oracle(&f, Evaluation::Exhaustive),
                Some(text) => {
                    let mut v = BTreeMap::new();
                    for part in text.split(',').filter(|s| !s.is_empty()) {
                        let (atom, bit) = part.split_once('=').ok_or_else(|| usage(format!("bad assignment {part}")))?;
                        let bit = match bit.trim() {
                            "1" | "true" => true,
                            "0" | "false" => false,
                            other => return Err(usage(format!("bad truth value {other}"))),
                        };
                        v.insert(atom.trim().to_string(), bit);
                    }
                    classical_oracle(&f, Evaluation::Assignment(&v))
                }
            }
            .map_err(usage)?;
            Ok(Output { code: if value { 0 } else { 1 }, text: value.to_string() })
        }
        Verb::Counterexample => {
            let report = check_counterexample(base).map_err(negative)?;
            let text = pretty(&serde_json::to_value(&report).expect("report serializes"));
            Ok(Output { code: if report.certified() { 0 } else { 1 }, text })
        }
    }
}

fn load_base(path: &Option<PathBuf>) -> Result<Base, Failure> {
    match path {
        Some(p) if p.is_file() => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Base::from_json_str(&text).map_err(usage)
        }
        _ => Ok(Base::new()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_base(&cli.base).and_then(|base| {
        let before = base.len();
        let out = run(&cli, &base);
        if let Some(path) = &cli.base {
            if base.len() != before || !path.is_file() {
                std::fs::write(path, base.to_json_string()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
        }
        out
    });
    match result {
        Ok(out) => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{}", out.text.trim_end());
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
