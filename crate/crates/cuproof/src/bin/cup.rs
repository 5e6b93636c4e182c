//! `cup`: command-line front end for the coinductive prover.
//!
//! Exit codes: 0 success (proof found, verified, member), 1 definite failure,
//! 2 inconclusive within the resource bounds, 3 usage or parse error.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cuproof::corpus::{self, Expect, ENTRIES};
use cuproof::engine::{check_with_lemmas, coprove, lemma_formulas, promote_lemma, prove, Lemma, Outcome, SearchConfig, SearchResult};
use cuproof::formula::{classify, Calculus, Role};
use cuproof::harness::{run_harness, HarnessConfig};
use cuproof::program::Program;
use cuproof::semantics::{parse_tree, print_interpretation, Membership, ModelConfig, ModelError, Semantics};
use cuproof::syntax::{export_proof, import_proof, parse_formula, parse_goal, parse_program, parse_term, Printer, ProofDoc};

const OK: u8 = 0;
const FAIL: u8 = 1;
const INCONCLUSIVE: u8 = 2;
const USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "cup", version, about = "Coinductive uniform proofs for Horn clause programs")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Opts {
    /// Calculus: co-fohc, co-fohh, co-hohc or co-hohh.
    #[arg(long, global = true, default_value = "co-hohh", value_parser = parse_calculus)]
    calculus: Calculus,
    /// Maximum proof height for iterative deepening.
    #[arg(long, global = true, env = "CUP_DEPTH", default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
    depth: u32,
    /// Unfolding budget of the fixβ check.
    #[arg(long, global = true, env = "CUP_FIXBETA_BOUND", default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    fixbeta_bound: u32,
    /// Truncation depth of the tree semantics.
    #[arg(long, global = true, env = "CUP_MODEL_DEPTH", default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    model_depth: u32,
    /// Words explored literally when building the soundness candidate.
    #[arg(long, global = true, env = "CUP_WORD_BUDGET", default_value_t = 3)]
    word_budget: u32,
    /// Write the proof document (JSON) here.
    #[arg(long, global = true)]
    emit_proof: Option<PathBuf>,
    /// Print a machine-readable summary instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a program and report its clauses and definitions.
    CheckSyntax {
        program: String,
    },
    /// List the calculi a formula (or every clause of the program) belongs to.
    Classify {
        #[arg(long)]
        program: String,
        #[arg(long)]
        formula: Option<String>,
        /// clause, goal or core.
        #[arg(long, default_value = "clause", value_parser = parse_role)]
        role: Role,
    },
    /// Inductive uniform proof search.
    Prove(SearchArgs),
    /// Coinductive proof search (CO-FIX at the root).
    Coprove(SearchArgs),
    /// Check a proof document against a program.
    CheckProof {
        #[arg(long)]
        program: String,
        #[arg(long)]
        proof: PathBuf,
        /// Lemmas the proof may select; each is proven coinductively first.
        #[arg(long)]
        lemma: Vec<String>,
    },
    /// Greatest fixed point at the model depth and membership of an atom.
    Model {
        #[arg(long)]
        program: String,
        /// A closed atom, or a truncated tree using `*`.
        #[arg(long)]
        goal: Option<String>,
        /// Print the whole fixed point when it is small enough.
        #[arg(long)]
        listing: bool,
    },
    /// Run the soundness harness on a coinductive proof.
    Soundness {
        #[arg(long)]
        program: String,
        /// Proof document; when absent the goal is proven first.
        #[arg(long)]
        proof: Option<PathBuf>,
        #[arg(long)]
        goal: Option<String>,
        /// Closed base terms sampled per eigenvariable.
        #[arg(long, default_value_t = 3)]
        bases: usize,
    },
    /// List or run the shipped corpus.
    Examples {
        /// Entry to run.
        name: Option<String>,
        /// Run every entry.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    program: String,
    #[arg(long)]
    goal: String,
    /// Formula to prove coinductively and promote to a lemma first.
    #[arg(long)]
    lemma: Vec<String>,
}

fn parse_calculus(s: &str) -> Result<Calculus, String> {
    Calculus::parse(s).ok_or_else(|| format!("unknown calculus `{s}` (expected co-fohc, co-fohh, co-hohc or co-hohh)"))
}

fn parse_role(s: &str) -> Result<Role, String> {
    Role::parse(s).ok_or_else(|| format!("unknown role `{s}` (expected clause, goal or core)"))
}

/// A diagnostic together with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Display) -> Failure {
    Failure {
        code: USAGE,
        message: message.to_string(),
    }
}

type Run = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("cup: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Run {
    let o = &cli.opts;
    match cli.cmd {
        Cmd::CheckSyntax { program } => check_syntax(o, &program),
        Cmd::Classify { program, formula, role } => classify_cmd(o, &program, formula.as_deref(), role),
        Cmd::Prove(a) => search_cmd(o, a, false),
        Cmd::Coprove(a) => search_cmd(o, a, true),
        Cmd::CheckProof { program, proof, lemma } => check_proof(o, &program, &proof, &lemma),
        Cmd::Model { program, goal, listing } => model(o, &program, goal.as_deref(), listing),
        Cmd::Soundness { program, proof, goal, bases } => soundness(o, &program, proof.as_deref(), goal.as_deref(), bases),
        Cmd::Examples { name, all } => examples(o, name.as_deref(), all),
    }
}

/// Reads a program from a file, falling back to the shipped corpus by name.
fn load_program(path: &str) -> Result<Program, Failure> {
    let (label, text) = match std::fs::read_to_string(path) {
        Ok(t) => (path.to_string(), t),
        Err(e) => match corpus::file(Path::new(path).file_name().and_then(|s| s.to_str()).unwrap_or(path)) {
            Some(f) => (format!("<corpus>/{}", f.name), f.source.to_string()),
            None => return Err(usage(format!("{path}: {e}"))),
        },
    };
    parse_program(&text).map_err(|e| usage(format!("{label}:{e}")))
}

fn config(o: &Opts) -> SearchConfig {
    SearchConfig::new(o.calculus)
        .with_depth(o.depth as usize)
        .with_fixbeta_bound(o.fixbeta_bound as usize)
}

fn emit(o: &Opts, value: Value, text: impl FnOnce() -> String) {
    // A closed pipe is not an error worth reporting.
    let mut out = std::io::stdout().lock();
    let _ = if o.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("summaries serialize"))
    } else {
        write!(out, "{}", text())
    };
}

fn check_syntax(o: &Opts, path: &str) -> Run {
    let p = load_program(path)?;
    let pr = Printer::new(&p);
    emit(
        o,
        json!({"ok": true, "clauses": p.clauses.len(), "definitions": p.defs.len()}),
        || {
            let mut s = format!("ok: {} clauses, {} definitions\n", p.clauses.len(), p.defs.len());
            if o.verbose {
                for c in &p.clauses {
                    s += &format!("  {}\n", pr.formula(&c.formula));
                }
            }
            s
        },
    );
    Ok(OK)
}

fn calculi_names(cs: &std::collections::BTreeSet<Calculus>) -> Vec<String> {
    cs.iter().map(|c| c.to_string()).collect()
}

fn classify_cmd(o: &Opts, path: &str, formula: Option<&str>, role: Role) -> Run {
    let p = load_program(path)?;
    let pr = Printer::new(&p);
    let items: Vec<_> = match formula {
        Some(src) => vec![parse_formula(src, &p).map_err(|e| usage(format!("formula:{e}")))?],
        None => p.formulas().cloned().collect(),
    };
    let mut rows = Vec::new();
    for f in &items {
        let cs = classify(&p.signature, f, role).map_err(|e| Failure {
            code: FAIL,
            message: e.to_string(),
        })?;
        rows.push((pr.formula(f), calculi_names(&cs)));
    }
    let any_empty = rows.iter().any(|(_, cs)| cs.is_empty());
    emit(
        o,
        json!(rows.iter().map(|(f, cs)| json!({"formula": f, "calculi": cs})).collect::<Vec<_>>()),
        || {
            rows.iter()
                .map(|(f, cs)| {
                    let list = if cs.is_empty() { "none".to_string() } else { cs.join(", ") };
                    format!("{f}\n  {list}\n")
                })
                .collect()
        },
    );
    Ok(if any_empty { FAIL } else { OK })
}

/// Proves each lemma coinductively and promotes it.
fn lemmas(o: &Opts, p: &Program, srcs: &[String]) -> Result<Vec<Lemma>, Failure> {
    let cfg = config(o);
    let mut out: Vec<Lemma> = Vec::new();
    for src in srcs {
        let f = parse_goal(src, p).map_err(|e| usage(format!("lemma:{e}")))?;
        let r = coprove(p, &lemma_formulas(&out), &f, &cfg).map_err(|e| usage(format!("lemma: {e}")))?;
        let Some(pf) = r.proof() else {
            return Err(Failure {
                code: if matches!(r.outcome, Outcome::Failed) { FAIL } else { INCONCLUSIVE },
                message: format!("lemma `{src}` has no coinductive proof within the bounds"),
            });
        };
        let l = promote_lemma(p, pf, o.calculus, &out, o.fixbeta_bound as usize).map_err(|e| Failure {
            code: FAIL,
            message: format!("lemma `{src}`: {e}"),
        })?;
        out.push(l);
    }
    Ok(out)
}

fn outcome_name(r: &SearchResult) -> &'static str {
    match r.outcome {
        Outcome::Proved(_) => "proved",
        Outcome::DepthExceeded => "inconclusive",
        Outcome::Failed => "failed",
    }
}

fn search_cmd(o: &Opts, a: SearchArgs, co: bool) -> Run {
    let p = load_program(&a.program)?;
    let goal = parse_goal(&a.goal, &p).map_err(|e| usage(format!("goal:{e}")))?;
    let ls = lemmas(o, &p, &a.lemma)?;
    let cfg = config(o);
    let start = Instant::now();
    let r = if co {
        coprove(&p, &lemma_formulas(&ls), &goal, &cfg)
    } else {
        prove(&p, &lemma_formulas(&ls), &goal, &cfg)
    }
    .map_err(usage)?;
    let elapsed = start.elapsed();
    if let (Some(path), Some(pf)) = (&o.emit_proof, r.proof()) {
        let text = serde_json::to_string_pretty(&export_proof(pf, &p)).expect("proof documents serialize");
        std::fs::write(path, text + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    let limitation = match r.outcome {
        Outcome::DepthExceeded => p.limitation_note(),
        _ => None,
    };
    emit(
        o,
        json!({
            "outcome": outcome_name(&r),
            "calculus": o.calculus.to_string(),
            "nodes": r.stats.nodes,
            "bound": r.stats.bound,
            "millis": elapsed.as_secs_f64() * 1e3,
            "proof_file": o.emit_proof.as_ref().filter(|_| r.proof().is_some()).map(|p| p.display().to_string()),
            "rules": r.proof().map(|pf| pf.rules().iter().map(|r| r.name()).collect::<Vec<_>>()),
            "limitation": limitation,
        }),
        || {
            let mut s = format!(
                "{} ({}, {} nodes, height bound {})\n",
                outcome_name(&r),
                o.calculus,
                r.stats.nodes,
                r.stats.bound
            );
            if let Some(pf) = r.proof() {
                s += &pf.render(&p);
                if !s.ends_with('\n') {
                    s.push('\n');
                }
            }
            if let Some(note) = &limitation {
                s += &format!("note: this program has a documented limitation:\n{note}\n");
            }
            s
        },
    );
    Ok(match r.outcome {
        Outcome::Proved(_) => OK,
        Outcome::Failed => FAIL,
        Outcome::DepthExceeded => INCONCLUSIVE,
    })
}

fn read_proof(path: &Path, p: &Program) -> Result<cuproof::engine::ProofNode, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let doc: ProofDoc = serde_json::from_str(&text).map_err(|e| usage(format!("{}: malformed proof document: {e}", path.display())))?;
    import_proof(&doc, p).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn check_proof(o: &Opts, path: &str, proof: &Path, lemma: &[String]) -> Run {
    let p = load_program(path)?;
    let pf = read_proof(proof, &p)?;
    let ls = lemmas(o, &p, lemma)?;
    let rep = check_with_lemmas(&pf, &p, &lemma_formulas(&ls), o.calculus, o.fixbeta_bound as usize);
    let failure = rep.failure.as_ref().map(|f| format!("at {:?} ({}): {}", f.path, f.rule.name(), f.reason));
    emit(o, json!({"valid": rep.valid(), "calculus": o.calculus.to_string(), "failure": failure}), || match &failure {
        None => format!("valid {} proof\n", o.calculus),
        Some(f) => format!("invalid: {f}\n"),
    });
    Ok(if rep.valid() { OK } else { FAIL })
}

fn model_failure(e: ModelError) -> Failure {
    let code = match e {
        ModelError::UniverseTooLarge { .. } | ModelError::BudgetExhausted => INCONCLUSIVE,
        _ => USAGE,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn model(o: &Opts, path: &str, goal: Option<&str>, listing: bool) -> Run {
    let p = load_program(path)?;
    let sem = Semantics::new(&p, ModelConfig::new(o.model_depth as usize)).map_err(model_failure)?;
    let mut value = json!({"depth": sem.depth(), "top_size": sem.top_size().to_string()});
    let mut text = format!("depth {}, {} atoms in the truncated universe\n", sem.depth(), sem.top_size());
    let mut code = OK;
    if listing || goal.is_none() {
        let gfp = sem.gfp().map_err(model_failure)?;
        text += &format!("greatest fixed point: {} atoms\n", gfp.len());
        if listing {
            text += &print_interpretation(&gfp);
        }
        value["gfp_size"] = json!(gfp.len());
        if listing {
            value["gfp"] = json!(gfp.iter().map(|t| t.to_string()).collect::<Vec<_>>());
        }
    }
    if let Some(src) = goal {
        let m = match parse_term(src, &p, &[], None) {
            Ok(t) => sem.member(&p.signature, &t),
            Err(term_err) => match parse_tree(src) {
                Ok(t) => sem.member_tree(&t),
                Err(_) => return Err(usage(format!("goal:{term_err}"))),
            },
        }
        .map_err(model_failure)?;
        let name = match m {
            Membership::InApprox => "member",
            Membership::CertainlyOut => "not-member",
        };
        if m == Membership::CertainlyOut {
            code = FAIL;
        }
        value["membership"] = json!(name);
        text += &format!(
            "{name}: {}\n",
            match m {
                Membership::InApprox => "the truncation is in the greatest fixed point at this depth (evidence, not proof)",
                Membership::CertainlyOut => "no atom of the model has this truncation",
            }
        );
    }
    emit(o, value, || text);
    Ok(code)
}

fn soundness(o: &Opts, path: &str, proof: Option<&Path>, goal: Option<&str>, bases: usize) -> Run {
    let p = load_program(path)?;
    let pf = match (proof, goal) {
        (Some(f), _) => read_proof(f, &p)?,
        (None, Some(g)) => {
            let goal = parse_goal(g, &p).map_err(|e| usage(format!("goal:{e}")))?;
            let r = coprove(&p, &[], &goal, &config(o)).map_err(usage)?;
            match r.outcome {
                Outcome::Proved(pf) => pf,
                Outcome::Failed => return Err(Failure { code: FAIL, message: "no coinductive proof".into() }),
                Outcome::DepthExceeded => {
                    return Err(Failure {
                        code: INCONCLUSIVE,
                        message: "no coinductive proof within the depth limit".into(),
                    })
                }
            }
        }
        (None, None) => return Err(usage("soundness needs --proof or --goal")),
    };
    let cfg = HarnessConfig {
        depth: o.model_depth as usize,
        word_budget: o.word_budget as usize,
        bases_per_var: bases.max(1),
        fixbeta_bound: o.fixbeta_bound as usize,
    };
    let rep = match run_harness(&pf, &p, o.calculus, &cfg) {
        Ok(r) => r,
        Err(e) => {
            return Err(Failure {
                code: FAIL,
                message: e.to_string(),
            })
        }
    };
    emit(
        o,
        json!({
            "ok": rep.ok(),
            "depth": rep.depth,
            "word_budget": rep.word_budget,
            "hypothesis_uses": rep.uses,
            "deltas": rep.deltas,
            "bases": rep.bases.len(),
        }),
        || format!("{rep}\n"),
    );
    Ok(if rep.ok() { OK } else { FAIL })
}

fn examples(o: &Opts, name: Option<&str>, all: bool) -> Run {
    let chosen: Vec<_> = match (name, all) {
        (Some(n), _) => vec![corpus::entry(n).ok_or_else(|| usage(format!("no corpus entry `{n}`")))?],
        (None, true) => ENTRIES.iter().collect(),
        (None, false) => {
            emit(
                o,
                json!(ENTRIES
                    .iter()
                    .map(|e| json!({"name": e.name, "file": e.file, "calculus": e.calculus.to_string(), "goal": e.goal}))
                    .collect::<Vec<_>>()),
                || {
                    ENTRIES
                        .iter()
                        .map(|e| format!("{:<18} {:<14} {:<8} {}\n", e.name, e.file, e.calculus, e.goal))
                        .collect()
                },
            );
            return Ok(OK);
        }
    };
    let depth = o.depth as usize;
    let bound = o.fixbeta_bound as usize;
    let results: Vec<_> = std::thread::scope(|s| {
        let hs: Vec<_> = chosen
            .iter()
            .map(|e| {
                s.spawn(move || {
                    let p = e.program();
                    let g = parse_goal(e.goal, &p).expect("corpus goals parse");
                    let cfg = SearchConfig::new(e.calculus).with_depth(depth).with_fixbeta_bound(bound);
                    let r = coprove(&p, &[], &g, &cfg).expect("corpus goals are core formulas");
                    (e, r)
                })
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("corpus worker")).collect()
    });
    let mut all_match = true;
    let mut rows = Vec::new();
    for (e, r) in &results {
        let matched = match e.expect {
            Expect::Proved => r.proof().is_some(),
            Expect::Inconclusive => matches!(r.outcome, Outcome::DepthExceeded),
        };
        all_match &= matched;
        rows.push((e, outcome_name(r), matched));
    }
    emit(
        o,
        json!(rows
            .iter()
            .map(|(e, out, m)| json!({"name": e.name, "outcome": out, "expected": format!("{:?}", e.expect).to_lowercase(), "as_expected": m}))
            .collect::<Vec<_>>()),
        || {
            rows.iter()
                .map(|(e, out, m)| format!("{:<18} {:<13} {}\n", e.name, out, if *m { "as expected" } else { "UNEXPECTED" }))
                .collect()
        },
    );
    Ok(if all_match { OK } else { FAIL })
}
