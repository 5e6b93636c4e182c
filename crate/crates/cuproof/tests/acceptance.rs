//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero on any FAIL.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::*;
use cuproof::corpus;
use cuproof::engine::{check, coprove, Outcome, SearchConfig};
use cuproof::formula::{alpha_eq_formula, classify, Calculus, HClause, Role};
use cuproof::guard::{is_guarded_fixed_point, snapshot};
use cuproof::harness::{conservative_extension_check, lemma_instances, run_harness, HarnessConfig};
use cuproof::semantics::{distance, term_to_tree, Membership};
use cuproof::syntax::{parse_goal, parse_term, proofdoc};
use cuproof::term::{fixbeta_unfold, Context, Term, Type};

type Outcome8 = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Rule sequences (pre-order) of the four regression proofs.
const EXPECTED_RULES: [(&str, &[&str]); 4] = [
    (
        "member-eq",
        &[
            "co-fix", "decide<>", "forall-l<>", "forall-l<>", "forall-l<>", "imp-l<>", "initial", "and-r", "decide",
            "initial", "decide", "forall-l", "initial",
        ],
    ),
    (
        "bitstream-zeros",
        &[
            "co-fix", "decide<>", "forall-l<>", "forall-l<>", "imp-l<>", "initial", "and-r", "decide", "initial",
            "decide", "initial",
        ],
    ),
    (
        "from-successors",
        &[
            "co-fix", "forall-r<>", "decide<>", "forall-l<>", "forall-l<>", "imp-l<>", "initial", "decide", "forall-l",
            "initial",
        ],
    ),
    (
        "comember-bit",
        &[
            "co-fix", "forall-r<>", "forall-r<>", "imp-r<>", "decide<>", "forall-l<>", "forall-l<>", "imp-l<>",
            "initial", "and-r", "decide", "forall-l", "forall-l", "imp-l", "initial", "decide", "initial", "decide",
            "initial",
        ],
    ),
];

fn regression_proofs() -> Outcome8 {
    let mut slowest = Duration::ZERO;
    for (name, rules) in EXPECTED_RULES {
        let e = corpus::entry(name).unwrap();
        let p = e.program();
        let goal = parse_goal(e.goal, &p).map_err(|err| err.to_string())?;
        let start = Instant::now();
        let r = coprove(&p, &[], &goal, &SearchConfig::new(e.calculus)).map_err(|err| err.to_string())?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        let pf = r.proof().ok_or_else(|| format!("{name}: no proof"))?;
        ensure(took < Duration::from_secs(1), || format!("{name}: took {took:?}"))?;
        ensure(alpha_eq_formula(&pf.goal, &goal), || format!("{name}: hypothesis differs from the goal"))?;
        let got: Vec<_> = pf.rules().iter().map(|r| r.name()).collect();
        ensure(got == rules, || format!("{name}: rules {got:?}"))?;
        // What `cup check-proof` does with an emitted file.
        let doc = proofdoc::to_json(pf, &p);
        let back = proofdoc::from_json(&doc, &p).map_err(|err| format!("{name}: {err}"))?;
        ensure(check(&back, &p, e.calculus, 8).valid(), || format!("{name}: re-imported proof does not check"))?;
    }
    Ok(format!("4 proofs reproduced and checked, slowest {slowest:?}"))
}

fn fragment_table() -> Outcome8 {
    let member = corpus::load("member").unwrap();
    let from = corpus::load("from").unwrap();
    let all: BTreeSet<_> = Calculus::ALL.into_iter().collect();
    let harrop: BTreeSet<_> = [Calculus::Fohh, Calculus::Hohh].into_iter().collect();
    let only_hohh: BTreeSet<_> = [Calculus::Hohh].into_iter().collect();
    let rows = [
        (&member, "exists x. member 0 [0|1|x] /\\ member 1 [0|1|x]", Role::Goal, &all),
        (&member, "forall x. member 0 [0|1|x]", Role::Goal, &harrop),
        (&member, "forall x. member 0 [0|1|x] => member 1 [0|1|x]", Role::Goal, &harrop),
        (&from, "forall x. from x (fr_str x)", Role::Core, &only_hohh),
    ];
    for (p, src, role, want) in rows {
        let f = parse_goal(src, p).map_err(|e| e.to_string())?;
        let got = classify(&p.signature, &f, role).map_err(|e| e.to_string())?;
        ensure(&got == want, || format!("{src}: {got:?}"))?;
    }
    Ok("4 classifications match exactly".into())
}

fn guardedness() -> Outcome8 {
    let bits = corpus::load("bitstream").unwrap();
    let from = corpus::load("from").unwrap();
    let fibs = corpus::load("fibs").unwrap();
    for (p, d) in [(&bits, "z_str"), (&bits, "n_str"), (&from, "fr_str"), (&fibs, "fib_str")] {
        let t = &p.def(d).unwrap().term;
        ensure(is_guarded_fixed_point(&p.signature, t), || format!("{d} is not guarded"))?;
    }
    let id = Term::fix(Term::abs("x", Type::iota(), Term::var("x")));
    ensure(!is_guarded_fixed_point(&bits.signature, &id), || "fix \\x. x passed".into())?;
    let atoms = [
        (&bits, "bitstream z_str"),
        (&bits, "bitstream [0|n_str 0]"),
        (&from, "from 0 (fr_str 0)"),
        (&from, "from (s 0) (fr_str (s 0))"),
        (&fibs, "fibs 0 (s 0) (fib_str 0 (s 0))"),
    ];
    for (p, src) in atoms {
        let mut cur = parse_term(src, p, &[], None).map_err(|e| e.to_string())?;
        let snap = |t: &Term| -> Result<_, String> {
            let s = snapshot(&p.signature, &Context::new(), t).map_err(|e| e.to_string())?;
            term_to_tree(&s).map_err(|e| e.to_string())
        };
        let mut prev = snap(&cur)?;
        for k in 1..=12u32 {
            cur = fixbeta_unfold(&cur).map_err(|e| e.to_string())?;
            let next = snap(&cur)?;
            let d = distance(&prev, &next);
            ensure(d.at_most_pow2(k), || format!("{src}: unfold {k} moved the snapshot by {d}"))?;
            prev = next;
        }
    }
    Ok("4 definitions guarded, fix \\x. x rejected, 5 atoms converge for k = 1..12".into())
}

fn semantics_oracle() -> Outcome8 {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut n = 0;
    for _ in 0..40 {
        prop_gfp_oracle(&RProgram::generate(&mut rng, false))?;
        n += 1;
    }
    let lp = RProgram::self_loop();
    prop_gfp_oracle(&lp)?;
    ensure(lp.brute_gfp() != lp.brute_lfp(), || "self loop has gfp = lfp".into())?;
    Ok(format!("{} programs agree with the powerset oracle, including u => u", n + 1))
}

fn soundness_harness() -> Outcome8 {
    let mut runs = 0;
    for (name, _) in EXPECTED_RULES {
        let e = corpus::entry(name).unwrap();
        let p = e.program();
        let goal = parse_goal(e.goal, &p).map_err(|err| err.to_string())?;
        let r = coprove(&p, &[], &goal, &SearchConfig::new(e.calculus)).map_err(|err| err.to_string())?;
        let pf = r.proof().ok_or_else(|| format!("{name}: no proof"))?;
        for depth in 2..=6 {
            for word_budget in 0..=3 {
                let cfg = HarnessConfig {
                    depth,
                    word_budget,
                    ..HarnessConfig::default()
                };
                let rep = run_harness(pf, &p, e.calculus, &cfg).map_err(|err| format!("{name} d={depth}: {err}"))?;
                for b in rep.bases.iter().filter(|b| b.skipped.is_none()) {
                    ensure(b.postfixed && b.counterexamples.is_empty(), || format!("{name} d={depth} w={word_budget}: {rep}"))?;
                    ensure(b.head_membership == Some(Membership::InApprox), || {
                        format!("{name} d={depth} w={word_budget}: head {} not in the model", b.head)
                    })?;
                }
                ensure(rep.ok() && rep.bases.iter().any(|b| b.skipped.is_none()), || format!("{name}: {rep}"))?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} harness runs post-fixed with heads in the model"))
}

fn conservative_extension() -> Outcome8 {
    let bits = corpus::load("bitstream").unwrap();
    let lemma = HClause::fact(parse_term("bitstream [0|n_str 0]", &bits, &[], None).map_err(|e| e.to_string())?);
    let r = conservative_extension_check(&bits, &[lemma], 4).map_err(|e| e.to_string())?;
    ensure(r.equal, || format!("bitstream lemma changed the model: {:?}", r.only_in_extended))?;

    let from = corpus::load("from").unwrap();
    let f = parse_goal("forall x. from x (fr_str x)", &from).map_err(|e| e.to_string())?;
    let tuples: Vec<Vec<Term>> = ["0", "s 0", "s (s 0)", "s (s (s 0))"]
        .iter()
        .map(|s| vec![parse_term(s, &from, &[], None).unwrap()])
        .collect();
    let inst = lemma_instances(&f, &tuples).map_err(|e| e.to_string())?;
    let r = conservative_extension_check(&from, &inst, 4).map_err(|e| e.to_string())?;
    ensure(r.equal, || format!("from instances changed the model: {:?}", r.only_in_extended))?;

    let alien = HClause::fact(parse_term("bit (s 0)", &bits, &[], None).map_err(|e| e.to_string())?);
    let r = conservative_extension_check(&bits, &[alien], 4).map_err(|e| e.to_string())?;
    ensure(!r.equal && !r.only_in_extended.is_empty(), || "alien fact left the model unchanged".into())?;
    Ok(format!(
        "lemma and 4 instances conservative at depth 4; bit (s 0) adds {} atoms",
        r.only_in_extended.len()
    ))
}

fn negative_cases() -> Outcome8 {
    let e = corpus::entry("from-zero-atomic").unwrap();
    let p = e.program();
    let goal = parse_goal(e.goal, &p).map_err(|err| err.to_string())?;
    for d in [1, 2, 4, 8, 16, 32, 64] {
        let r = coprove(&p, &[], &goal, &SearchConfig::new(Calculus::Hohc).with_depth(d)).map_err(|err| err.to_string())?;
        ensure(matches!(r.outcome, Outcome::DepthExceeded), || format!("from 0 (fr_str 0) at depth {d}: not inconclusive"))?;
    }
    let e = corpus::entry("fibs").unwrap();
    let p = e.program();
    let goal = parse_goal(e.goal, &p).map_err(|err| err.to_string())?;
    let r = coprove(&p, &[], &goal, &SearchConfig::new(e.calculus)).map_err(|err| err.to_string())?;
    ensure(matches!(r.outcome, Outcome::DepthExceeded), || "fibs goal was not inconclusive".into())?;
    ensure(p.limitation_note().is_some(), || "fibs program carries no limitation note".into())?;
    Ok("from 0 (fr_str 0) inconclusive at depths 1..64; fibs inconclusive and flagged".into())
}

/// Runs one suite of 10,000 cases. A runner counts successes across calls, so
/// each suite gets its own.
fn run_prop<S: Strategy>(s: S, f: impl Fn(S::Value) -> Result<(), String>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let count = std::cell::Cell::new(0u32);
    runner
        .run(&s, |v| {
            count.set(count.get() + 1);
            f(v).map_err(TestCaseError::fail)
        })
        .map_err(|e| e.to_string())?;
    ensure(count.get() >= 10_000, || format!("only {} cases ran", count.get()))
}

fn kernel_properties() -> Outcome8 {
    let seed = any::<u64>();
    run_prop(seed.clone(), prop_type_preservation).map_err(|e| format!("type preservation: {e}"))?;
    run_prop(seed.clone(), prop_alpha_congruence).map_err(|e| format!("alpha congruence: {e}"))?;
    run_prop(seed.clone(), prop_beta_idempotent).map_err(|e| format!("beta idempotence: {e}"))?;
    run_prop((arb_tree(), arb_tree(), arb_tree()), |(x, y, z)| prop_ultrametric(&x, &y, &z))
        .map_err(|e| format!("ultrametric: {e}"))?;
    run_prop(seed.clone(), prop_t_monotone).map_err(|e| format!("T monotone: {e}"))?;
    run_prop(seed, prop_search_check_agreement).map_err(|e| format!("search/check: {e}"))?;
    Ok("6 suites x 10000 cases".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome8); 8] = [
        ("regression proofs", regression_proofs),
        ("fragment table", fragment_table),
        ("guardedness and productivity", guardedness),
        ("semantics oracle equivalence", semantics_oracle),
        ("post-fixed point harness", soundness_harness),
        ("conservative extension", conservative_extension),
        ("negative cases", negative_cases),
        ("kernel properties", kernel_properties),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match res {
            Ok(msg) => println!("PASS {} {name}: {msg} ({:.2?})", k + 1, start.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
