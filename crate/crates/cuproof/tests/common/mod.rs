//! Generators and oracles shared by the property suites and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use cuproof::engine::{check, coprove, Outcome, ProofNode, SearchConfig};
use cuproof::formula::{classify, Calculus, Role};
use cuproof::program::Program;
use cuproof::semantics::{distance, Interpretation, ModelConfig, Semantics, Tree};
use cuproof::syntax::{parse_goal, parse_program};
use cuproof::term::{
    alpha_eq, beta_normalize, canonical, fixbeta_unfold, free_vars, is_beta_normal, name, subst, typecheck, Context,
    Name, Signature, Term, Type,
};

// ---------------------------------------------------------------- terms

pub fn i() -> Type {
    Type::iota()
}

pub fn ii() -> Type {
    Type::arrow(i(), i())
}

pub fn term_signature() -> Signature {
    let mut s = Signature::new();
    s.declare("0", i());
    s.declare("1", i());
    s.declare("s", ii());
    s.declare("scons", Type::curried([i(), i()], i()));
    s.declare("g", Type::arrow(ii(), i()));
    s.declare("p", Type::arrow(i(), Type::o()));
    s
}

/// Bound names are drawn from a small pool so shadowing and capture come up often.
const BINDERS: [&str; 4] = ["x", "y", "z", "k"];

pub struct TermGen<'a> {
    rng: StdRng,
    sig: &'a Signature,
}

impl<'a> TermGen<'a> {
    pub fn new(seed: u64, sig: &'a Signature) -> TermGen<'a> {
        TermGen {
            rng: StdRng::seed_from_u64(seed),
            sig,
        }
    }

    pub fn rng(&mut self) -> &mut StdRng {
        &mut self.rng
    }

    fn leaves(&self, ty: &Type, scope: &[(Name, Type)]) -> Vec<Term> {
        let mut out: Vec<Term> = self
            .sig
            .declarations()
            .filter(|(_, t)| *t == ty)
            .map(|(c, _)| Term::Const(c.clone()))
            .collect();
        let mut seen = BTreeSet::new();
        for (x, t) in scope.iter().rev() {
            if seen.insert(x.clone()) && t == ty {
                out.push(Term::Var(x.clone()));
            }
        }
        out
    }

    /// A term of type `ty` whose free variables come from `scope`.
    pub fn term(&mut self, ty: &Type, scope: &mut Vec<(Name, Type)>, depth: usize) -> Term {
        let leaves = self.leaves(ty, scope);
        let choice = if depth == 0 { 0 } else { self.rng.gen_range(0..10) };
        match (choice, ty) {
            (0..=2, _) if !leaves.is_empty() => leaves[self.rng.gen_range(0..leaves.len())].clone(),
            (3..=5, _) => {
                let arg_ty = if self.rng.gen_bool(0.75) { i() } else { ii() };
                let f = self.term(&Type::arrow(arg_ty.clone(), ty.clone()), scope, depth - 1);
                let a = self.term(&arg_ty, scope, depth - 1);
                Term::app(f, a)
            }
            (6..=7, Type::Arrow(a, b)) => {
                let x = BINDERS[self.rng.gen_range(0..BINDERS.len())];
                scope.push((name(x), (**a).clone()));
                let body = self.term(b, scope, depth - 1);
                scope.pop();
                Term::abs(x, (**a).clone(), body)
            }
            (8, _) if *ty == i() || *ty == ii() => {
                let x = if *ty == i() { "f" } else { "h" };
                scope.push((name(x), ty.clone()));
                let body = self.term(ty, scope, depth - 1);
                scope.pop();
                Term::fix(Term::abs(x, ty.clone(), body))
            }
            _ => self.fallback(ty, scope, depth),
        }
    }

    fn fallback(&mut self, ty: &Type, scope: &mut Vec<(Name, Type)>, depth: usize) -> Term {
        let leaves = self.leaves(ty, scope);
        if !leaves.is_empty() {
            return leaves[self.rng.gen_range(0..leaves.len())].clone();
        }
        match ty {
            Type::Arrow(a, b) => {
                let x = BINDERS[self.rng.gen_range(0..BINDERS.len())];
                scope.push((name(x), (**a).clone()));
                let body = self.term(b, scope, depth.saturating_sub(1));
                scope.pop();
                Term::abs(x, (**a).clone(), body)
            }
            _ => Term::app(Term::cnst("p"), Term::cnst("0")),
        }
    }

    pub fn pick_type(&mut self) -> Type {
        match self.rng.gen_range(0..4) {
            0 | 1 => i(),
            2 => ii(),
            _ => Type::o(),
        }
    }
}

pub fn ctx_of(scope: &[(Name, Type)]) -> Context {
    scope.iter().cloned().collect()
}

/// Renames every binder to a fresh name, giving an α-variant.
pub fn rename_binders(t: &Term, counter: &mut usize) -> Term {
    fn go(t: &Term, env: &mut Vec<(Name, Name)>, counter: &mut usize) -> Term {
        match t {
            Term::Var(x) => match env.iter().rev().find(|(o, _)| o == x) {
                Some((_, n)) => Term::Var(n.clone()),
                None => t.clone(),
            },
            Term::Const(_) => t.clone(),
            Term::App(f, a) => Term::App(Arc::new(go(f, env, counter)), Arc::new(go(a, env, counter))),
            Term::Fix(b) => Term::Fix(Arc::new(go(b, env, counter))),
            Term::Abs(x, ty, b) => {
                *counter += 1;
                let n = name(&format!("v{counter}"));
                env.push((x.clone(), n.clone()));
                let body = go(b, env, counter);
                env.pop();
                Term::Abs(n, ty.clone(), Arc::new(body))
            }
        }
    }
    go(t, &mut Vec::new(), counter)
}

fn same_type(sig: &Signature, ctx: &Context, t: &Term, expected: &Type, what: &str) -> Result<(), String> {
    match typecheck(sig, ctx, t) {
        Ok(ty) if ty == *expected => Ok(()),
        Ok(ty) => Err(format!("{what}: type changed from {expected} to {ty} for {t}")),
        Err(e) => Err(format!("{what}: {e} for {t}")),
    }
}

/// Substitution, β-normalization and one fix-β step preserve types.
pub fn prop_type_preservation(seed: u64) -> Result<(), String> {
    let sig = term_signature();
    let mut g = TermGen::new(seed, &sig);
    let mut scope = vec![(name("x"), i()), (name("y"), i()), (name("k"), ii())];
    let ctx = ctx_of(&scope);
    let ty = g.pick_type();
    let t = g.term(&ty, &mut scope, 5);
    same_type(&sig, &ctx, &t, &ty, "generated term")?;
    // `n` mentions `y`, which `t` may bind: substitution has to rename.
    let mut nscope = vec![(name("y"), i())];
    let n = g.term(&i(), &mut nscope, 3);
    let r = subst(&t, "x", &n);
    same_type(&sig, &ctx, &r, &ty, "substitution")?;
    if free_vars(&t).contains("x") && free_vars(&n).contains("y") && !free_vars(&r).contains("y") {
        return Err(format!("substitution captured `y`: {t} [x := {n}] = {r}"));
    }
    let b = beta_normalize(&t);
    same_type(&sig, &ctx, &b, &ty, "beta normalization")?;
    if b.contains_fix() {
        let u = fixbeta_unfold(&b).map_err(|e| format!("fix-beta step failed on {b}: {e}"))?;
        same_type(&sig, &ctx, &u, &ty, "fix-beta step")?;
    }
    Ok(())
}

/// α-equivalence is a congruence for application, substitution and normalization.
pub fn prop_alpha_congruence(seed: u64) -> Result<(), String> {
    let sig = term_signature();
    let mut g = TermGen::new(seed, &sig);
    let mut scope = vec![(name("x"), i()), (name("y"), i())];
    let ty = g.pick_type();
    let a = g.term(&ty, &mut scope, 5);
    let b = rename_binders(&a, &mut 0);
    if !alpha_eq(&a, &b) || canonical(&a) != canonical(&b) {
        return Err(format!("renaming binders broke α-equivalence: {a} vs {b}"));
    }
    let n = g.term(&i(), &mut vec![(name("y"), i())], 3);
    if !alpha_eq(&subst(&a, "x", &n), &subst(&b, "x", &n)) {
        return Err(format!("substitution is not α-congruent on {a}"));
    }
    if !alpha_eq(&beta_normalize(&a), &beta_normalize(&b)) {
        return Err(format!("β-normalization is not α-congruent on {a}"));
    }
    let f = Term::abs("w", ty.clone(), Term::cnst("0"));
    if !alpha_eq(&Term::app(f.clone(), a.clone()), &Term::app(f, b)) {
        return Err("application is not α-congruent".into());
    }
    let c = g.term(&ty, &mut scope, 5);
    if alpha_eq(&a, &c) != (canonical(&a) == canonical(&c)) {
        return Err(format!("alpha_eq and canonical disagree on {a} and {c}"));
    }
    Ok(())
}

/// β-normal forms are normal, and normalizing twice changes nothing.
pub fn prop_beta_idempotent(seed: u64) -> Result<(), String> {
    let sig = term_signature();
    let mut g = TermGen::new(seed, &sig);
    let mut scope = vec![(name("x"), i())];
    let ty = g.pick_type();
    let t = g.term(&ty, &mut scope, 6);
    let n = beta_normalize(&t);
    if !is_beta_normal(&n) {
        return Err(format!("{n} is not β-normal"));
    }
    if beta_normalize(&n) != n {
        return Err(format!("normalizing {n} again changed it"));
    }
    Ok(())
}

// ---------------------------------------------------------------- trees

pub fn arb_tree() -> impl Strategy<Value = Tree> {
    let leaf = prop_oneof![Just(Tree::leaf("a")), Just(Tree::leaf("b")), Just(Tree::star())];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Tree::node("f", vec![t])),
            (inner.clone(), inner).prop_map(|(l, r)| Tree::node("g", vec![l, r])),
        ]
    })
}

pub fn prop_ultrametric(x: &Tree, y: &Tree, z: &Tree) -> Result<(), String> {
    let (xy, yz, xz) = (distance(x, y), distance(y, z), distance(x, z));
    if xz.value() > xy.value().max(yz.value()) {
        return Err(format!("d({x},{z}) = {xz} exceeds max({xy}, {yz})"));
    }
    if distance(y, x) != xy {
        return Err("distance is not symmetric".into());
    }
    if (xy.value() == 0.0) != (x == y) {
        return Err(format!("d({x},{y}) = {xy} but equality is {}", x == y));
    }
    for n in 0..6 {
        if !distance(x, &x.truncate(n)).at_most_pow2(n as u32) {
            return Err(format!("truncation of {x} at {n} is too far away"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- programs

#[derive(Clone, Debug)]
pub enum Arg {
    A,
    B,
    X,
    SX,
}

#[derive(Clone, Debug)]
pub struct RAtom {
    pub pred: &'static str,
    pub arg: Option<Arg>,
}

#[derive(Clone, Debug)]
pub struct RClause {
    pub head: RAtom,
    pub body: Vec<RAtom>,
}

#[derive(Clone, Debug)]
pub struct RProgram {
    pub props: Vec<&'static str>,
    pub unary: Vec<&'static str>,
    pub with_succ: bool,
    pub clauses: Vec<RClause>,
}

const PROPS: [&str; 3] = ["u", "v", "w"];
const UNARY: [&str; 3] = ["p", "q", "r"];

fn show_arg(a: &Arg) -> &'static str {
    match a {
        Arg::A => "a",
        Arg::B => "b",
        Arg::X => "x",
        Arg::SX => "(s x)",
    }
}

impl RAtom {
    fn show(&self) -> String {
        match &self.arg {
            None => self.pred.to_string(),
            Some(a) => format!("{} {}", self.pred, show_arg(a)),
        }
    }

    fn uses_x(&self) -> bool {
        matches!(self.arg, Some(Arg::X) | Some(Arg::SX))
    }

    /// Ground instance for `x := c`; `s x` is not allowed here.
    fn ground(&self, c: &'static str) -> Tree {
        match &self.arg {
            None => Tree::leaf(self.pred),
            Some(Arg::A) => Tree::node(self.pred, vec![Tree::leaf("a")]),
            Some(Arg::B) => Tree::node(self.pred, vec![Tree::leaf("b")]),
            Some(Arg::X) => Tree::node(self.pred, vec![Tree::leaf(c)]),
            Some(Arg::SX) => panic!("finite-universe programs have no `s`"),
        }
    }
}

impl RProgram {
    /// At most six predicates and at most ten clauses; `with_succ` adds `s : i -> i`.
    pub fn generate(rng: &mut StdRng, with_succ: bool) -> RProgram {
        let n0 = rng.gen_range(0..=3);
        let n1 = rng.gen_range(if n0 == 0 { 1 } else { 0 }..=3);
        let props = PROPS[..n0].to_vec();
        let unary = UNARY[..n1].to_vec();
        let atom = |rng: &mut StdRng, var_ok: bool| -> RAtom {
            let k = rng.gen_range(0..n0 + n1);
            if k < n0 {
                RAtom { pred: props[k], arg: None }
            } else {
                let arg = match rng.gen_range(0..if var_ok { if with_succ { 4 } else { 3 } } else { 2 }) {
                    0 => Arg::A,
                    1 => Arg::B,
                    2 => Arg::X,
                    _ => Arg::SX,
                };
                RAtom {
                    pred: unary[k - n0],
                    arg: Some(arg),
                }
            }
        };
        let n = rng.gen_range(1..=10);
        let clauses = (0..n)
            .map(|_| {
                let head = atom(rng, true);
                let nb = rng.gen_range(0..=3);
                let body = (0..nb).map(|_| atom(rng, true)).collect();
                RClause { head, body }
            })
            .collect();
        RProgram {
            props,
            unary,
            with_succ,
            clauses,
        }
    }

    /// The `{p => p}` pattern, whose greatest and least fixed points differ.
    pub fn self_loop() -> RProgram {
        RProgram {
            props: vec!["u"],
            unary: vec![],
            with_succ: false,
            clauses: vec![RClause {
                head: RAtom { pred: "u", arg: None },
                body: vec![RAtom { pred: "u", arg: None }],
            }],
        }
    }

    pub fn source(&self) -> String {
        let mut s = String::from("const a b : i.\n");
        if self.with_succ {
            s += "const s : i -> i.\n";
        }
        if !self.props.is_empty() {
            s += &format!("const {} : o.\n", self.props.join(" "));
        }
        if !self.unary.is_empty() {
            s += &format!("const {} : i -> o.\n", self.unary.join(" "));
        }
        for c in &self.clauses {
            let q = if c.head.uses_x() || c.body.iter().any(RAtom::uses_x) {
                "forall x. "
            } else {
                ""
            };
            if c.body.is_empty() {
                s += &format!("{q}{}.\n", c.head.show());
            } else {
                let body: Vec<_> = c.body.iter().map(RAtom::show).collect();
                s += &format!("{q}{} => {}.\n", body.join(" /\\ "), c.head.show());
            }
        }
        s
    }

    pub fn program(&self) -> Program {
        parse_program(&self.source()).unwrap_or_else(|e| panic!("{e}\n{}", self.source()))
    }

    /// Every ground atom over the constants `a` and `b`.
    pub fn atoms(&self) -> Vec<Tree> {
        let mut out: Vec<Tree> = self.props.iter().map(|p| Tree::leaf(p)).collect();
        for p in &self.unary {
            for c in ["a", "b"] {
                out.push(Tree::node(p, vec![Tree::leaf(c)]));
            }
        }
        out
    }

    /// Ground instances as (body, head) pairs.
    fn ground_clauses(&self) -> Vec<(Vec<Tree>, Tree)> {
        let mut out = Vec::new();
        for c in &self.clauses {
            let consts: &[&'static str] = if c.head.uses_x() || c.body.iter().any(RAtom::uses_x) {
                &["a", "b"]
            } else {
                &["a"]
            };
            for &k in consts {
                out.push((c.body.iter().map(|b| b.ground(k)).collect(), c.head.ground(k)));
            }
        }
        out
    }

    /// The immediate consequence operator, computed from the ground instances.
    pub fn oracle_t(&self, i: &BTreeSet<Tree>) -> BTreeSet<Tree> {
        self.ground_clauses()
            .into_iter()
            .filter(|(body, _)| body.iter().all(|b| i.contains(b)))
            .map(|(_, h)| h)
            .collect()
    }

    fn subsets(&self) -> Vec<BTreeSet<Tree>> {
        let atoms = self.atoms();
        (0u32..1 << atoms.len())
            .map(|m| atoms.iter().enumerate().filter(|(k, _)| m >> k & 1 == 1).map(|(_, a)| a.clone()).collect())
            .collect()
    }

    /// Greatest fixed point as the union of all post-fixed points of the powerset.
    pub fn brute_gfp(&self) -> BTreeSet<Tree> {
        let mut out = BTreeSet::new();
        for x in self.subsets() {
            if x.is_subset(&self.oracle_t(&x)) {
                out.extend(x);
            }
        }
        out
    }

    /// Least fixed point as the intersection of all pre-fixed points of the powerset.
    pub fn brute_lfp(&self) -> BTreeSet<Tree> {
        let mut out: Option<BTreeSet<Tree>> = None;
        for x in self.subsets() {
            if self.oracle_t(&x).is_subset(&x) {
                out = Some(match out {
                    None => x,
                    Some(o) => o.intersection(&x).cloned().collect(),
                });
            }
        }
        out.unwrap_or_default()
    }
}

/// The model's greatest fixed point agrees with the powerset oracle.
pub fn prop_gfp_oracle(rp: &RProgram) -> Result<(), String> {
    let sem = Semantics::new(&rp.program(), ModelConfig::new(2)).map_err(|e| e.to_string())?;
    let gfp: BTreeSet<Tree> = sem.gfp().map_err(|e| e.to_string())?;
    let brute = rp.brute_gfp();
    if gfp != brute {
        return Err(format!(
            "gfp mismatch on\n{}computed {:?}\nexpected {:?}",
            rp.source(),
            gfp.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            brute.iter().map(|t| t.to_string()).collect::<Vec<_>>()
        ));
    }
    Ok(())
}

/// `I ⊆ J` implies `T(I) ⊆ T(J)`, and on finite universes `T` matches the oracle.
pub fn prop_t_monotone(seed: u64) -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let with_succ = rng.gen_bool(0.5);
    let rp = RProgram::generate(&mut rng, with_succ);
    let depth = if with_succ { 3 } else { 2 };
    let sem = Semantics::new(&rp.program(), ModelConfig::new(depth)).map_err(|e| e.to_string())?;
    let top: Vec<Tree> = sem.top().map_err(|e| e.to_string())?.into_iter().collect();
    let j: Interpretation = top.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
    let i: Interpretation = j.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
    let ti = sem.t_operator(&i).map_err(|e| e.to_string())?;
    let tj = sem.t_operator(&j).map_err(|e| e.to_string())?;
    if !ti.is_subset(&tj) {
        return Err(format!("T is not monotone on\n{}", rp.source()));
    }
    if !with_succ && ti != rp.oracle_t(&i) {
        return Err(format!("T disagrees with the ground-instance oracle on\n{}", rp.source()));
    }
    Ok(())
}

// ---------------------------------------------------------------- search

/// A random H-shaped goal over the program's predicates, in concrete syntax.
pub fn random_core_goal(rng: &mut StdRng, rp: &RProgram) -> String {
    let atoms: Vec<String> = rp
        .props
        .iter()
        .map(|p| p.to_string())
        .chain(rp.unary.iter().flat_map(|p| [format!("{p} x"), format!("{p} a")]))
        .collect();
    let pick = |rng: &mut StdRng| atoms[rng.gen_range(0..atoms.len())].clone();
    let head = pick(rng);
    let nb = rng.gen_range(0..=2);
    let body: Vec<String> = (0..nb).map(|_| pick(rng)).collect();
    let f = if body.is_empty() {
        head
    } else {
        format!("{} => {head}", body.join(" /\\ "))
    };
    if f.contains(" x") {
        format!("forall x. {f}")
    } else {
        f
    }
}

fn small_config(c: Calculus) -> SearchConfig {
    let mut cfg = SearchConfig::new(c).with_depth(7);
    cfg.node_budget = 20_000;
    cfg
}

/// Changes the goal of one node so that the tree is no longer a proof.
pub fn corrupt(p: &ProofNode, path: &[usize], replacement: &cuproof::formula::Formula) -> ProofNode {
    let mut out = p.clone();
    let mut cur = &mut out;
    for &k in path {
        cur = &mut cur.children[k];
    }
    cur.goal = replacement.clone();
    out
}

fn node_paths(p: &ProofNode, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for (k, c) in p.children.iter().enumerate() {
        prefix.push(k);
        node_paths(c, prefix, out);
        prefix.pop();
    }
}

/// Found proofs check, in the calculus they were found in and in every larger
/// one; a proof with one goal replaced is rejected.
pub fn prop_search_check_agreement(seed: u64) -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let with_succ = rng.gen_bool(0.3);
    let rp = RProgram::generate(&mut rng, with_succ);
    let p = rp.program();
    let src = random_core_goal(&mut rng, &rp);
    let goal = parse_goal(&src, &p).map_err(|e| format!("{src}: {e}"))?;
    let calcs = classify(&p.signature, &goal, Role::Core).map_err(|e| e.to_string())?;
    let Some(&least) = calcs.iter().next() else {
        return Ok(());
    };
    let r = coprove(&p, &[], &goal, &small_config(least)).map_err(|e| format!("{src}: {e}"))?;
    let Outcome::Proved(pf) = r.outcome else {
        return Ok(());
    };
    for c in Calculus::ALL.into_iter().filter(|c| least.embeds_into(*c)) {
        if let Some(f) = check(&pf, &p, c, 8).failure {
            return Err(format!("proof of {src} found in {least} fails in {c}: {}\n{}", f.reason, rp.source()));
        }
    }
    let mut paths = Vec::new();
    node_paths(&pf, &mut Vec::new(), &mut paths);
    let path = &paths[rng.gen_range(0..paths.len())];
    let bogus = parse_goal("a_bogus_goal", &with_bogus(&p)).map_err(|e| e.to_string())?;
    if check(&corrupt(&pf, path, &bogus), &with_bogus(&p), least, 8).valid() {
        return Err(format!("corrupted proof of {src} at {path:?} still checks"));
    }
    Ok(())
}

fn with_bogus(p: &Program) -> Program {
    let mut q = p.clone();
    q.signature.declare("a_bogus_goal", Type::o());
    q
}
