//! Goal-directed proof search with iterative deepening on proof height.
//!
//! Right rules decompose the goal; an atomic goal is closed by DECIDE on a clause
//! followed by left rules on the focused clause. Under the coinductive guard only
//! the guarded rules apply and DECIDE may only pick original program clauses, so
//! the coinductive hypothesis cannot be used before a clause has been resolved.

use std::collections::HashSet;

use thiserror::Error;

use super::proof::{ProofNode, Rule, SearchConfig};
use super::unify::Unifier;
use crate::formula::{classify, free_vars, rename_bound, subst, Calculus, Formula, Role};
use crate::guard::is_guarded_full;
use crate::program::Program;
use crate::term::{
    self, alpha_eq, canonical, fixbeta_equiv, fresh_variant, is_closed, typecheck, Context, Equiv,
    Name, Signature, Term, Type,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("not a core formula of {0}: {1}")]
    NotCoreFormula(Calculus, String),
    #[error("not a goal formula of {0}: {1}")]
    NotAGoal(Calculus, String),
    #[error("flexible atoms are not supported by the search procedure: {0}")]
    FlexibleAtomUnsupported(String),
    #[error("ill-typed input: {0}")]
    IllTyped(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    /// Largest height bound tried.
    pub bound: usize,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Proved(ProofNode),
    /// No proof within the height limit; the search space was not exhausted.
    DepthExceeded,
    /// The search space was exhausted without hitting any bound.
    Failed,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn proof(&self) -> Option<&ProofNode> {
        match &self.outcome {
            Outcome::Proved(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone)]
struct Scope {
    sig: Signature,
    eigen: Vec<(Name, Type)>,
    ch: Option<Formula>,
    hyps: Vec<Formula>,
}

struct Searcher<'a> {
    program: &'a Program,
    lemmas: &'a [Formula],
    cfg: &'a SearchConfig,
    nodes: u64,
    round_nodes: u64,
    /// A branch was cut by the height bound or node budget.
    cutoff: bool,
    /// A heuristic witness pool was consulted, so failure is not definite.
    heuristic: bool,
}

/// Uniform proof search for `goal` in the configured calculus.
pub fn prove(program: &Program, lemmas: &[Formula], goal: &Formula, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    let roles = classify(&program.signature, goal, Role::Goal).map_err(|e| SearchError::IllTyped(e.to_string()))?;
    if !roles.contains(&cfg.calculus) {
        return Err(SearchError::NotAGoal(cfg.calculus, crate::syntax::pretty_formula(goal, program)));
    }
    precheck(program, lemmas, goal)?;
    Ok(deepen(program, lemmas, cfg, |s, bound| {
        s.goal(&root_scope(program), goal, false, bound)
    }))
}

/// Coinductive search: CO-FIX on a core formula, then the guarded phase.
pub fn coprove(program: &Program, lemmas: &[Formula], goal: &Formula, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    let roles = classify(&program.signature, goal, Role::Core).map_err(|e| SearchError::IllTyped(e.to_string()))?;
    if !roles.contains(&cfg.calculus) {
        return Err(SearchError::NotCoreFormula(cfg.calculus, crate::syntax::pretty_formula(goal, program)));
    }
    precheck(program, lemmas, goal)?;
    Ok(deepen(program, lemmas, cfg, |s, bound| {
        if bound == 0 {
            s.cutoff = true;
            return None;
        }
        let mut sc = root_scope(program);
        sc.ch = Some(goal.clone());
        let child = s.goal(&sc, goal, true, bound - 1)?;
        Some(ProofNode {
            rule: Rule::CoFix,
            sig_add: Vec::new(),
            prog_add: vec![goal.clone()],
            focus: None,
            goal: goal.clone(),
            guarded: false,
            witness: None,
            children: vec![child],
        })
    }))
}

fn root_scope(program: &Program) -> Scope {
    Scope {
        sig: program.signature.clone(),
        eigen: Vec::new(),
        ch: None,
        hyps: Vec::new(),
    }
}

fn precheck(program: &Program, lemmas: &[Formula], goal: &Formula) -> Result<(), SearchError> {
    let all = program.formulas().chain(lemmas.iter()).chain(std::iter::once(goal));
    for f in all {
        for a in f.atoms() {
            if !matches!(a.spine().0, Term::Const(_)) {
                return Err(SearchError::FlexibleAtomUnsupported(crate::syntax::pretty_term(a, program)));
            }
        }
    }
    Ok(())
}

fn deepen(
    program: &Program,
    lemmas: &[Formula],
    cfg: &SearchConfig,
    mut attempt: impl FnMut(&mut Searcher<'_>, usize) -> Option<ProofNode>,
) -> SearchResult {
    let mut s = Searcher {
        program,
        lemmas,
        cfg,
        nodes: 0,
        round_nodes: 0,
        cutoff: false,
        heuristic: false,
    };
    for bound in 1..=cfg.depth_limit {
        s.cutoff = false;
        s.round_nodes = 0;
        if let Some(p) = attempt(&mut s, bound) {
            return SearchResult {
                outcome: Outcome::Proved(p),
                stats: SearchStats { nodes: s.nodes, bound },
            };
        }
        if !s.cutoff {
            let outcome = if s.heuristic { Outcome::DepthExceeded } else { Outcome::Failed };
            return SearchResult {
                outcome,
                stats: SearchStats { nodes: s.nodes, bound },
            };
        }
    }
    SearchResult {
        outcome: Outcome::DepthExceeded,
        stats: SearchStats {
            nodes: s.nodes,
            bound: cfg.depth_limit,
        },
    }
}

fn node(rule: Rule, goal: &Formula, guarded: bool, children: Vec<ProofNode>) -> ProofNode {
    ProofNode {
        rule,
        sig_add: Vec::new(),
        prog_add: Vec::new(),
        focus: None,
        goal: goal.clone(),
        guarded,
        witness: None,
        children,
    }
}

impl Searcher<'_> {
    fn tick(&mut self, depth: usize) -> bool {
        if depth == 0 || self.round_nodes >= self.cfg.node_budget {
            self.cutoff = true;
            return false;
        }
        self.nodes += 1;
        self.round_nodes += 1;
        true
    }

    fn goal(&mut self, sc: &Scope, g: &Formula, guarded: bool, depth: usize) -> Option<ProofNode> {
        if !self.tick(depth) {
            return None;
        }
        let d = depth - 1;
        match g {
            Formula::Forall(x, ty, body) => {
                let c = fresh_variant(&x.to_uppercase(), &|n| sc.sig.contains(n));
                let mut sc2 = sc.clone();
                sc2.sig.declare_name(c.clone(), ty.clone());
                sc2.eigen.push((c.clone(), ty.clone()));
                let inst = subst(body, x, &Term::Const(c.clone()));
                let child = self.goal(&sc2, &inst, guarded, d)?;
                let mut n = node(if guarded { Rule::ForallRG } else { Rule::ForallR }, g, guarded, vec![child]);
                n.sig_add.push((c, ty.clone()));
                Some(n)
            }
            Formula::Imp(h, body) => {
                let mut sc2 = sc.clone();
                sc2.hyps.push((**h).clone());
                let child = self.goal(&sc2, body, guarded, d)?;
                let mut n = node(if guarded { Rule::ImpRG } else { Rule::ImpR }, g, guarded, vec![child]);
                n.prog_add.push((**h).clone());
                Some(n)
            }
            Formula::And(a, b) => {
                let ca = self.goal(sc, a, guarded, d)?;
                let cb = self.goal(sc, b, guarded, d)?;
                Some(node(if guarded { Rule::AndRG } else { Rule::AndR }, g, guarded, vec![ca, cb]))
            }
            Formula::Atom(a) => self.decide(sc, g, a, guarded, d),
            _ if guarded => None,
            Formula::Top => Some(node(Rule::TopR, g, false, Vec::new())),
            Formula::Or(a, b) => {
                if let Some(c) = self.goal(sc, a, false, d) {
                    return Some(node(Rule::OrR1, g, false, vec![c]));
                }
                let c = self.goal(sc, b, false, d)?;
                Some(node(Rule::OrR2, g, false, vec![c]))
            }
            Formula::Exists(x, ty, body) => {
                for w in self.exists_candidates(sc, x, ty, body) {
                    let inst = subst(body, x, &w);
                    if let Some(c) = self.goal(sc, &inst, false, d) {
                        let mut n = node(Rule::ExistsR, g, false, vec![c]);
                        n.witness = Some(w);
                        return Some(n);
                    }
                }
                None
            }
        }
    }

    fn decide(&mut self, sc: &Scope, g: &Formula, a: &Term, guarded: bool, d: usize) -> Option<ProofNode> {
        let (pred, arity) = match a.spine() {
            (Term::Const(p), args) => (p.clone(), args.len()),
            _ => return None,
        };
        let mut candidates: Vec<Formula> = self.program.formulas().cloned().collect();
        if !guarded {
            candidates.extend(self.lemmas.iter().cloned());
            candidates.extend(sc.hyps.iter().cloned());
            candidates.extend(sc.ch.iter().cloned());
        }
        for clause in candidates {
            if !clause.may_conclude(&pred, arity) {
                continue;
            }
            if let Some(c) = self.focus(sc, &clause, a, guarded, d) {
                let rule = if guarded { Rule::DecideG } else { Rule::Decide };
                return Some(node(rule, g, guarded, vec![c]));
            }
        }
        None
    }

    fn focus(&mut self, sc: &Scope, clause: &Formula, a: &Term, guarded: bool, depth: usize) -> Option<ProofNode> {
        if !self.tick(depth) {
            return None;
        }
        let d = depth - 1;
        let goal = Formula::Atom(a.clone());
        let mk = |rule: Rule, children: Vec<ProofNode>| ProofNode {
            rule,
            sig_add: Vec::new(),
            prog_add: Vec::new(),
            focus: Some(clause.clone()),
            goal: goal.clone(),
            guarded,
            witness: None,
            children,
        };
        match clause {
            Formula::Atom(b) => {
                if self.initial(b, a) {
                    Some(mk(if guarded { Rule::InitialG } else { Rule::Initial }, Vec::new()))
                } else {
                    None
                }
            }
            Formula::And(l, r) => {
                let (pred, arity) = match a.spine() {
                    (Term::Const(p), args) => (p.clone(), args.len()),
                    _ => return None,
                };
                for (k, side) in [l, r].into_iter().enumerate() {
                    if !side.may_conclude(&pred, arity) {
                        continue;
                    }
                    if let Some(c) = self.focus(sc, side, a, guarded, d) {
                        let rule = match (k, guarded) {
                            (0, false) => Rule::AndL1,
                            (0, true) => Rule::AndL1G,
                            (_, false) => Rule::AndL2,
                            (_, true) => Rule::AndL2G,
                        };
                        return Some(mk(rule, vec![c]));
                    }
                }
                None
            }
            Formula::Imp(h, concl) => {
                // Check the focused premise first: it is cheap and fixes nothing new.
                let c1 = self.focus(sc, concl, a, false, d)?;
                let c2 = self.goal(sc, h, false, d)?;
                Some(mk(if guarded { Rule::ImpLG } else { Rule::ImpL }, vec![c1, c2]))
            }
            Formula::Forall(x, ty, body) => {
                for w in self.forall_candidates(sc, x, ty, body, a) {
                    let inst = subst(body, x, &w);
                    if let Some(c) = self.focus(sc, &inst, a, guarded, d) {
                        let mut n = mk(if guarded { Rule::ForallLG } else { Rule::ForallL }, vec![c]);
                        n.witness = Some(w);
                        return Some(n);
                    }
                }
                None
            }
            _ => None,
        }
    }

    fn initial(&self, b: &Term, a: &Term) -> bool {
        if self.cfg.calculus.is_first_order() {
            alpha_eq(b, a)
        } else {
            fixbeta_equiv(b, a, self.cfg.fixbeta_bound) == Equiv::Equal
        }
    }

    fn admissible(&self, sc: &Scope, t: &Term, ty: &Type) -> bool {
        if !is_closed(t) {
            return false;
        }
        match typecheck(&sc.sig, &Context::new(), t) {
            Ok(tt) if &tt == ty => {}
            _ => return false,
        }
        if !self.cfg.calculus.admits_witness(&sc.sig, t) {
            return false;
        }
        if !self.cfg.calculus.is_first_order() && ty.is_iota() {
            return is_guarded_full(&sc.sig, &Context::new(), t);
        }
        true
    }

    /// Witnesses for `∀x D` focused against goal `a`: bindings of `x` from
    /// unifying the clause heads with the goal, then the pool if some head
    /// leaves `x` undetermined.
    fn forall_candidates(&mut self, sc: &Scope, x: &Name, ty: &Type, body: &Formula, a: &Term) -> Vec<Term> {
        let mut flex: HashSet<Name> = HashSet::new();
        flex.insert(x.clone());
        collect_binders(body, &mut flex);
        let mut out: Vec<Term> = Vec::new();
        let mut need_pool = false;
        let (pred, arity) = match a.spine() {
            (Term::Const(p), args) => (p.clone(), args.len()),
            _ => return out,
        };
        for h in body.heads() {
            let hf = Formula::Atom(h.clone());
            if !hf.may_conclude(&pred, arity) {
                continue;
            }
            let mut u = Unifier::new(&flex, self.cfg.unify_unfold_budget);
            if !u.unify(h, a) {
                continue;
            }
            match u.binding(x) {
                Some(w) if is_closed(&w) => {
                    if self.admissible(sc, &w, ty) {
                        push_unique(&mut out, w);
                    }
                }
                _ => need_pool = true,
            }
        }
        if need_pool {
            let goal_terms = vec![a.clone()];
            for w in self.pool(sc, ty, &goal_terms) {
                push_unique(&mut out, w);
            }
        }
        out
    }

    /// Witnesses for `∃x G`: bindings of `x` obtained by unifying atoms of `G`
    /// with heads of available clauses, then the pool.
    fn exists_candidates(&mut self, sc: &Scope, x: &Name, ty: &Type, body: &Formula) -> Vec<Term> {
        let mut flex: HashSet<Name> = HashSet::new();
        flex.insert(x.clone());
        collect_binders(body, &mut flex);
        let mut avoid: HashSet<Name> = flex.clone();
        avoid.extend(free_vars(body));
        let mut sources: Vec<Formula> = self.program.formulas().cloned().collect();
        sources.extend(self.lemmas.iter().cloned());
        sources.extend(sc.hyps.iter().cloned());
        sources.extend(sc.ch.iter().cloned());
        let mut out: Vec<Term> = Vec::new();
        let goal_atoms = positive_atoms(body);
        for src in &sources {
            let renamed = rename_bound(src, &mut avoid.clone());
            let mut src_flex = flex.clone();
            collect_binders(&renamed, &mut src_flex);
            for h in renamed.heads() {
                for b in &goal_atoms {
                    if h.head_const() != b.head_const() {
                        continue;
                    }
                    let mut u = Unifier::new(&src_flex, self.cfg.unify_unfold_budget);
                    if u.unify(b, h) {
                        if let Some(w) = u.binding(x) {
                            if is_closed(&w) && self.admissible(sc, &w, ty) {
                                push_unique(&mut out, w);
                            }
                        }
                    }
                }
            }
        }
        let goal_terms: Vec<Term> = goal_atoms.into_iter().cloned().collect();
        for w in self.pool(sc, ty, &goal_terms) {
            push_unique(&mut out, w);
        }
        out
    }

    /// Closed subterms of the goal, coinductive hypothesis and hypotheses,
    /// eigenvariables and signature constants of the right type, and in the
    /// higher-order calculi named fix definitions applied to those.
    fn pool(&mut self, sc: &Scope, ty: &Type, goal_terms: &[Term]) -> Vec<Term> {
        self.heuristic = true;
        let mut raw: Vec<Term> = Vec::new();
        let mut sources: Vec<Term> = goal_terms.to_vec();
        for f in sc.ch.iter().chain(sc.hyps.iter()) {
            sources.extend(f.atoms().into_iter().cloned());
        }
        for s in &sources {
            for t in term::subterms(s) {
                raw.push(t);
            }
        }
        for (c, cty) in &sc.eigen {
            if cty == ty {
                raw.push(Term::Const(c.clone()));
            }
        }
        for (c, cty) in self.program.signature.declarations() {
            if cty == ty {
                raw.push(Term::Const(c.clone()));
            }
        }
        let mut out: Vec<Term> = Vec::new();
        for t in raw {
            if self.admissible(sc, &t, ty) {
                push_unique(&mut out, t);
            }
        }
        if !self.cfg.calculus.is_first_order() && ty.is_iota() {
            let base: Vec<Term> = out.clone();
            for d in &self.program.defs {
                let (args, tgt) = d.ty.split();
                if !tgt.is_iota() || args.iter().any(|a| !a.is_iota()) || args.len() > 1 {
                    continue;
                }
                if args.is_empty() {
                    if self.admissible(sc, &d.term, ty) {
                        push_unique(&mut out, d.term.clone());
                    }
                    continue;
                }
                for b in base.iter().filter(|b| !b.contains_fix()) {
                    let t = Term::app(d.term.clone(), b.clone());
                    if self.admissible(sc, &t, ty) {
                        push_unique(&mut out, t);
                    }
                }
            }
        }
        if out.len() > self.cfg.witness_pool_limit {
            out.truncate(self.cfg.witness_pool_limit);
        }
        out
    }
}

fn push_unique(out: &mut Vec<Term>, t: Term) {
    let k = canonical(&t);
    if !out.iter().any(|o| canonical(o) == k) {
        out.push(t);
    }
}

fn collect_binders(f: &Formula, out: &mut HashSet<Name>) {
    match f {
        Formula::Forall(x, _, b) | Formula::Exists(x, _, b) => {
            out.insert(x.clone());
            collect_binders(b, out);
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            collect_binders(a, out);
            collect_binders(b, out);
        }
        _ => {}
    }
}

/// Atoms of a goal reached through `∧`, `∨` and `∃`.
fn positive_atoms(g: &Formula) -> Vec<&Term> {
    let mut out = Vec::new();
    fn go<'a>(g: &'a Formula, out: &mut Vec<&'a Term>) {
        match g {
            Formula::Atom(t) => out.push(t),
            Formula::And(a, b) | Formula::Or(a, b) => {
                go(a, out);
                go(b, out);
            }
            Formula::Exists(_, _, b) => go(b, out),
            _ => {}
        }
    }
    go(g, &mut out);
    out
}
