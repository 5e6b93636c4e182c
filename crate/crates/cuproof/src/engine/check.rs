//! Independent proof checker.
//!
//! Every node is re-derived from its conclusion: the checker recomputes
//! instantiations, checks freshness of eigenvariables, typing and the calculus
//! restriction on witnesses, the guard discipline, and the membership of each
//! goal and focused clause in the calculus's grammar.

use super::proof::{ProofNode, Rule};
use crate::formula::{alpha_eq_formula, in_fragment, subst, Calculus, Formula, Role};
use crate::program::Program;
use crate::term::{alpha_eq, fixbeta_equiv, is_closed, typecheck, Context, Equiv, Signature, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub rule: Rule,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub failure: Option<CheckFailure>,
}

impl CheckReport {
    pub fn valid(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn check(tree: &ProofNode, program: &Program, calculus: Calculus, fixbeta_bound: usize) -> CheckReport {
    check_with_lemmas(tree, program, &[], calculus, fixbeta_bound)
}

/// Checks a proof in which DECIDE may also select the given lemma clauses.
pub fn check_with_lemmas(
    tree: &ProofNode,
    program: &Program,
    lemmas: &[Formula],
    calculus: Calculus,
    fixbeta_bound: usize,
) -> CheckReport {
    let ck = Checker {
        program,
        lemmas,
        calc: calculus,
        bound: fixbeta_bound,
    };
    let ctx = Ctx {
        sig: program.signature.clone(),
        ch: None,
        hyps: Vec::new(),
        root: true,
    };
    let mut path = Vec::new();
    CheckReport {
        failure: ck.node(tree, &ctx, &mut path).err(),
    }
}

struct Checker<'a> {
    program: &'a Program,
    lemmas: &'a [Formula],
    calc: Calculus,
    bound: usize,
}

#[derive(Clone)]
struct Ctx {
    sig: Signature,
    ch: Option<Formula>,
    hyps: Vec<Formula>,
    root: bool,
}

type R = Result<(), CheckFailure>;

impl Checker<'_> {
    fn fail(&self, n: &ProofNode, path: &[usize], reason: impl Into<String>) -> R {
        Err(CheckFailure {
            path: path.to_vec(),
            rule: n.rule,
            reason: reason.into(),
        })
    }

    fn expect_children(&self, n: &ProofNode, path: &[usize], k: usize) -> R {
        if n.children.len() != k {
            return self.fail(n, path, format!("expected {k} premises, found {}", n.children.len()));
        }
        Ok(())
    }

    fn child(&self, n: &ProofNode, k: usize, ctx: &Ctx, path: &mut Vec<usize>) -> R {
        path.push(k);
        let r = self.node(&n.children[k], ctx, path);
        path.pop();
        r
    }

    fn same(&self, a: &Formula, b: &Formula) -> bool {
        alpha_eq_formula(a, b)
    }

    fn node(&self, n: &ProofNode, ctx: &Ctx, path: &mut Vec<usize>) -> R {
        let rule = n.rule;
        if rule == Rule::CoFix {
            return self.cofix(n, ctx, path);
        }
        if rule.is_guarded() != n.guarded {
            return self.fail(n, path, "guard flag does not match the rule");
        }
        let mut ctx = ctx.clone();
        ctx.root = false;
        let role = if n.guarded { Role::Core } else { Role::Goal };
        if !in_fragment(&ctx.sig, &Context::new(), &n.goal, role, self.calc) {
            return self.fail(n, path, format!("goal is not a {role:?} formula of {}", self.calc));
        }
        if rule.is_left() {
            let Some(focus) = &n.focus else {
                return self.fail(n, path, "left rule without a focused clause");
            };
            if !in_fragment(&ctx.sig, &Context::new(), focus, Role::Clause, self.calc) {
                return self.fail(n, path, format!("focus is not a clause of {}", self.calc));
            }
            if n.goal.as_atom().is_none() {
                return self.fail(n, path, "focused sequents have atomic goals");
            }
            return self.left(n, focus, &ctx, path);
        }
        if n.focus.is_some() {
            return self.fail(n, path, "right rule applied to a focused sequent");
        }
        if rule != Rule::ForallR && rule != Rule::ForallRG && !n.sig_add.is_empty() {
            return self.fail(n, path, "unexpected signature additions");
        }
        let adds_program = matches!(rule, Rule::ImpR | Rule::ImpRG);
        if !adds_program && !n.prog_add.is_empty() {
            return self.fail(n, path, "unexpected program additions");
        }
        if !matches!(rule, Rule::ExistsR) && n.witness.is_some() {
            return self.fail(n, path, "unexpected witness");
        }
        match (rule, &n.goal) {
            (Rule::TopR, Formula::Top) => self.expect_children(n, path, 0),
            (Rule::AndR | Rule::AndRG, Formula::And(a, b)) => {
                self.expect_children(n, path, 2)?;
                for (k, part) in [a, b].into_iter().enumerate() {
                    let c = &n.children[k];
                    if c.guarded != n.guarded || c.focus.is_some() || !self.same(&c.goal, part) {
                        return self.fail(n, path, format!("premise {k} does not match the conjunct"));
                    }
                    self.child(n, k, &ctx, path)?;
                }
                Ok(())
            }
            (Rule::OrR1 | Rule::OrR2, Formula::Or(a, b)) => {
                self.expect_children(n, path, 1)?;
                let part = if rule == Rule::OrR1 { a } else { b };
                let c = &n.children[0];
                if c.guarded || c.focus.is_some() || !self.same(&c.goal, part) {
                    return self.fail(n, path, "premise does not match the disjunct");
                }
                self.child(n, 0, &ctx, path)
            }
            (Rule::ExistsR, Formula::Exists(x, ty, body)) => {
                self.expect_children(n, path, 1)?;
                let Some(w) = &n.witness else {
                    return self.fail(n, path, "missing witness");
                };
                self.witness_ok(n, path, &ctx, w, ty)?;
                let inst = subst(body, x, w);
                let c = &n.children[0];
                if c.guarded || c.focus.is_some() || !self.same(&c.goal, &inst) {
                    return self.fail(n, path, "premise is not the instantiated body");
                }
                self.child(n, 0, &ctx, path)
            }
            (Rule::ForallR | Rule::ForallRG, Formula::Forall(x, ty, body)) => {
                self.expect_children(n, path, 1)?;
                let [(c, cty)] = n.sig_add.as_slice() else {
                    return self.fail(n, path, "expected exactly one new constant");
                };
                if cty != ty {
                    return self.fail(n, path, "new constant has the wrong type");
                }
                if ctx.sig.contains(c) {
                    return self.fail(n, path, format!("`{c}` is not fresh"));
                }
                let mut ctx2 = ctx.clone();
                ctx2.sig.declare_name(c.clone(), ty.clone());
                let inst = subst(body, x, &Term::Const(c.clone()));
                let ch = &n.children[0];
                if ch.guarded != n.guarded || ch.focus.is_some() || !self.same(&ch.goal, &inst) {
                    return self.fail(n, path, "premise is not the body at the new constant");
                }
                self.child(n, 0, &ctx2, path)
            }
            (Rule::ImpR | Rule::ImpRG, Formula::Imp(h, body)) => {
                self.expect_children(n, path, 1)?;
                if n.prog_add.len() != 1 || !self.same(&n.prog_add[0], h) {
                    return self.fail(n, path, "program addition must be the hypothesis");
                }
                let mut ctx2 = ctx.clone();
                ctx2.hyps.push((**h).clone());
                let c = &n.children[0];
                if c.guarded != n.guarded || c.focus.is_some() || !self.same(&c.goal, body) {
                    return self.fail(n, path, "premise is not the conclusion of the implication");
                }
                self.child(n, 0, &ctx2, path)
            }
            (Rule::Decide | Rule::DecideG, Formula::Atom(_)) => {
                self.expect_children(n, path, 1)?;
                let c = &n.children[0];
                let Some(d) = &c.focus else {
                    return self.fail(n, path, "premise has no focused clause");
                };
                if c.guarded != n.guarded || !self.same(&c.goal, &n.goal) {
                    return self.fail(n, path, "premise must keep the goal");
                }
                let original = self.program.formulas().any(|p| self.same(p, d));
                let allowed = if rule == Rule::DecideG {
                    original
                } else {
                    original
                        || self.lemmas.iter().any(|l| self.same(l, d))
                        || ctx.hyps.iter().any(|h| self.same(h, d))
                        || ctx.ch.as_ref().map(|ch| self.same(ch, d)).unwrap_or(false)
                };
                if !allowed {
                    let why = if rule == Rule::DecideG {
                        "guarded DECIDE may only select original program clauses"
                    } else {
                        "selected clause is not available"
                    };
                    return self.fail(n, path, why);
                }
                self.child(n, 0, &ctx, path)
            }
            _ => self.fail(n, path, "rule does not apply to this goal"),
        }
    }

    fn cofix(&self, n: &ProofNode, ctx: &Ctx, path: &mut Vec<usize>) -> R {
        if !ctx.root {
            return self.fail(n, path, "CO-FIX may only be the last rule of a proof");
        }
        if n.guarded || n.focus.is_some() || n.witness.is_some() || !n.sig_add.is_empty() {
            return self.fail(n, path, "malformed CO-FIX node");
        }
        if !in_fragment(&ctx.sig, &Context::new(), &n.goal, Role::Core, self.calc) {
            return self.fail(n, path, format!("goal is not a core formula of {}", self.calc));
        }
        if n.prog_add.len() != 1 || !self.same(&n.prog_add[0], &n.goal) {
            return self.fail(n, path, "CO-FIX must add its goal as the coinductive hypothesis");
        }
        self.expect_children(n, path, 1)?;
        let c = &n.children[0];
        if !c.guarded || c.focus.is_some() || !self.same(&c.goal, &n.goal) {
            return self.fail(n, path, "premise must be the guarded goal");
        }
        let mut ctx2 = ctx.clone();
        ctx2.root = false;
        ctx2.ch = Some(n.goal.clone());
        self.child(n, 0, &ctx2, path)
    }

    fn witness_ok(&self, n: &ProofNode, path: &[usize], ctx: &Ctx, w: &Term, ty: &crate::term::Type) -> R {
        if !is_closed(w) {
            return self.fail(n, path, "witness is not closed");
        }
        match typecheck(&ctx.sig, &Context::new(), w) {
            Ok(t) if &t == ty => {}
            Ok(t) => return self.fail(n, path, format!("witness has type {t}, expected {ty}")),
            Err(e) => return self.fail(n, path, format!("witness is ill-typed: {e}")),
        }
        if !self.calc.admits_witness(&ctx.sig, w) {
            return self.fail(n, path, format!("witness is not admitted in {}", self.calc));
        }
        Ok(())
    }

    fn left(&self, n: &ProofNode, focus: &Formula, ctx: &Ctx, path: &mut Vec<usize>) -> R {
        if !n.sig_add.is_empty() || !n.prog_add.is_empty() {
            return self.fail(n, path, "left rules add nothing");
        }
        let rule = n.rule;
        if !matches!(rule, Rule::ForallL | Rule::ForallLG) && n.witness.is_some() {
            return self.fail(n, path, "unexpected witness");
        }
        let goal = n.goal.as_atom().expect("checked atomic");
        let keep = |c: &ProofNode, f: &Formula, guarded: bool| {
            c.guarded == guarded
                && c.focus.as_ref().map(|x| self.same(x, f)).unwrap_or(false)
                && self.same(&c.goal, &n.goal)
        };
        match (rule, focus) {
            (Rule::Initial | Rule::InitialG, Formula::Atom(b)) => {
                self.expect_children(n, path, 0)?;
                let ok = if self.calc.is_first_order() {
                    alpha_eq(b, goal)
                } else {
                    fixbeta_equiv(b, goal, self.bound) == Equiv::Equal
                };
                if !ok {
                    return self.fail(n, path, "focused atom does not match the goal");
                }
                Ok(())
            }
            (Rule::AndL1 | Rule::AndL1G | Rule::AndL2 | Rule::AndL2G, Formula::And(l, r)) => {
                self.expect_children(n, path, 1)?;
                let side = if matches!(rule, Rule::AndL1 | Rule::AndL1G) { l } else { r };
                if !keep(&n.children[0], side, n.guarded) {
                    return self.fail(n, path, "premise must focus on the selected conjunct");
                }
                self.child(n, 0, ctx, path)
            }
            (Rule::ImpL | Rule::ImpLG, Formula::Imp(h, concl)) => {
                self.expect_children(n, path, 2)?;
                if !keep(&n.children[0], concl, false) {
                    return self.fail(n, path, "first premise must focus on the conclusion, unguarded");
                }
                let c2 = &n.children[1];
                if c2.guarded || c2.focus.is_some() || !self.same(&c2.goal, h) {
                    return self.fail(n, path, "second premise must prove the hypothesis, unguarded");
                }
                self.child(n, 0, ctx, path)?;
                self.child(n, 1, ctx, path)
            }
            (Rule::ForallL | Rule::ForallLG, Formula::Forall(x, ty, body)) => {
                self.expect_children(n, path, 1)?;
                let Some(w) = &n.witness else {
                    return self.fail(n, path, "missing witness");
                };
                self.witness_ok(n, path, ctx, w, ty)?;
                let inst = subst(body, x, w);
                if !keep(&n.children[0], &inst, n.guarded) {
                    return self.fail(n, path, "premise must focus on the instantiated clause");
                }
                self.child(n, 0, ctx, path)
            }
            _ => self.fail(n, path, "rule does not apply to the focused clause"),
        }
    }
}
