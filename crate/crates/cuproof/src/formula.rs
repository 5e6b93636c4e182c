//! Formulas, the four calculi, fragment classification and H-clause conversion.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{
    self, alpha_eq, beta_normalize, fresh_variant, in_u1, in_u2, is_first_order_atom, typecheck,
    Context, Name, Signature, Term, TermError, Type,
};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Top,
    Atom(Term),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Forall(Name, Type, Arc<Formula>),
    Exists(Name, Type, Arc<Formula>),
}

impl Formula {
    pub fn atom(t: Term) -> Formula {
        Formula::Atom(t)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn forall(x: &str, ty: Type, body: Formula) -> Formula {
        Formula::Forall(term::name(x), ty, Arc::new(body))
    }

    pub fn exists(x: &str, ty: Type, body: Formula) -> Formula {
        Formula::Exists(term::name(x), ty, Arc::new(body))
    }

    /// Right-nested conjunction; `None` for an empty list.
    pub fn conj(items: Vec<Formula>) -> Option<Formula> {
        items.into_iter().rev().reduce(|acc, f| Formula::and(f, acc))
    }

    pub fn as_atom(&self) -> Option<&Term> {
        match self {
            Formula::Atom(t) => Some(t),
            _ => None,
        }
    }

    /// Atoms that can close a focused derivation on this clause: those reached
    /// through conjunctions, universal quantifiers and implication conclusions.
    pub fn heads(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Term>) {
            match f {
                Formula::Atom(t) => out.push(t),
                Formula::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Imp(_, d) | Formula::Forall(_, _, d) => go(d, out),
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }

    /// True if some head of the clause could match an atom with this predicate and arity.
    pub fn may_conclude(&self, pred: &str, arity: usize) -> bool {
        self.heads().iter().any(|h| {
            let (hd, args) = h.spine();
            matches!(hd, Term::Const(c) if &**c == pred) && args.len() == arity
        })
    }

    pub fn atoms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Term>) {
            match f {
                Formula::Top => {}
                Formula::Atom(t) => out.push(t),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Forall(_, _, b) | Formula::Exists(_, _, b) => go(b, out),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn constants(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for a in self.atoms() {
            a.constants(&mut out);
        }
        out
    }
}

pub fn free_vars(f: &Formula) -> BTreeSet<Name> {
    match f {
        Formula::Top => BTreeSet::new(),
        Formula::Atom(t) => term::free_vars(t),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            let mut s = free_vars(a);
            s.extend(free_vars(b));
            s
        }
        Formula::Forall(x, _, b) | Formula::Exists(x, _, b) => {
            let mut s = free_vars(b);
            s.remove(x);
            s
        }
    }
}

/// Capture-avoiding `f[x := n]`; atoms are β-normalized afterwards.
pub fn subst(f: &Formula, x: &str, n: &Term) -> Formula {
    let fv = term::free_vars(n);
    subst_with(f, x, n, &fv)
}

fn subst_with(f: &Formula, x: &str, n: &Term, fv_n: &BTreeSet<Name>) -> Formula {
    match f {
        Formula::Top => Formula::Top,
        Formula::Atom(t) => Formula::Atom(beta_normalize(&term::subst(t, x, n))),
        Formula::And(a, b) => Formula::and(subst_with(a, x, n, fv_n), subst_with(b, x, n, fv_n)),
        Formula::Or(a, b) => Formula::or(subst_with(a, x, n, fv_n), subst_with(b, x, n, fv_n)),
        Formula::Imp(a, b) => Formula::imp(subst_with(a, x, n, fv_n), subst_with(b, x, n, fv_n)),
        Formula::Forall(y, ty, b) | Formula::Exists(y, ty, b) => {
            let rebuild = |y: Name, b: Formula| match f {
                Formula::Forall(..) => Formula::Forall(y, ty.clone(), Arc::new(b)),
                _ => Formula::Exists(y, ty.clone(), Arc::new(b)),
            };
            if &**y == x || !free_vars(b).contains(x) {
                return f.clone();
            }
            if !fv_n.contains(y) {
                return rebuild(y.clone(), subst_with(b, x, n, fv_n));
            }
            let fv_b = free_vars(b);
            let z = fresh_variant(y, &|c| fv_n.contains(c) || fv_b.contains(c) || c == x);
            let renamed = subst(b, y, &Term::Var(z.clone()));
            rebuild(z, subst_with(&renamed, x, n, fv_n))
        }
    }
}

/// Renames every quantifier-bound variable to a fresh reserved name not in `avoid`.
pub fn rename_bound(f: &Formula, avoid: &mut HashSet<Name>) -> Formula {
    match f {
        Formula::Top | Formula::Atom(_) => f.clone(),
        Formula::And(a, b) => Formula::and(rename_bound(a, avoid), rename_bound(b, avoid)),
        Formula::Or(a, b) => Formula::or(rename_bound(a, avoid), rename_bound(b, avoid)),
        Formula::Imp(a, b) => Formula::imp(rename_bound(a, avoid), rename_bound(b, avoid)),
        Formula::Forall(y, ty, b) | Formula::Exists(y, ty, b) => {
            let z = fresh_variant(y, &|c| avoid.contains(c));
            avoid.insert(z.clone());
            let body = rename_bound(&subst(b, y, &Term::Var(z.clone())), avoid);
            match f {
                Formula::Forall(..) => Formula::Forall(z, ty.clone(), Arc::new(body)),
                _ => Formula::Exists(z, ty.clone(), Arc::new(body)),
            }
        }
    }
}

pub fn alpha_eq_formula(a: &Formula, b: &Formula) -> bool {
    fn go(a: &Formula, b: &Formula, env: &mut Vec<(Name, Name)>) -> bool {
        match (a, b) {
            (Formula::Top, Formula::Top) => true,
            (Formula::Atom(s), Formula::Atom(t)) => {
                // Close over the bound pairs by wrapping both atoms in matching abstractions.
                let wrap = |t: &Term, side: usize| {
                    env.iter().rev().fold(t.clone(), |acc, pair| {
                        let n = if side == 0 { &pair.0 } else { &pair.1 };
                        Term::Abs(n.clone(), Type::iota(), Arc::new(acc))
                    })
                };
                alpha_eq(&wrap(s, 0), &wrap(t, 1))
            }
            (Formula::And(a1, b1), Formula::And(a2, b2))
            | (Formula::Or(a1, b1), Formula::Or(a2, b2))
            | (Formula::Imp(a1, b1), Formula::Imp(a2, b2)) => go(a1, a2, env) && go(b1, b2, env),
            (Formula::Forall(x, tx, bx), Formula::Forall(y, ty, by))
            | (Formula::Exists(x, tx, bx), Formula::Exists(y, ty, by)) => {
                if tx != ty {
                    return false;
                }
                env.push((x.clone(), y.clone()));
                let r = go(bx, by, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// Type-checks every atom (at type `o`) under the quantifier context.
pub fn typecheck_formula(sig: &Signature, ctx: &Context, f: &Formula) -> Result<(), TermError> {
    match f {
        Formula::Top => Ok(()),
        Formula::Atom(t) => {
            let ty = typecheck(sig, ctx, t)?;
            if !ty.is_o() {
                return Err(TermError::TypeMismatch {
                    term: t.to_string(),
                    expected: Type::o(),
                    found: ty,
                });
            }
            Ok(())
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            typecheck_formula(sig, ctx, a)?;
            typecheck_formula(sig, ctx, b)
        }
        Formula::Forall(x, ty, b) | Formula::Exists(x, ty, b) => {
            let mut c = ctx.clone();
            c.insert(x.clone(), ty.clone());
            typecheck_formula(sig, &c, b)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Calculus {
    Fohc,
    Fohh,
    Hohc,
    Hohh,
}

impl Calculus {
    pub const ALL: [Calculus; 4] = [Calculus::Fohc, Calculus::Fohh, Calculus::Hohc, Calculus::Hohh];

    pub fn is_first_order(self) -> bool {
        matches!(self, Calculus::Fohc | Calculus::Fohh)
    }

    pub fn is_harrop(self) -> bool {
        matches!(self, Calculus::Fohh | Calculus::Hohh)
    }

    /// Every formula of `self` is also a formula of `other`.
    pub fn embeds_into(self, other: Calculus) -> bool {
        (!self.is_harrop() || other.is_harrop()) && (self.is_first_order() || !other.is_first_order())
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Calculus::Fohc => "fohc",
            Calculus::Fohh => "fohh",
            Calculus::Hohc => "hohc",
            Calculus::Hohh => "hohh",
        }
    }

    pub fn parse(s: &str) -> Option<Calculus> {
        let s = s.trim().to_ascii_lowercase();
        let s = s.strip_prefix("co-").unwrap_or(&s);
        Calculus::ALL.into_iter().find(|c| c.short_name() == s)
    }

    /// Whether a term may serve as a quantifier witness in this calculus.
    pub fn admits_witness(self, sig: &Signature, t: &Term) -> bool {
        match self {
            Calculus::Fohc | Calculus::Fohh => term::is_first_order(sig, &Context::new(), t),
            Calculus::Hohc => in_u1(t),
            Calculus::Hohh => in_u2(t),
        }
    }
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "co-{}", self.short_name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Clause,
    Goal,
    Core,
}

impl Role {
    pub fn parse(s: &str) -> Option<Role> {
        match s {
            "clause" | "program" | "D" => Some(Role::Clause),
            "goal" | "G" => Some(Role::Goal),
            "core" | "M" => Some(Role::Core),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("ill-typed formula: {0}")]
    IllTyped(#[from] TermError),
    #[error("not convertible to H-clauses: {0}")]
    NotHConvertible(String),
}

/// The calculi whose grammar for `role` generates `f`.
pub fn classify(sig: &Signature, f: &Formula, role: Role) -> Result<BTreeSet<Calculus>, FormulaError> {
    classify_in(sig, &Context::new(), f, role)
}

pub fn classify_in(
    sig: &Signature,
    ctx: &Context,
    f: &Formula,
    role: Role,
) -> Result<BTreeSet<Calculus>, FormulaError> {
    typecheck_formula(sig, ctx, f)?;
    Ok(Calculus::ALL
        .into_iter()
        .filter(|&c| {
            let g = Grammar { sig, calc: c };
            let mut ctx = ctx.clone();
            match role {
                Role::Clause => g.clause(&mut ctx, f),
                Role::Goal => g.goal(&mut ctx, f),
                Role::Core => g.core(&mut ctx, f),
            }
        })
        .collect())
}

pub fn in_fragment(sig: &Signature, ctx: &Context, f: &Formula, role: Role, calc: Calculus) -> bool {
    let g = Grammar { sig, calc };
    let mut ctx = ctx.clone();
    match role {
        Role::Clause => g.clause(&mut ctx, f),
        Role::Goal => g.goal(&mut ctx, f),
        Role::Core => g.core(&mut ctx, f),
    }
}

struct Grammar<'a> {
    sig: &'a Signature,
    calc: Calculus,
}

impl Grammar<'_> {
    fn term_class(&self, t: &Term) -> bool {
        match self.calc {
            Calculus::Hohc => in_u1(t),
            _ => in_u2(t),
        }
    }

    /// `A_r` (clause heads, core atoms) or `A¹` in the first-order calculi.
    fn rigid_atom(&self, ctx: &Context, t: &Term) -> bool {
        if self.calc.is_first_order() {
            return is_first_order_atom(self.sig, ctx, t);
        }
        matches!(t.spine().0, Term::Const(c) if !term::is_logical(c)) && self.term_class(t)
    }

    /// `A` (goal atoms may have a variable head in the higher-order calculi).
    fn goal_atom(&self, ctx: &Context, t: &Term) -> bool {
        if self.calc.is_first_order() {
            return is_first_order_atom(self.sig, ctx, t);
        }
        self.term_class(t)
    }

    fn bind<R>(&self, ctx: &mut Context, x: &Name, ty: &Type, k: impl FnOnce(&mut Context) -> R) -> R {
        let prev = ctx.insert(x.clone(), ty.clone());
        let r = k(ctx);
        match prev {
            Some(p) => {
                ctx.insert(x.clone(), p);
            }
            None => {
                ctx.remove(x);
            }
        }
        r
    }

    fn goal(&self, ctx: &mut Context, f: &Formula) -> bool {
        match f {
            Formula::Top => true,
            Formula::Atom(t) => self.goal_atom(ctx, t),
            Formula::And(a, b) | Formula::Or(a, b) => self.goal(ctx, a) && self.goal(ctx, b),
            Formula::Exists(x, ty, b) => self.bind(ctx, x, ty, |c| self.goal(c, b)),
            Formula::Imp(d, g) => self.calc.is_harrop() && self.clause(ctx, d) && self.goal(ctx, g),
            Formula::Forall(x, ty, b) => {
                self.calc.is_harrop() && self.bind(ctx, x, ty, |c| self.goal(c, b))
            }
        }
    }

    fn clause(&self, ctx: &mut Context, f: &Formula) -> bool {
        match f {
            Formula::Atom(t) => self.rigid_atom(ctx, t),
            Formula::Imp(g, d) => self.goal(ctx, g) && self.clause(ctx, d),
            Formula::And(a, b) => self.clause(ctx, a) && self.clause(ctx, b),
            Formula::Forall(x, ty, b) => self.bind(ctx, x, ty, |c| self.clause(c, b)),
            _ => false,
        }
    }

    fn core(&self, ctx: &mut Context, f: &Formula) -> bool {
        match f {
            Formula::Atom(t) => self.rigid_atom(ctx, t),
            Formula::And(a, b) => self.core(ctx, a) && self.core(ctx, b),
            Formula::Imp(a, b) => self.calc.is_harrop() && self.core(ctx, a) && self.core(ctx, b),
            Formula::Forall(x, ty, b) => {
                self.calc.is_harrop() && self.bind(ctx, x, ty, |c| self.core(c, b))
            }
            _ => false,
        }
    }
}

/// `∀x̄ (A1 ∧ .. ∧ An ⊃ A)` with `n ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HClause {
    pub universals: Vec<(Name, Type)>,
    pub body: Vec<Term>,
    pub head: Term,
}

impl HClause {
    pub fn fact(head: Term) -> HClause {
        HClause {
            universals: Vec::new(),
            body: Vec::new(),
            head,
        }
    }

    pub fn to_formula(&self) -> Formula {
        let inner = match Formula::conj(self.body.iter().cloned().map(Formula::Atom).collect()) {
            Some(b) => Formula::imp(b, Formula::Atom(self.head.clone())),
            None => Formula::Atom(self.head.clone()),
        };
        self.universals.iter().rev().fold(inner, |acc, (x, ty)| {
            Formula::Forall(x.clone(), ty.clone(), Arc::new(acc))
        })
    }

    /// Reads a formula that is literally H-shaped, without any normalization.
    pub fn from_formula(f: &Formula) -> Option<HClause> {
        let mut universals = Vec::new();
        let mut cur = f;
        while let Formula::Forall(x, ty, b) = cur {
            universals.push((x.clone(), ty.clone()));
            cur = b;
        }
        let (body, head) = match cur {
            Formula::Atom(h) => (Vec::new(), h.clone()),
            Formula::Imp(b, h) => {
                let h = h.as_atom()?.clone();
                let mut atoms = Vec::new();
                fn conj_atoms(f: &Formula, out: &mut Vec<Term>) -> bool {
                    match f {
                        Formula::Atom(t) => {
                            out.push(t.clone());
                            true
                        }
                        Formula::And(a, b) => conj_atoms(a, out) && conj_atoms(b, out),
                        _ => false,
                    }
                }
                if !conj_atoms(b, &mut atoms) {
                    return None;
                }
                (atoms, h)
            }
            _ => return None,
        };
        Some(HClause {
            universals,
            body,
            head,
        })
    }

    pub fn context(&self) -> Context {
        self.universals.iter().cloned().collect()
    }

    pub fn apply(&self, s: &term::Substitution) -> HClause {
        let bound: Vec<&Name> = s.0.iter().map(|(x, _)| x).collect();
        HClause {
            universals: self
                .universals
                .iter()
                .filter(|(x, _)| !bound.contains(&x))
                .cloned()
                .collect(),
            body: self.body.iter().map(|b| beta_normalize(&s.apply(b))).collect(),
            head: beta_normalize(&s.apply(&self.head)),
        }
    }
}

/// Converts a program clause into H-clauses: conjunctions in the conclusion are
/// split, disjunctions in hypotheses become separate clauses, existentials in
/// hypotheses become universals, and `⊤` is dropped.
pub fn to_h_clauses(d: &Formula) -> Result<Vec<HClause>, FormulaError> {
    let mut avoid: HashSet<Name> = HashSet::new();
    for a in d.atoms() {
        term::bound_names(a, &mut avoid);
        avoid.extend(term::free_vars(a));
    }
    let mut out = Vec::new();
    clausify(d, Vec::new(), vec![(Vec::new(), Vec::new())], &mut avoid, &mut out)?;
    Ok(out)
}

type Alternative = (Vec<(Name, Type)>, Vec<Term>);

fn clausify(
    d: &Formula,
    univ: Vec<(Name, Type)>,
    bodies: Vec<Alternative>,
    avoid: &mut HashSet<Name>,
    out: &mut Vec<HClause>,
) -> Result<(), FormulaError> {
    match d {
        Formula::Atom(h) => {
            for (extra, atoms) in bodies {
                let mut u = univ.clone();
                u.extend(extra);
                out.push(HClause {
                    universals: u,
                    body: atoms,
                    head: h.clone(),
                });
            }
            Ok(())
        }
        Formula::And(a, b) => {
            clausify(a, univ.clone(), bodies.clone(), avoid, out)?;
            clausify(b, univ, bodies, avoid, out)
        }
        Formula::Forall(x, ty, b) => {
            let z = if avoid.contains(x) {
                fresh_variant(x, &|c| avoid.contains(c))
            } else {
                x.clone()
            };
            avoid.insert(z.clone());
            let body = subst(b, x, &Term::Var(z.clone()));
            let mut u = univ;
            u.push((z, ty.clone()));
            clausify(&body, u, bodies, avoid, out)
        }
        Formula::Imp(g, d2) => {
            let alts = goal_dnf(g, avoid)?;
            let mut next = Vec::new();
            for (eu, ea) in &bodies {
                for (gu, ga) in &alts {
                    let mut u = eu.clone();
                    u.extend(gu.iter().cloned());
                    let mut a = ea.clone();
                    a.extend(ga.iter().cloned());
                    next.push((u, a));
                }
            }
            clausify(d2, univ, next, avoid, out)
        }
        Formula::Top | Formula::Or(..) | Formula::Exists(..) => Err(FormulaError::NotHConvertible(
            "clause conclusion must be an atom, conjunction, implication or universal".into(),
        )),
    }
}

fn goal_dnf(g: &Formula, avoid: &mut HashSet<Name>) -> Result<Vec<Alternative>, FormulaError> {
    match g {
        Formula::Top => Ok(vec![(Vec::new(), Vec::new())]),
        Formula::Atom(a) => Ok(vec![(Vec::new(), vec![a.clone()])]),
        Formula::And(a, b) => {
            let la = goal_dnf(a, avoid)?;
            let lb = goal_dnf(b, avoid)?;
            let mut out = Vec::new();
            for (ua, aa) in &la {
                for (ub, ab) in &lb {
                    let mut u = ua.clone();
                    u.extend(ub.iter().cloned());
                    let mut x = aa.clone();
                    x.extend(ab.iter().cloned());
                    out.push((u, x));
                }
            }
            Ok(out)
        }
        Formula::Or(a, b) => {
            let mut la = goal_dnf(a, avoid)?;
            la.extend(goal_dnf(b, avoid)?);
            Ok(la)
        }
        Formula::Exists(x, ty, b) => {
            let z = fresh_variant(x, &|c| avoid.contains(c));
            avoid.insert(z.clone());
            let body = subst(b, x, &Term::Var(z.clone()));
            Ok(goal_dnf(&body, avoid)?
                .into_iter()
                .map(|(mut u, a)| {
                    u.insert(0, (z.clone(), ty.clone()));
                    (u, a)
                })
                .collect())
        }
        Formula::Imp(..) | Formula::Forall(..) => Err(FormulaError::NotHConvertible(
            "hypotheses with implications or universals have no H-clause form".into(),
        )),
    }
}

/// All instances of the clause obtained by replacing its universals with terms
/// from `universe` of matching type, deduplicated modulo α.
pub fn ground_instances(
    sig: &Signature,
    h: &HClause,
    universe: &[Term],
) -> Vec<HClause> {
    let typed: Vec<(Term, Type)> = universe
        .iter()
        .filter_map(|t| typecheck(sig, &Context::new(), t).ok().map(|ty| (t.clone(), ty)))
        .collect();
    let mut out: Vec<HClause> = Vec::new();
    let mut seen: HashSet<(Vec<Term>, Term)> = HashSet::new();
    let mut choice: Vec<Term> = Vec::new();
    fn go(
        h: &HClause,
        typed: &[(Term, Type)],
        k: usize,
        choice: &mut Vec<Term>,
        seen: &mut HashSet<(Vec<Term>, Term)>,
        out: &mut Vec<HClause>,
    ) {
        if k == h.universals.len() {
            let s = term::Substitution(
                h.universals
                    .iter()
                    .map(|(x, _)| x.clone())
                    .zip(choice.iter().cloned())
                    .collect(),
            );
            let inst = h.apply(&s);
            let key = (
                inst.body.iter().map(term::canonical).collect(),
                term::canonical(&inst.head),
            );
            if seen.insert(key) {
                out.push(inst);
            }
            return;
        }
        let ty = &h.universals[k].1;
        for (t, tty) in typed {
            if tty == ty {
                choice.push(t.clone());
                go(h, typed, k + 1, choice, seen, out);
                choice.pop();
            }
        }
    }
    go(h, &typed, 0, &mut choice, &mut seen, &mut out);
    out
}

/// Closed first-order terms of type `ι` with at most `max_size` symbols.
pub fn first_order_universe(sig: &Signature, max_size: usize) -> Vec<Term> {
    let fs = sig.function_symbols();
    // by_size[n] holds the terms of exactly n symbols
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
    for n in 1..=max_size {
        let mut level = Vec::new();
        for (f, arity) in &fs {
            if *arity == 0 {
                if n == 1 {
                    level.push(Term::Const(f.clone()));
                }
                continue;
            }
            for split in compositions(n - 1, *arity) {
                let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
                for part in split {
                    let mut next = Vec::new();
                    for prefix in &acc {
                        for t in &by_size[part] {
                            let mut p = prefix.clone();
                            p.push(t.clone());
                            next.push(p);
                        }
                    }
                    acc = next;
                }
                for args in acc {
                    level.push(Term::apps(Term::Const(f.clone()), args));
                }
            }
        }
        by_size[n] = level;
    }
    by_size.into_iter().flatten().collect()
}

/// Ordered ways to write `n` as a sum of `k` positive parts.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> Type {
        Type::iota()
    }

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare("0", i());
        s.declare("1", i());
        s.declare("nil", i());
        s.declare("scons", Type::curried([i(), i()], i()));
        s.declare("member", Type::curried([i(), i()], Type::o()));
        s.declare("p", Type::o());
        s
    }

    fn member(x: Term, t: Term) -> Formula {
        Formula::Atom(Term::apps(Term::cnst("member"), [x, t]))
    }

    fn list(items: &[&str], tail: Term) -> Term {
        items.iter().rev().fold(tail, |acc, c| {
            Term::apps(Term::cnst("scons"), [Term::cnst(c), acc])
        })
    }

    #[test]
    fn classification_table() {
        let s = sig();
        let x = || Term::var("x");
        let g1 = Formula::exists(
            "x",
            i(),
            Formula::and(member(Term::cnst("0"), list(&["0", "1"], x())), member(Term::cnst("1"), list(&["0", "1"], x()))),
        );
        let all: BTreeSet<Calculus> = Calculus::ALL.into_iter().collect();
        assert_eq!(classify(&s, &g1, Role::Goal).unwrap(), all);
        let g2 = Formula::forall("x", i(), member(Term::cnst("0"), list(&["0", "1"], x())));
        let hh: BTreeSet<Calculus> = [Calculus::Fohh, Calculus::Hohh].into_iter().collect();
        assert_eq!(classify(&s, &g2, Role::Goal).unwrap(), hh);
        let g3 = Formula::forall(
            "x",
            i(),
            Formula::imp(member(Term::cnst("0"), list(&["0", "1"], x())), member(Term::cnst("1"), list(&["0", "1"], x()))),
        );
        assert_eq!(classify(&s, &g3, Role::Goal).unwrap(), hh);
        assert!(classify(&s, &Formula::Atom(Term::cnst("0")), Role::Goal).is_err());
    }

    #[test]
    fn core_is_clause_and_goal() {
        let s = sig();
        let f = Formula::forall("x", i(), Formula::imp(member(Term::var("x"), Term::cnst("nil")), Formula::Atom(Term::cnst("p"))));
        let core = classify(&s, &f, Role::Core).unwrap();
        let both: BTreeSet<Calculus> = classify(&s, &f, Role::Clause)
            .unwrap()
            .intersection(&classify(&s, &f, Role::Goal).unwrap())
            .cloned()
            .collect();
        assert_eq!(core, both);
    }

    #[test]
    fn h_clause_conversion() {
        let d = Formula::forall(
            "x",
            i(),
            Formula::imp(
                Formula::or(member(Term::var("x"), Term::cnst("nil")), Formula::Top),
                Formula::and(Formula::Atom(Term::cnst("p")), member(Term::var("x"), Term::var("x"))),
            ),
        );
        let hs = to_h_clauses(&d).unwrap();
        assert_eq!(hs.len(), 4);
        assert_eq!(hs[0].body.len(), 1);
        assert!(hs[1].body.is_empty());
        let bad = Formula::imp(Formula::forall("x", i(), Formula::Atom(Term::cnst("p"))), Formula::Atom(Term::cnst("p")));
        assert!(matches!(to_h_clauses(&bad), Err(FormulaError::NotHConvertible(_))));
    }

    #[test]
    fn substitution_renames_quantifiers() {
        let f = Formula::forall("y", i(), member(Term::var("x"), Term::var("y")));
        let g = subst(&f, "x", &Term::var("y"));
        let Formula::Forall(z, _, _) = &g else { panic!() };
        assert_ne!(&**z, "y");
        assert!(free_vars(&g).contains("y"));
    }

    #[test]
    fn universe_enumeration() {
        let s = sig();
        let u = first_order_universe(&s, 3);
        // 3 constants, then scons over pairs of constants
        assert_eq!(u.len(), 3 + 9);
        let h = HClause {
            universals: vec![(term::name("x"), i())],
            body: vec![],
            head: Term::apps(Term::cnst("member"), [Term::var("x"), Term::var("x")]),
        };
        assert_eq!(ground_instances(&s, &h, &u[..3]).len(), 3);
    }
}
