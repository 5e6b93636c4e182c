//! Guarded fixed points, guarded full terms, guarded atoms and their snapshots.
//!
//! A guarded fixed point has the shape `fix λx.λy1..ym. f L1 .. (x N1 .. Nm) .. Lr`
//! with `f` a constructor and every `Li`, `Nj` first-order over the `y`s. Each
//! unfolding therefore emits one constructor before the next recursive call, which
//! is what makes the infinite term productive.

use std::collections::HashMap;

use thiserror::Error;

use crate::term::{
    alpha_eq, fixbeta_equiv, is_first_order, name, Context, Equiv, Name, Signature, Term, Type,
    DIAMOND,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GuardCondition {
    /// Not of the form `fix λx.λȳ. f ..` with exactly one recursive call.
    Shape,
    /// `x` must have type `ι^m -> ι` and each `y` type `ι`.
    RecursionType,
    /// The guard `f` must be a constant of type `ι^(r+1) -> ι`.
    GuardType,
    /// Every `Li` and `Nj` must be a first-order term.
    FirstOrderArguments,
    /// `x` must not occur in any `Li`, `Nj`; their free variables lie among the `y`s.
    FreeVariables,
}

impl GuardCondition {
    /// Index of the condition in the four-part definition (shape violations are 0).
    pub fn index(self) -> u8 {
        match self {
            GuardCondition::Shape => 0,
            GuardCondition::RecursionType => 1,
            GuardCondition::GuardType => 2,
            GuardCondition::FirstOrderArguments => 3,
            GuardCondition::FreeVariables => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardViolation {
    pub condition: GuardCondition,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GuardReport {
    pub violations: Vec<GuardViolation>,
}

impl GuardReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, condition: GuardCondition, detail: impl Into<String>) {
        self.violations.push(GuardViolation {
            condition,
            detail: detail.into(),
        });
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GuardError {
    #[error("not an atom: {0}")]
    NotAnAtom(String),
    #[error("atom is not guarded: {0}")]
    NotGuarded(String),
}

/// The pieces of a guarded fixed point.
#[derive(Clone, Debug)]
pub struct GuardedFix {
    pub term: Term,
    pub x: Name,
    pub ys: Vec<Name>,
    pub guard: Name,
    /// Arguments of the guard; the one at `self_pos` is the recursive call.
    pub args: Vec<Term>,
    pub self_pos: usize,
    /// Arguments of the recursive call.
    pub call_args: Vec<Term>,
}

/// Checks the guarded fixed point conditions and returns a report listing every
/// violated condition.
pub fn check_guarded_fixed_point(sig: &Signature, t: &Term) -> GuardReport {
    decompose(sig, t).1
}

pub fn is_guarded_fixed_point(sig: &Signature, t: &Term) -> bool {
    decompose(sig, t).0.is_some()
}

pub fn guarded_fix(sig: &Signature, t: &Term) -> Option<GuardedFix> {
    decompose(sig, t).0
}

fn decompose(sig: &Signature, t: &Term) -> (Option<GuardedFix>, GuardReport) {
    let mut rep = GuardReport::default();
    let Term::Fix(b) = t else {
        rep.push(GuardCondition::Shape, "not a fix term");
        return (None, rep);
    };
    let Term::Abs(x, xty, body) = &**b else {
        rep.push(GuardCondition::Shape, "fix body is not an abstraction");
        return (None, rep);
    };
    let mut ys = Vec::new();
    let mut ctx = Context::new();
    let mut core: &Term = body;
    while let Term::Abs(y, yty, inner) = core {
        if !yty.is_iota() {
            rep.push(GuardCondition::RecursionType, format!("parameter `{y}` has type {yty}"));
        }
        ys.push(y.clone());
        ctx.insert(y.clone(), yty.clone());
        core = inner;
    }
    if !xty.is_iota_fn(ys.len()) {
        rep.push(
            GuardCondition::RecursionType,
            format!("recursion variable `{x}` has type {xty}, expected ι^{} -> ι", ys.len()),
        );
    }
    let (h, args) = core.spine();
    let Term::Const(f) = h else {
        rep.push(GuardCondition::Shape, "body is not headed by a constructor");
        return (None, rep);
    };
    match sig.get(f) {
        Some(fty) if fty.is_iota_fn(args.len()) && !args.is_empty() => {}
        Some(fty) => rep.push(GuardCondition::GuardType, format!("guard `{f}` has type {fty}")),
        None => rep.push(GuardCondition::GuardType, format!("guard `{f}` is not declared")),
    }
    let calls: Vec<usize> = args
        .iter()
        .enumerate()
        .filter(|(_, a)| matches!(a.spine().0, Term::Var(v) if v == x))
        .map(|(i, _)| i)
        .collect();
    if calls.len() != 1 {
        rep.push(
            GuardCondition::Shape,
            format!("expected exactly one recursive call, found {}", calls.len()),
        );
        return (None, rep);
    }
    let self_pos = calls[0];
    let call_args: Vec<Term> = args[self_pos].spine().1.into_iter().cloned().collect();
    if call_args.len() != ys.len() {
        rep.push(
            GuardCondition::RecursionType,
            format!("recursive call has {} arguments, expected {}", call_args.len(), ys.len()),
        );
    }
    let others = args
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != self_pos)
        .map(|(_, a)| *a)
        .chain(call_args.iter());
    let mut fo_ctx = ctx.clone();
    fo_ctx.insert(x.clone(), xty.clone());
    for a in others {
        if crate::term::occurs_free(x, a) {
            rep.push(GuardCondition::FreeVariables, format!("`{x}` occurs in an argument"));
            continue;
        }
        let fv = crate::term::free_vars(a);
        if let Some(v) = fv.iter().find(|v| !ys.contains(v)) {
            rep.push(GuardCondition::FreeVariables, format!("free variable `{v}`"));
            continue;
        }
        if !is_first_order(sig, &ctx, a) {
            rep.push(GuardCondition::FirstOrderArguments, "argument is not a first-order term");
        }
    }
    if !rep.ok() {
        return (None, rep);
    }
    let g = GuardedFix {
        term: t.clone(),
        x: x.clone(),
        ys,
        guard: f.clone(),
        args: args.into_iter().cloned().collect(),
        self_pos,
        call_args,
    };
    (Some(g), rep)
}

/// A first-order term, or a guarded fixed point applied to as many first-order
/// arguments as it has parameters.
pub fn is_guarded_full(sig: &Signature, ctx: &Context, t: &Term) -> bool {
    if is_first_order(sig, ctx, t) {
        return true;
    }
    let (h, args) = t.spine();
    match guarded_fix(sig, h) {
        Some(g) => {
            g.ys.len() == args.len()
                && args
                    .iter()
                    .all(|a| is_first_order(sig, ctx, a) && a_is_iota(sig, ctx, a))
        }
        None => false,
    }
}

fn a_is_iota(sig: &Signature, ctx: &Context, a: &Term) -> bool {
    crate::term::typecheck(sig, ctx, a)
        .map(|t| t.is_iota())
        .unwrap_or(false)
}

fn atom_args<'a>(sig: &Signature, a: &'a Term) -> Result<Vec<&'a Term>, GuardError> {
    let (h, args) = a.spine();
    match h {
        Term::Const(p) if sig.get(p).map(|t| t.target().is_o()).unwrap_or(false) => Ok(args),
        _ => Err(GuardError::NotAnAtom(a.to_string())),
    }
}

/// True when every argument of the atom is a guarded full term.
pub fn is_strictly_guarded_atom(sig: &Signature, ctx: &Context, a: &Term) -> Result<bool, GuardError> {
    Ok(atom_args(sig, a)?.iter().all(|t| is_guarded_full(sig, ctx, t)))
}

/// Guarded atom test. Atoms whose arguments are guarded full terms pass directly.
/// Otherwise subterms are folded back into guarded fixed points applied to
/// first-order arguments; the atom passes when the folded atom is strictly
/// guarded and the bounded `=fixβ` check confirms it is equal to the original.
pub fn is_guarded_atom(sig: &Signature, ctx: &Context, a: &Term, bound: usize) -> Result<bool, GuardError> {
    if is_strictly_guarded_atom(sig, ctx, a)? {
        return Ok(true);
    }
    let folded = fold_guarded(sig, a);
    if !is_strictly_guarded_atom(sig, ctx, &folded)? {
        return Ok(false);
    }
    Ok(fixbeta_equiv(a, &folded, bound) == Equiv::Equal)
}

/// Guarded fixed points occurring anywhere in `t`, deduplicated modulo α.
pub fn guarded_fixes_in(sig: &Signature, t: &Term) -> Vec<GuardedFix> {
    let mut out: Vec<GuardedFix> = Vec::new();
    for s in crate::term::subterms(t) {
        if let Term::Fix(_) = s {
            if let Some(g) = guarded_fix(sig, &s) {
                if !out.iter().any(|o| alpha_eq(&o.term, &g.term)) {
                    out.push(g);
                }
            }
        }
    }
    out
}

/// Rewrites, bottom-up, every subterm that is a one-step unfolding of one of the
/// guarded fixed points occurring in `t` back into the folded application.
pub fn fold_guarded(sig: &Signature, t: &Term) -> Term {
    let fixes = guarded_fixes_in(sig, t);
    if fixes.is_empty() {
        return t.clone();
    }
    fold_with(&fixes, t)
}

fn fold_with(fixes: &[GuardedFix], t: &Term) -> Term {
    let (h, args) = t.spine();
    if let Term::Fix(_) = h {
        return t.clone();
    }
    let args: Vec<Term> = args.into_iter().map(|a| fold_with(fixes, a)).collect();
    let rebuilt = Term::apps(h.clone(), args);
    for g in fixes {
        if let Some(ms) = match_unfolding(g, &rebuilt) {
            return Term::apps(g.term.clone(), ms);
        }
    }
    rebuilt
}

fn match_unfolding(g: &GuardedFix, t: &Term) -> Option<Vec<Term>> {
    let (h, args) = t.spine();
    match h {
        Term::Const(f) if *f == g.guard && args.len() == g.args.len() => {}
        _ => return None,
    }
    let mut binding: HashMap<Name, Term> = HashMap::new();
    for (i, (pat, tgt)) in g.args.iter().zip(args.iter()).enumerate() {
        if i == g.self_pos {
            let (th, targs) = tgt.spine();
            if !alpha_eq(th, &g.term) || targs.len() != g.call_args.len() {
                return None;
            }
            for (p, a) in g.call_args.iter().zip(targs) {
                if !fo_match(p, a, &g.ys, &mut binding) {
                    return None;
                }
            }
        } else if !fo_match(pat, tgt, &g.ys, &mut binding) {
            return None;
        }
    }
    g.ys.iter().map(|y| binding.get(y).cloned()).collect()
}

fn fo_match(p: &Term, t: &Term, vars: &[Name], b: &mut HashMap<Name, Term>) -> bool {
    match p {
        Term::Var(y) if vars.contains(y) => match b.get(y) {
            Some(prev) => alpha_eq(prev, t),
            None => {
                b.insert(y.clone(), t.clone());
                true
            }
        },
        Term::App(pf, pa) => match t {
            Term::App(tf, ta) => fo_match(pf, tf, vars, b) && fo_match(pa, ta, vars, b),
            _ => false,
        },
        _ => alpha_eq(p, t),
    }
}

/// The signature extended with the snapshot constant `⋄ : ι`.
pub fn with_diamond(sig: &Signature) -> Signature {
    let mut s = sig.clone();
    s.declare(DIAMOND, Type::iota());
    s
}

pub fn diamond() -> Term {
    Term::Const(name(DIAMOND))
}

/// Replaces every maximal non-first-order guarded full subterm of the atom's
/// constructor skeleton by `⋄`. The result is a first-order atom over the
/// signature extended with `⋄`.
pub fn snapshot(sig: &Signature, ctx: &Context, a: &Term) -> Result<Term, GuardError> {
    let (h, args) = a.spine();
    atom_args(sig, a)?;
    let mut out = Vec::with_capacity(args.len());
    for t in args {
        out.push(snap(sig, ctx, t)?);
    }
    Ok(Term::apps(h.clone(), out))
}

fn snap(sig: &Signature, ctx: &Context, t: &Term) -> Result<Term, GuardError> {
    if !t.contains_fix() && is_first_order(sig, ctx, t) {
        return Ok(t.clone());
    }
    if is_guarded_full(sig, ctx, t) {
        return Ok(diamond());
    }
    let (h, args) = t.spine();
    match h {
        Term::Const(_) if !args.is_empty() => {
            let mut out = Vec::with_capacity(args.len());
            for x in args {
                out.push(snap(sig, ctx, x)?);
            }
            Ok(Term::apps(h.clone(), out))
        }
        _ => Err(GuardError::NotGuarded(t.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::fixbeta_unfold;

    fn i() -> Type {
        Type::iota()
    }

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare("0", i());
        s.declare("s", Type::arrow(i(), i()));
        s.declare("scons", Type::curried([i(), i()], i()));
        s.declare("from", Type::curried([i(), i()], Type::o()));
        s.declare("bitstream", Type::arrow(i(), Type::o()));
        s
    }

    fn scons(a: Term, b: Term) -> Term {
        Term::apps(Term::cnst("scons"), [a, b])
    }

    fn fr_str() -> Term {
        Term::fix(Term::abs(
            "f",
            Type::arrow(i(), i()),
            Term::abs(
                "n",
                i(),
                scons(
                    Term::var("n"),
                    Term::app(Term::var("f"), Term::app(Term::cnst("s"), Term::var("n"))),
                ),
            ),
        ))
    }

    #[test]
    fn recognises_guarded_fixed_points() {
        let s = sig();
        assert!(is_guarded_fixed_point(&s, &fr_str()));
        // fix λx. x is not guarded: there is no constructor.
        let bad = Term::fix(Term::abs("x", i(), Term::var("x")));
        let r = check_guarded_fixed_point(&s, &bad);
        assert!(!r.ok());
        // Two recursive calls.
        let two = Term::fix(Term::abs("x", i(), scons(Term::var("x"), Term::var("x"))));
        let r = check_guarded_fixed_point(&s, &two);
        assert_eq!(r.violations[0].condition, GuardCondition::Shape);
        // The guard must be a constructor into ι.
        let pred = Term::fix(Term::abs(
            "x",
            i(),
            Term::apps(Term::cnst("from"), [Term::cnst("0"), Term::var("x")]),
        ));
        let r = check_guarded_fixed_point(&s, &pred);
        assert!(r.violations.iter().any(|v| v.condition == GuardCondition::GuardType));
    }

    #[test]
    fn unfolded_atoms_fold_back() {
        let s = sig();
        let ctx = Context::new();
        let a0 = Term::apps(Term::cnst("from"), [Term::cnst("0"), Term::app(fr_str(), Term::cnst("0"))]);
        assert!(is_strictly_guarded_atom(&s, &ctx, &a0).unwrap());
        let a1 = fixbeta_unfold(&a0).unwrap();
        assert!(!is_strictly_guarded_atom(&s, &ctx, &a1).unwrap());
        assert!(is_guarded_atom(&s, &ctx, &a1, 8).unwrap());
        let folded = fold_guarded(&s, &a1);
        assert!(alpha_eq(&folded, &a0));
        assert!(matches!(
            is_guarded_atom(&s, &ctx, &Term::cnst("0"), 8),
            Err(GuardError::NotAnAtom(_))
        ));
    }

    #[test]
    fn snapshot_hides_infinite_parts() {
        let s = sig();
        let ctx = Context::new();
        let a0 = Term::apps(Term::cnst("from"), [Term::cnst("0"), Term::app(fr_str(), Term::cnst("0"))]);
        let a1 = fixbeta_unfold(&a0).unwrap();
        let snap = snapshot(&s, &ctx, &a1).unwrap();
        let expect = Term::apps(
            Term::cnst("from"),
            [Term::cnst("0"), scons(Term::cnst("0"), diamond())],
        );
        assert_eq!(snap, expect);
        assert!(crate::term::is_first_order_atom(&with_diamond(&s), &ctx, &snap));
    }
}
