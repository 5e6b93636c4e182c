//! Simply typed λ-terms with a fixed-point former.
//!
//! Terms are immutable and share subterms through `Arc`, so cloning is cheap and
//! values can cross threads. Abstraction binders carry their type.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Prefix reserved for machine-generated names (eigenvariables, renamed binders).
pub const RESERVED_PREFIX: char = '_';

/// The constant used by snapshots to stand for an unevaluated infinite subterm.
pub const DIAMOND: &str = "⋄";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Type {
    Base(Name),
    Arrow(Arc<Type>, Arc<Type>),
}

impl Type {
    pub fn iota() -> Type {
        Type::Base(name("i"))
    }

    pub fn o() -> Type {
        Type::Base(name("o"))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Arc::new(a), Arc::new(b))
    }

    /// `args[0] -> ... -> args[n-1] -> target`
    pub fn curried(args: impl IntoIterator<Item = Type>, target: Type) -> Type {
        let args: Vec<Type> = args.into_iter().collect();
        args.into_iter().rev().fold(target, |acc, a| Type::arrow(a, acc))
    }

    pub fn is_iota(&self) -> bool {
        matches!(self, Type::Base(b) if &**b == "i")
    }

    pub fn is_o(&self) -> bool {
        matches!(self, Type::Base(b) if &**b == "o")
    }

    /// Splits `a1 -> ... -> an -> b` with `b` a base type.
    pub fn split(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut t = self;
        while let Type::Arrow(a, b) = t {
            args.push(&**a);
            t = b;
        }
        (args, t)
    }

    pub fn target(&self) -> &Type {
        self.split().1
    }

    pub fn order(&self) -> usize {
        match self {
            Type::Base(_) => 0,
            Type::Arrow(a, b) => (a.order() + 1).max(b.order()),
        }
    }

    pub fn mentions_o(&self) -> bool {
        match self {
            Type::Base(_) => self.is_o(),
            Type::Arrow(a, b) => a.mentions_o() || b.mentions_o(),
        }
    }

    /// True for `ι -> ... -> ι` with `n` arguments.
    pub fn is_iota_fn(&self, n: usize) -> bool {
        let (args, tgt) = self.split();
        args.len() == n && args.iter().all(|a| a.is_iota()) && tgt.is_iota()
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Base(b) => write!(f, "{b}"),
            Type::Arrow(a, b) => match &**a {
                Type::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Name),
    Const(Name),
    App(Arc<Term>, Arc<Term>),
    Abs(Name, Type, Arc<Term>),
    Fix(Arc<Term>),
}

impl Term {
    pub fn var(s: &str) -> Term {
        Term::Var(name(s))
    }

    pub fn cnst(s: &str) -> Term {
        Term::Const(name(s))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn abs(x: &str, ty: Type, body: Term) -> Term {
        Term::Abs(name(x), ty, Arc::new(body))
    }

    pub fn fix(body: Term) -> Term {
        Term::Fix(Arc::new(body))
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn head_const(&self) -> Option<&Name> {
        match self.spine().0 {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_fix_headed(&self) -> bool {
        matches!(self.spine().0, Term::Fix(_))
    }

    pub fn contains_fix(&self) -> bool {
        match self {
            Term::Fix(_) => true,
            Term::App(f, a) => f.contains_fix() || a.contains_fix(),
            Term::Abs(_, _, b) => b.contains_fix(),
            _ => false,
        }
    }

    pub fn mentions_const(&self, c: &str) -> bool {
        match self {
            Term::Const(d) => &**d == c,
            Term::App(f, a) => f.mentions_const(c) || a.mentions_const(c),
            Term::Abs(_, _, b) | Term::Fix(b) => b.mentions_const(c),
            Term::Var(_) => false,
        }
    }

    pub fn constants(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Const(c) => {
                out.insert(c.clone());
            }
            Term::App(f, a) => {
                f.constants(out);
                a.constants(out);
            }
            Term::Abs(_, _, b) | Term::Fix(b) => b.constants(out),
            Term::Var(_) => {}
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Abs(_, _, b) | Term::Fix(b) => 1 + b.size(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("unbound constant `{0}`")]
    UnboundConstant(Name),
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("type mismatch in `{term}`: expected {expected}, found {found}")]
    TypeMismatch {
        term: String,
        expected: Type,
        found: Type,
    },
    #[error("`{0}` is applied but is not a function")]
    NotAFunction(String),
    #[error("fix body must be an abstraction")]
    FixBodyNotAbstraction,
    #[error("no fix redex to unfold")]
    NoFixRedex,
}

/// Logical constants. They live in every signature but are never produced by the
/// parser; `imp` and `forall_i` delimit the term classes used by the higher-order calculi.
pub const LOGICAL_CONSTANTS: [&str; 6] = ["and", "or", "imp", "top", "forall_i", "exists_i"];

pub fn is_logical(c: &str) -> bool {
    LOGICAL_CONSTANTS.contains(&c)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    consts: BTreeMap<Name, Type>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

impl Signature {
    pub fn new() -> Signature {
        let o = Type::o;
        let oo = || Type::curried([o(), o()], o());
        let q = || Type::arrow(Type::arrow(Type::iota(), o()), o());
        let mut consts = BTreeMap::new();
        consts.insert(name("and"), oo());
        consts.insert(name("or"), oo());
        consts.insert(name("imp"), oo());
        consts.insert(name("top"), o());
        consts.insert(name("forall_i"), q());
        consts.insert(name("exists_i"), q());
        Signature { consts }
    }

    pub fn declare(&mut self, c: &str, ty: Type) {
        self.consts.insert(name(c), ty);
    }

    pub fn declare_name(&mut self, c: Name, ty: Type) {
        self.consts.insert(c, ty);
    }

    pub fn get(&self, c: &str) -> Option<&Type> {
        self.consts.get(c)
    }

    pub fn contains(&self, c: &str) -> bool {
        self.consts.contains_key(c)
    }

    /// Non-logical declarations in name order.
    pub fn declarations(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.consts.iter().filter(|(c, _)| !is_logical(c))
    }

    /// Constants that are not logical and whose target type is `ι`.
    pub fn function_symbols(&self) -> Vec<(Name, usize)> {
        self.declarations()
            .filter_map(|(c, t)| {
                let (args, tgt) = t.split();
                (tgt.is_iota() && args.iter().all(|a| a.is_iota())).then(|| (c.clone(), args.len()))
            })
            .collect()
    }

    /// Predicates: non-logical constants with target type `o`.
    pub fn predicates(&self) -> Vec<(Name, usize)> {
        self.declarations()
            .filter_map(|(c, t)| {
                let (args, tgt) = t.split();
                tgt.is_o().then(|| (c.clone(), args.len()))
            })
            .collect()
    }

    /// Declarations violating the first-order restriction: order at most one and
    /// `o` appearing only as the target of a predicate.
    pub fn first_order_violations(&self) -> Vec<Name> {
        self.declarations()
            .filter(|(_, t)| {
                let (args, _) = t.split();
                t.order() > 1 || args.iter().any(|a| a.mentions_o())
            })
            .map(|(c, _)| c.clone())
            .collect()
    }

    pub fn is_first_order_predicate(&self, c: &str) -> bool {
        if is_logical(c) {
            return false;
        }
        match self.get(c) {
            Some(t) => {
                let (args, tgt) = t.split();
                tgt.is_o() && args.iter().all(|a| a.order() == 0 && !a.is_o())
            }
            None => false,
        }
    }
}

/// Typing context for free variables.
pub type Context = BTreeMap<Name, Type>;

pub fn typecheck(sig: &Signature, ctx: &Context, t: &Term) -> Result<Type, TermError> {
    let mut scope: Vec<(Name, Type)> = Vec::new();
    infer(sig, ctx, &mut scope, t)
}

fn lookup<'a>(ctx: &'a Context, scope: &'a [(Name, Type)], x: &str) -> Option<&'a Type> {
    scope
        .iter()
        .rev()
        .find(|(y, _)| &**y == x)
        .map(|(_, t)| t)
        .or_else(|| ctx.get(x))
}

fn infer(
    sig: &Signature,
    ctx: &Context,
    scope: &mut Vec<(Name, Type)>,
    t: &Term,
) -> Result<Type, TermError> {
    match t {
        Term::Var(x) => lookup(ctx, scope, x)
            .cloned()
            .ok_or_else(|| TermError::UnboundVariable(x.clone())),
        Term::Const(c) => sig
            .get(c)
            .cloned()
            .ok_or_else(|| TermError::UnboundConstant(c.clone())),
        Term::App(f, a) => {
            let tf = infer(sig, ctx, scope, f)?;
            let ta = infer(sig, ctx, scope, a)?;
            match tf {
                Type::Arrow(dom, cod) => {
                    if *dom != ta {
                        return Err(TermError::TypeMismatch {
                            term: t.to_string(),
                            expected: (*dom).clone(),
                            found: ta,
                        });
                    }
                    Ok((*cod).clone())
                }
                Type::Base(_) => Err(TermError::NotAFunction(f.to_string())),
            }
        }
        Term::Abs(x, ty, b) => {
            scope.push((x.clone(), ty.clone()));
            let tb = infer(sig, ctx, scope, b);
            scope.pop();
            Ok(Type::arrow(ty.clone(), tb?))
        }
        Term::Fix(b) => {
            let Term::Abs(x, ty, body) = &**b else {
                return Err(TermError::FixBodyNotAbstraction);
            };
            scope.push((x.clone(), ty.clone()));
            let tb = infer(sig, ctx, scope, body);
            scope.pop();
            let tb = tb?;
            if tb != *ty {
                return Err(TermError::TypeMismatch {
                    term: t.to_string(),
                    expected: ty.clone(),
                    found: tb,
                });
            }
            Ok(tb)
        }
    }
}

pub fn free_vars(t: &Term) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_fv(t, &mut Vec::new(), &mut out);
    out
}

fn collect_fv(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Const(_) => {}
        Term::App(f, a) => {
            collect_fv(f, bound, out);
            collect_fv(a, bound, out);
        }
        Term::Abs(x, _, b) => {
            bound.push(x.clone());
            collect_fv(b, bound, out);
            bound.pop();
        }
        Term::Fix(b) => collect_fv(b, bound, out),
    }
}

pub fn is_closed(t: &Term) -> bool {
    free_vars(t).is_empty()
}

pub fn occurs_free(x: &str, t: &Term) -> bool {
    match t {
        Term::Var(y) => &**y == x,
        Term::Const(_) => false,
        Term::App(f, a) => occurs_free(x, f) || occurs_free(x, a),
        Term::Abs(y, _, b) => &**y != x && occurs_free(x, b),
        Term::Fix(b) => occurs_free(x, b),
    }
}

/// Subterms of `t` (including `t`), deduplicated structurally.
pub fn subterms(t: &Term) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    fn go(t: &Term, out: &mut BTreeSet<Term>) {
        if !out.insert(t.clone()) {
            return;
        }
        match t {
            Term::App(f, a) => {
                go(f, out);
                go(a, out);
            }
            Term::Abs(_, _, b) | Term::Fix(b) => go(b, out),
            _ => {}
        }
    }
    go(t, &mut out);
    out
}

/// Picks a variant of `base` that is not in `avoid`. Generated names carry the
/// reserved prefix, so they never clash with parsed identifiers.
pub fn fresh_variant(base: &str, avoid: &dyn Fn(&str) -> bool) -> Name {
    let stem: String = base
        .trim_start_matches(RESERVED_PREFIX)
        .trim_end_matches(|c: char| c.is_ascii_digit())
        .to_string();
    let stem = if stem.is_empty() { "v".to_string() } else { stem };
    (1..)
        .map(|k| format!("{RESERVED_PREFIX}{stem}{k}"))
        .find(|n| !avoid(n))
        .map(|n| name(&n))
        .expect("unbounded search")
}

/// Per-session fresh name supply for eigenvariables.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    counter: u64,
}

impl Fresh {
    pub fn new() -> Fresh {
        Fresh::default()
    }

    /// A fresh constant name derived from `hint`, e.g. `x` gives `_X3`.
    pub fn next(&mut self, hint: &str) -> Name {
        self.counter += 1;
        let stem: String = hint
            .trim_start_matches(RESERVED_PREFIX)
            .trim_end_matches(|c: char| c.is_ascii_digit())
            .to_uppercase();
        let stem = if stem.is_empty() { "C".to_string() } else { stem };
        name(&format!("{RESERVED_PREFIX}{stem}{}", self.counter))
    }
}

/// Capture-avoiding `t[x := n]`.
pub fn subst(t: &Term, x: &str, n: &Term) -> Term {
    let fv = free_vars(n);
    subst_with(t, x, n, &fv)
}

fn subst_with(t: &Term, x: &str, n: &Term, fv_n: &BTreeSet<Name>) -> Term {
    match t {
        Term::Var(y) => {
            if &**y == x {
                n.clone()
            } else {
                t.clone()
            }
        }
        Term::Const(_) => t.clone(),
        Term::App(f, a) => Term::App(
            Arc::new(subst_with(f, x, n, fv_n)),
            Arc::new(subst_with(a, x, n, fv_n)),
        ),
        Term::Fix(b) => Term::Fix(Arc::new(subst_with(b, x, n, fv_n))),
        Term::Abs(y, ty, b) => {
            if &**y == x || !occurs_free(x, b) {
                return t.clone();
            }
            if !fv_n.contains(y) {
                return Term::Abs(y.clone(), ty.clone(), Arc::new(subst_with(b, x, n, fv_n)));
            }
            let fv_b = free_vars(b);
            let z = fresh_variant(y, &|c| {
                fv_n.contains(c) || fv_b.contains(c) || c == x
            });
            let renamed = subst(b, y, &Term::Var(z.clone()));
            Term::Abs(z, ty.clone(), Arc::new(subst_with(&renamed, x, n, fv_n)))
        }
    }
}

/// A sequence of bindings applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(pub Vec<(Name, Term)>);

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn bind(mut self, x: &str, t: Term) -> Substitution {
        self.0.push((name(x), t));
        self
    }

    pub fn apply(&self, t: &Term) -> Term {
        self.0.iter().fold(t.clone(), |acc, (x, n)| subst(&acc, x, n))
    }

    /// Applies the substitution after checking each binding against the type of the
    /// variable it replaces.
    pub fn apply_checked(&self, sig: &Signature, ctx: &Context, t: &Term) -> Result<Term, TermError> {
        for (x, n) in &self.0 {
            if let Some(expected) = ctx.get(x) {
                let found = typecheck(sig, ctx, n)?;
                if &found != expected {
                    return Err(TermError::TypeMismatch {
                        term: x.to_string(),
                        expected: expected.clone(),
                        found,
                    });
                }
            }
        }
        Ok(self.apply(t))
    }
}

pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, env: &mut Vec<(Name, Name)>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let ix = env.iter().rposition(|(l, _)| l == x);
                let iy = env.iter().rposition(|(_, r)| r == y);
                match (ix, iy) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::Const(c), Term::Const(d)) => c == d,
            (Term::App(f, x), Term::App(g, y)) => go(f, g, env) && go(x, y, env),
            (Term::Fix(x), Term::Fix(y)) => go(x, y, env),
            (Term::Abs(x, tx, bx), Term::Abs(y, ty, by)) => {
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

/// Canonical representative of the α-class: binders renamed by nesting depth.
/// Structural equality on canonical forms coincides with α-equivalence.
pub fn canonical(t: &Term) -> Term {
    fn go(t: &Term, env: &mut Vec<(Name, Name)>) -> Term {
        match t {
            Term::Var(x) => match env.iter().rev().find(|(o, _)| o == x) {
                Some((_, n)) => Term::Var(n.clone()),
                None => t.clone(),
            },
            Term::Const(_) => t.clone(),
            Term::App(f, a) => Term::App(Arc::new(go(f, env)), Arc::new(go(a, env))),
            Term::Fix(b) => Term::Fix(Arc::new(go(b, env))),
            Term::Abs(x, ty, b) => {
                let n = name(&format!("#{}", env.len()));
                env.push((x.clone(), n.clone()));
                let body = go(b, env);
                env.pop();
                Term::Abs(n, ty.clone(), Arc::new(body))
            }
        }
    }
    go(t, &mut Vec::new())
}

/// β-normal form. Fix terms are not unfolded, so typed terms always terminate.
pub fn beta_normalize(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::Abs(x, ty, b) => Term::Abs(x.clone(), ty.clone(), Arc::new(beta_normalize(b))),
        Term::Fix(b) => Term::Fix(Arc::new(beta_normalize(b))),
        Term::App(f, a) => {
            let f = beta_normalize(f);
            match f {
                Term::Abs(x, _, b) => beta_normalize(&subst(&b, &x, a)),
                f => Term::App(Arc::new(f), Arc::new(beta_normalize(a))),
            }
        }
    }
}

pub fn is_beta_normal(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Const(_) => true,
        Term::Abs(_, _, b) | Term::Fix(b) => is_beta_normal(b),
        Term::App(f, a) => !matches!(**f, Term::Abs(..)) && is_beta_normal(f) && is_beta_normal(a),
    }
}

/// One fix-β step at the head of a fix-headed spine: `fix λx.M` becomes `M[x := fix λx.M]`.
/// Returns `None` when the head is not a fix term.
pub fn unfold_head(t: &Term) -> Option<Term> {
    let (h, args) = t.spine();
    let Term::Fix(b) = h else { return None };
    let Term::Abs(x, _, body) = &**b else { return None };
    let unfolded = subst(body, x, h);
    Some(beta_normalize(&Term::apps(unfolded, args.into_iter().cloned())))
}

/// Spine depth of the shallowest fix-headed spine, if any.
fn min_fix_depth(t: &Term, depth: usize) -> Option<usize> {
    let (h, args) = t.spine();
    match h {
        Term::Fix(_) => Some(depth),
        Term::Abs(_, _, b) => {
            let inner = min_fix_depth(b, depth + 1);
            args.iter()
                .filter_map(|a| min_fix_depth(a, depth + 1))
                .chain(inner)
                .min()
        }
        _ => args.iter().filter_map(|a| min_fix_depth(a, depth + 1)).min(),
    }
}

fn unfold_leftmost_at(t: &Term, target: usize, depth: usize, done: &mut bool) -> Term {
    if *done {
        return t.clone();
    }
    let (h, args) = t.spine();
    if depth == target {
        if let Term::Fix(_) = h {
            *done = true;
            let Term::Fix(b) = h else { unreachable!() };
            let Term::Abs(x, _, body) = &**b else {
                return t.clone();
            };
            return Term::apps(subst(body, x, h), args.into_iter().cloned());
        }
    }
    if depth >= target {
        return t.clone();
    }
    let h2 = match h {
        Term::Abs(x, ty, b) => Term::Abs(
            x.clone(),
            ty.clone(),
            Arc::new(unfold_leftmost_at(b, target, depth + 1, done)),
        ),
        _ => h.clone(),
    };
    let args2: Vec<Term> = args
        .into_iter()
        .map(|a| unfold_leftmost_at(a, target, depth + 1, done))
        .collect();
    Term::apps(h2, args2)
}

/// One fair fix-β step: unfolds the shallowest fix occurrence (leftmost among equally
/// shallow ones) and β-normalizes. Level-by-level selection guarantees that every
/// fix occurrence is eventually unfolded.
pub fn fixbeta_unfold(t: &Term) -> Result<Term, TermError> {
    let target = min_fix_depth(t, 0).ok_or(TermError::NoFixRedex)?;
    if let (Term::Fix(b), _) = t.spine() {
        if !matches!(**b, Term::Abs(..)) {
            return Err(TermError::FixBodyNotAbstraction);
        }
    }
    let mut done = false;
    let r = unfold_leftmost_at(t, target, 0, &mut done);
    if !done {
        return Err(TermError::FixBodyNotAbstraction);
    }
    Ok(beta_normalize(&r))
}

/// Result of the bounded `=fixβ` comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equiv {
    Equal,
    NotEqual,
    Unknown,
}

/// Bounded test for `a =fixβ b` on β-normal terms. Fix-headed sides are unfolded
/// at the head, each unfolding costing one unit of `bound`; rigid heads are then
/// compared argumentwise. Distinct rigid heads are a definite disagreement since
/// the combined rewrite system is orthogonal.
pub fn fixbeta_equiv(a: &Term, b: &Term, bound: usize) -> Equiv {
    let mut budget = bound;
    eqv(&beta_normalize(a), &beta_normalize(b), &mut budget)
}

fn eqv(a: &Term, b: &Term, budget: &mut usize) -> Equiv {
    if alpha_eq(a, b) {
        return Equiv::Equal;
    }
    if let (Term::Abs(x, tx, bx), Term::Abs(y, ty, by)) = (a, b) {
        if tx != ty {
            return Equiv::NotEqual;
        }
        let fv_a = free_vars(bx);
        let fv_b = free_vars(by);
        let z = fresh_variant(x, &|c| fv_a.contains(c) || fv_b.contains(c));
        let za = subst(bx, x, &Term::Var(z.clone()));
        let zb = subst(by, y, &Term::Var(z));
        return eqv(&za, &zb, budget);
    }
    let fa = a.is_fix_headed();
    let fb = b.is_fix_headed();
    if fa || fb {
        if *budget == 0 {
            return Equiv::Unknown;
        }
        *budget -= 1;
        let a2 = if fa { unfold_head(a) } else { Some(a.clone()) };
        let b2 = if fb { unfold_head(b) } else { Some(b.clone()) };
        return match (a2, b2) {
            (Some(a2), Some(b2)) => eqv(&a2, &b2, budget),
            _ => Equiv::Unknown,
        };
    }
    let (ha, xs) = a.spine();
    let (hb, ys) = b.spine();
    let rigid_same = match (ha, hb) {
        (Term::Const(c), Term::Const(d)) => c == d,
        (Term::Var(x), Term::Var(y)) => x == y,
        (Term::Abs(..), _) | (_, Term::Abs(..)) => return Equiv::Unknown,
        _ => false,
    };
    if !rigid_same || xs.len() != ys.len() {
        return Equiv::NotEqual;
    }
    let mut unknown = false;
    for (x, y) in xs.iter().zip(ys.iter()) {
        match eqv(x, y, budget) {
            Equiv::NotEqual => return Equiv::NotEqual,
            Equiv::Unknown => unknown = true,
            Equiv::Equal => {}
        }
    }
    if unknown {
        Equiv::Unknown
    } else {
        Equiv::Equal
    }
}

/// Which clauses of the first-order term definition a term violates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FirstOrderReport {
    pub violated: Vec<u8>,
}

impl FirstOrderReport {
    pub fn ok(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Checks the five conditions of a first-order term: order-0 type, constants of
/// order at most one, variables of order zero, no subterm of type `o`, no fix.
pub fn first_order_report(sig: &Signature, ctx: &Context, t: &Term) -> Result<FirstOrderReport, TermError> {
    let mut violated = BTreeSet::new();
    let ty = typecheck(sig, ctx, t)?;
    if ty.order() != 0 {
        violated.insert(1u8);
    }
    let mut scope = Vec::new();
    fo_walk(sig, ctx, &mut scope, t, &mut violated)?;
    Ok(FirstOrderReport {
        violated: violated.into_iter().collect(),
    })
}

fn fo_walk(
    sig: &Signature,
    ctx: &Context,
    scope: &mut Vec<(Name, Type)>,
    t: &Term,
    violated: &mut BTreeSet<u8>,
) -> Result<(), TermError> {
    let ty = infer(sig, ctx, scope, t)?;
    if ty.is_o() {
        violated.insert(4);
    }
    match t {
        Term::Const(_) => {
            if ty.order() > 1 {
                violated.insert(2);
            }
        }
        Term::Var(_) => {
            if ty.order() != 0 {
                violated.insert(3);
            }
        }
        Term::App(f, a) => {
            fo_walk(sig, ctx, scope, f, violated)?;
            fo_walk(sig, ctx, scope, a, violated)?;
        }
        Term::Abs(x, xt, b) => {
            // A bound variable is itself a subterm occurrence only where it is used.
            scope.push((x.clone(), xt.clone()));
            let r = fo_walk(sig, ctx, scope, b, violated);
            scope.pop();
            r?;
        }
        Term::Fix(b) => {
            violated.insert(5);
            fo_walk(sig, ctx, scope, b, violated)?;
        }
    }
    Ok(())
}

pub fn is_first_order(sig: &Signature, ctx: &Context, t: &Term) -> bool {
    first_order_report(sig, ctx, t).map(|r| r.ok()).unwrap_or(false)
}

/// Untyped structural first-order check: constants and variables applied only
/// under constant heads, no abstraction, no fix. Used where types are known to be
/// fine already.
pub fn is_first_order_shape(t: &Term) -> bool {
    let (h, args) = t.spine();
    match h {
        Term::Const(_) => args.iter().all(|a| is_first_order_shape(a)),
        Term::Var(_) => args.is_empty(),
        _ => false,
    }
}

/// An atom `p t1 .. tn` with `p` a first-order predicate and each `ti` a first-order term.
pub fn is_first_order_atom(sig: &Signature, ctx: &Context, a: &Term) -> bool {
    let (h, args) = a.spine();
    match h {
        Term::Const(p) if sig.is_first_order_predicate(p) => {
            args.iter().all(|t| is_first_order(sig, ctx, t))
        }
        _ => false,
    }
}

/// Membership in the term class excluding `imp` and `forall_i` (`U1`).
pub fn in_u1(t: &Term) -> bool {
    !t.mentions_const("imp") && !t.mentions_const("forall_i")
}

/// Membership in the term class excluding `imp` (`U2`).
pub fn in_u2(t: &Term) -> bool {
    !t.mentions_const("imp")
}

/// Variables of `t` that are bound anywhere inside it.
pub fn bound_names(t: &Term, out: &mut HashSet<Name>) {
    match t {
        Term::Abs(x, _, b) => {
            out.insert(x.clone());
            bound_names(b, out);
        }
        Term::App(f, a) => {
            bound_names(f, out);
            bound_names(a, out);
        }
        Term::Fix(b) => bound_names(b, out),
        _ => {}
    }
}
