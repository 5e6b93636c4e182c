//! Recursive-descent parser with binder type inference.
//!
//! Concrete syntax:
//!
//! ```text
//! const 0 1 : i.                       declarations
//! const scons : i -> i -> i.
//! def z_str = fix \x. scons 0 x.       named fix definitions, expanded inline
//! forall x y. bit x /\ bitstream y => bitstream [x|y].
//! member X [X|_].                      Prolog sugar: uppercase names are universal
//! member X [_|T] :- member X T.
//! ```
//!
//! Connectives bind in the order `/\`, `\/`, `=>` (tightest first); `=>` associates
//! to the right and quantifier bodies extend as far right as possible. `[a|b|t]`
//! abbreviates `scons a (scons b t)`. Lines starting with `%` are comments and
//! `%!` lines are attached to the program as notes.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::lexer::{lex, Span, Tok, Token};
use crate::formula::{classify, typecheck_formula, Formula, Role};
use crate::guard::check_guarded_fixed_point;
use crate::program::{Clause, FixDef, Program};
use crate::term::{
    beta_normalize, name, typecheck, Context, Name, Signature, Term, Type, RESERVED_PREFIX,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Type,
    Unbound,
    Guardedness,
    NonFirstOrderSignature,
    NotAClause,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::Type => "type error",
            ParseErrorKind::Unbound => "unbound identifier",
            ParseErrorKind::Guardedness => "guardedness violation",
            ParseErrorKind::NonFirstOrderSignature => "non-first-order signature",
            ParseErrorKind::NotAClause => "not a program clause",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{span}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
    pub message: String,
}

fn err<T>(kind: ParseErrorKind, span: Span, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        kind,
        span,
        message: message.into(),
    })
}

// Raw syntax, before name resolution and typing.
#[derive(Clone, Debug)]
pub(crate) enum RT {
    Id(String, Span),
    App(Box<RT>, Box<RT>),
    Lam(String, Option<Type>, Box<RT>, Span),
    Fix(Box<RT>, Span),
    Cons(Box<RT>, Box<RT>, Span),
    Nil(Span),
    Star(Span),
}

impl RT {
    fn span(&self) -> Span {
        match self {
            RT::Id(_, s) | RT::Lam(_, _, _, s) | RT::Fix(_, s) | RT::Cons(_, _, s) | RT::Nil(s) | RT::Star(s) => *s,
            RT::App(f, _) => f.span(),
        }
    }

    fn spine(&self) -> (&RT, Vec<&RT>) {
        let mut args = Vec::new();
        let mut t = self;
        while let RT::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }
}

#[derive(Clone, Debug)]
enum RF {
    Top,
    Atom(RT),
    And(Box<RF>, Box<RF>),
    Or(Box<RF>, Box<RF>),
    Imp(Box<RF>, Box<RF>),
    Forall(String, Option<Type>, Box<RF>),
    Exists(String, Option<Type>, Box<RF>),
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    pub(crate) pragmas: Vec<String>,
    /// Inside a `:-` body a comma is a conjunction.
    comma_and: bool,
    /// Tree listings allow `*`.
    allow_star: bool,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Parser, ParseError> {
        let lexed = lex(src).map_err(|(span, message)| ParseError {
            kind: ParseErrorKind::Syntax,
            span,
            message,
        })?;
        Ok(Parser {
            toks: lexed.tokens,
            pos: 0,
            pragmas: lexed.pragmas,
            comma_and: false,
            allow_star: false,
        })
    }

    pub(crate) fn with_stars(mut self) -> Parser {
        self.allow_star = true;
        self
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<Span, ParseError> {
        if self.peek() == t {
            Ok(self.bump().span)
        } else {
            err(
                ParseErrorKind::Syntax,
                self.span(),
                format!("expected {t}, found {}", self.peek()),
            )
        }
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            other => err(
                ParseErrorKind::Syntax,
                self.span(),
                format!("expected an identifier, found {other}"),
            ),
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn expect_eof(&mut self) -> Result<(), ParseError> {
        self.expect(&Tok::Eof).map(|_| ())
    }

    pub(crate) fn parse_type(&mut self) -> Result<Type, ParseError> {
        let a = self.atype()?;
        if self.eat(&Tok::Arrow) {
            Ok(Type::arrow(a, self.parse_type()?))
        } else {
            Ok(a)
        }
    }

    fn atype(&mut self) -> Result<Type, ParseError> {
        if self.eat(&Tok::LParen) {
            let t = self.parse_type()?;
            self.expect(&Tok::RParen)?;
            return Ok(t);
        }
        let (s, sp) = self.ident()?;
        match s.as_str() {
            "i" | "ι" => Ok(Type::iota()),
            "o" => Ok(Type::o()),
            _ => err(ParseErrorKind::Syntax, sp, format!("unknown base type `{s}`")),
        }
    }

    /// Binder groups up to (and including) the closing `.`.
    fn binders(&mut self) -> Result<Vec<(String, Option<Type>)>, ParseError> {
        let mut out = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(_) => {
                    let (x, _) = self.ident()?;
                    if self.eat(&Tok::Colon) {
                        let ty = self.parse_type()?;
                        out.push((x, Some(ty)));
                        self.expect(&Tok::Dot)?;
                        return Ok(out);
                    }
                    out.push((x, None));
                }
                Tok::LParen => {
                    self.bump();
                    let mut names = Vec::new();
                    while let Tok::Ident(_) = self.peek() {
                        names.push(self.ident()?.0);
                    }
                    if names.is_empty() {
                        return err(ParseErrorKind::Syntax, self.span(), "empty binder group");
                    }
                    self.expect(&Tok::Colon)?;
                    let ty = self.parse_type()?;
                    self.expect(&Tok::RParen)?;
                    out.extend(names.into_iter().map(|n| (n, Some(ty.clone()))));
                }
                Tok::Dot => {
                    if out.is_empty() {
                        return err(ParseErrorKind::Syntax, self.span(), "binder expected");
                    }
                    self.bump();
                    return Ok(out);
                }
                other => {
                    return err(
                        ParseErrorKind::Syntax,
                        self.span(),
                        format!("expected a binder or `.`, found {other}"),
                    )
                }
            }
        }
    }

    fn starts_arg(&self) -> bool {
        match self.peek() {
            Tok::Ident(_) | Tok::LParen | Tok::LBrack | Tok::Lambda => true,
            Tok::Star => self.allow_star,
            _ => false,
        }
    }

    pub(crate) fn parse_term(&mut self) -> Result<RT, ParseError> {
        if *self.peek() == Tok::Lambda {
            return self.lambda();
        }
        let mut t = self.arg()?;
        while self.starts_arg() {
            if *self.peek() == Tok::Lambda {
                let l = self.lambda()?;
                return Ok(RT::App(Box::new(t), Box::new(l)));
            }
            let a = self.arg()?;
            t = RT::App(Box::new(t), Box::new(a));
        }
        Ok(t)
    }

    fn lambda(&mut self) -> Result<RT, ParseError> {
        let sp = self.expect(&Tok::Lambda)?;
        let bs = self.binders()?;
        let body = self.parse_term()?;
        Ok(bs
            .into_iter()
            .rev()
            .fold(body, |acc, (x, ty)| RT::Lam(x, ty, Box::new(acc), sp)))
    }

    fn arg(&mut self) -> Result<RT, ParseError> {
        let sp = self.span();
        match self.peek().clone() {
            Tok::Ident(s) if s == "fix" => {
                self.bump();
                let body = if *self.peek() == Tok::Lambda {
                    self.lambda()?
                } else {
                    self.arg()?
                };
                Ok(RT::Fix(Box::new(body), sp))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(RT::Id(s, sp))
            }
            Tok::Star if self.allow_star => {
                self.bump();
                Ok(RT::Star(sp))
            }
            Tok::LParen => {
                self.bump();
                let t = self.parse_term()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::LBrack => {
                self.bump();
                if self.eat(&Tok::RBrack) {
                    return Ok(RT::Nil(sp));
                }
                let mut items = vec![self.parse_term()?];
                let mut last_bar = false;
                loop {
                    if self.eat(&Tok::Bar) {
                        last_bar = true;
                    } else if self.eat(&Tok::Comma) {
                        last_bar = false;
                    } else {
                        break;
                    }
                    items.push(self.parse_term()?);
                }
                self.expect(&Tok::RBrack)?;
                let tail = if last_bar {
                    items.pop().expect("nonempty")
                } else {
                    RT::Nil(sp)
                };
                Ok(items
                    .into_iter()
                    .rev()
                    .fold(tail, |acc, h| RT::Cons(Box::new(h), Box::new(acc), sp)))
            }
            other => err(
                ParseErrorKind::Syntax,
                sp,
                format!("expected a term, found {other}"),
            ),
        }
    }

    fn parse_formula(&mut self) -> Result<RF, ParseError> {
        if matches!(self.peek(), Tok::Forall | Tok::Exists) {
            return self.quant();
        }
        self.imp()
    }

    fn quant(&mut self) -> Result<RF, ParseError> {
        let is_forall = *self.peek() == Tok::Forall;
        self.bump();
        let bs = self.binders()?;
        let body = self.parse_formula()?;
        Ok(bs.into_iter().rev().fold(body, |acc, (x, ty)| {
            if is_forall {
                RF::Forall(x, ty, Box::new(acc))
            } else {
                RF::Exists(x, ty, Box::new(acc))
            }
        }))
    }

    fn operand(&mut self, next: fn(&mut Parser) -> Result<RF, ParseError>) -> Result<RF, ParseError> {
        if matches!(self.peek(), Tok::Forall | Tok::Exists) {
            self.quant()
        } else {
            next(self)
        }
    }

    fn imp(&mut self) -> Result<RF, ParseError> {
        let a = self.disj()?;
        if self.eat(&Tok::Imp) {
            let b = self.operand(Parser::imp)?;
            return Ok(RF::Imp(Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn disj(&mut self) -> Result<RF, ParseError> {
        let a = self.conj()?;
        if self.eat(&Tok::Or) {
            let b = self.operand(Parser::disj)?;
            return Ok(RF::Or(Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn conj(&mut self) -> Result<RF, ParseError> {
        let a = self.unary()?;
        if self.eat(&Tok::And) || (self.comma_and && self.eat(&Tok::Comma)) {
            let b = self.operand(Parser::conj)?;
            return Ok(RF::And(Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<RF, ParseError> {
        match self.peek() {
            Tok::Top => {
                self.bump();
                Ok(RF::Top)
            }
            Tok::Forall | Tok::Exists => self.quant(),
            Tok::LParen => {
                // Either a parenthesised formula or the head of an atom.
                self.bump();
                let inner = self.parse_formula()?;
                self.expect(&Tok::RParen)?;
                match inner {
                    RF::Atom(mut t) if self.starts_arg() => {
                        while self.starts_arg() {
                            let a = if *self.peek() == Tok::Lambda {
                                self.lambda()?
                            } else {
                                self.arg()?
                            };
                            t = RT::App(Box::new(t), Box::new(a));
                        }
                        Ok(RF::Atom(t))
                    }
                    f => Ok(f),
                }
            }
            _ => Ok(RF::Atom(self.parse_term()?)),
        }
    }
}

/// Name resolution and type inference.
struct Elab<'a> {
    sig: &'a Signature,
    defs: &'a [FixDef],
    metas: Vec<Option<Type>>,
    /// Implicitly quantified variables (Prolog sugar), in order of appearance.
    implicit: Option<Vec<(String, Type)>>,
    wildcards: usize,
}

fn meta_index(t: &Type) -> Option<usize> {
    match t {
        Type::Base(b) => b.strip_prefix('?').and_then(|k| k.parse().ok()),
        _ => None,
    }
}

impl<'a> Elab<'a> {
    fn new(sig: &'a Signature, defs: &'a [FixDef]) -> Elab<'a> {
        Elab {
            sig,
            defs,
            metas: Vec::new(),
            implicit: None,
            wildcards: 0,
        }
    }

    fn meta(&mut self) -> Type {
        self.metas.push(None);
        Type::Base(name(&format!("?{}", self.metas.len() - 1)))
    }

    fn resolve(&self, t: &Type) -> Type {
        match t {
            Type::Base(_) => match meta_index(t).and_then(|k| self.metas[k].as_ref()) {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            Type::Arrow(a, b) => Type::arrow(self.resolve(a), self.resolve(b)),
        }
    }

    /// Resolved type with unsolved metavariables defaulted to `ι`.
    fn zonk(&self, t: &Type) -> Type {
        match self.resolve(t) {
            Type::Base(b) if b.starts_with('?') => Type::iota(),
            Type::Arrow(a, b) => Type::arrow(self.zonk(&a), self.zonk(&b)),
            t => t,
        }
    }

    fn occurs(&self, k: usize, t: &Type) -> bool {
        match self.resolve(t) {
            Type::Base(_) => meta_index(&self.resolve(t)) == Some(k),
            Type::Arrow(a, b) => self.occurs(k, &a) || self.occurs(k, &b),
        }
    }

    fn unify(&mut self, a: &Type, b: &Type, span: Span) -> Result<(), ParseError> {
        let a = self.resolve(a);
        let b = self.resolve(b);
        if a == b {
            return Ok(());
        }
        if let Some(k) = meta_index(&a) {
            if self.occurs(k, &b) {
                return err(ParseErrorKind::Type, span, "cyclic type");
            }
            self.metas[k] = Some(b);
            return Ok(());
        }
        if meta_index(&b).is_some() {
            return self.unify(&b, &a, span);
        }
        match (&a, &b) {
            (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => {
                self.unify(a1, b1, span)?;
                self.unify(a2, b2, span)
            }
            _ => err(
                ParseErrorKind::Type,
                span,
                format!("cannot match {} with {}", self.zonk(&a), self.zonk(&b)),
            ),
        }
    }

    fn term(&mut self, rt: &RT, scope: &mut Vec<(Name, Type)>) -> Result<(Term, Type), ParseError> {
        match rt {
            RT::Id(s, sp) => {
                if s == "_" {
                    if let Some(imp) = self.implicit.as_mut() {
                        self.wildcards += 1;
                        let v = format!("{RESERVED_PREFIX}W{}", self.wildcards);
                        self.metas.push(None);
                        let ty = Type::Base(name(&format!("?{}", self.metas.len() - 1)));
                        imp.push((v.clone(), ty.clone()));
                        return Ok((Term::var(&v), ty));
                    }
                    return err(ParseErrorKind::Syntax, *sp, "`_` is only allowed in clause sugar");
                }
                if let Some((x, ty)) = scope.iter().rev().find(|(x, _)| &**x == s) {
                    return Ok((Term::Var(x.clone()), ty.clone()));
                }
                if let Some((_, ty)) = self
                    .implicit
                    .as_ref()
                    .and_then(|imp| imp.iter().find(|(x, _)| x == s))
                {
                    return Ok((Term::var(s), ty.clone()));
                }
                if let Some(ty) = self.sig.get(s) {
                    if crate::term::is_logical(s) {
                        return err(ParseErrorKind::Syntax, *sp, format!("`{s}` is a logical constant"));
                    }
                    return Ok((Term::cnst(s), ty.clone()));
                }
                if let Some(d) = self.defs.iter().find(|d| &*d.name == s) {
                    return Ok((d.term.clone(), d.ty.clone()));
                }
                if self.implicit.is_some() && s.starts_with(|c: char| c.is_uppercase()) {
                    let ty = self.meta();
                    self.implicit.as_mut().unwrap().push((s.clone(), ty.clone()));
                    return Ok((Term::var(s), ty));
                }
                err(ParseErrorKind::Unbound, *sp, format!("`{s}` is not declared"))
            }
            RT::App(f, a) => {
                let (tf, ff) = self.term(f, scope)?;
                let (ta, aa) = self.term(a, scope)?;
                let r = self.meta();
                self.unify(&ff, &Type::arrow(aa, r.clone()), a.span())?;
                Ok((Term::app(tf, ta), r))
            }
            RT::Lam(x, ann, body, _) => {
                let ty = match ann {
                    Some(t) => t.clone(),
                    None => self.meta(),
                };
                scope.push((name(x), ty.clone()));
                let r = self.term(body, scope);
                scope.pop();
                let (tb, bt) = r?;
                Ok((Term::Abs(name(x), ty.clone(), Arc::new(tb)), Type::arrow(ty, bt)))
            }
            RT::Fix(body, sp) => {
                if !matches!(**body, RT::Lam(..)) {
                    return err(ParseErrorKind::Type, *sp, "fix body must be an abstraction");
                }
                let (tb, bt) = self.term(body, scope)?;
                let r = self.meta();
                self.unify(&bt, &Type::arrow(r.clone(), r.clone()), *sp)?;
                Ok((Term::fix(tb), r))
            }
            RT::Cons(h, t, sp) => {
                if self.sig.get("scons") != Some(&Type::curried([Type::iota(), Type::iota()], Type::iota())) {
                    return err(ParseErrorKind::Unbound, *sp, "list syntax needs `const scons : i -> i -> i`");
                }
                let (th, hty) = self.term(h, scope)?;
                self.unify(&hty, &Type::iota(), h.span())?;
                let (tt, tty) = self.term(t, scope)?;
                self.unify(&tty, &Type::iota(), t.span())?;
                Ok((Term::apps(Term::cnst("scons"), [th, tt]), Type::iota()))
            }
            RT::Nil(sp) => {
                if self.sig.get("nil").map(|t| t.is_iota()) != Some(true) {
                    return err(ParseErrorKind::Unbound, *sp, "list syntax needs `const nil : i`");
                }
                Ok((Term::cnst("nil"), Type::iota()))
            }
            RT::Star(sp) => err(ParseErrorKind::Syntax, *sp, "`*` only appears in interpretation listings"),
        }
    }

    fn formula(&mut self, rf: &RF, scope: &mut Vec<(Name, Type)>, span: Span) -> Result<Formula, ParseError> {
        Ok(match rf {
            RF::Top => Formula::Top,
            RF::Atom(rt) => {
                let (t, ty) = self.term(rt, scope)?;
                self.unify(&ty, &Type::o(), rt.span())?;
                Formula::Atom(t)
            }
            RF::And(a, b) => Formula::and(self.formula(a, scope, span)?, self.formula(b, scope, span)?),
            RF::Or(a, b) => Formula::or(self.formula(a, scope, span)?, self.formula(b, scope, span)?),
            RF::Imp(a, b) => Formula::imp(self.formula(a, scope, span)?, self.formula(b, scope, span)?),
            RF::Forall(x, ann, b) | RF::Exists(x, ann, b) => {
                let ty = match ann {
                    Some(t) => t.clone(),
                    None => self.meta(),
                };
                scope.push((name(x), ty.clone()));
                let body = self.formula(b, scope, span);
                scope.pop();
                let body = Arc::new(body?);
                if matches!(rf, RF::Forall(..)) {
                    Formula::Forall(name(x), ty, body)
                } else {
                    Formula::Exists(name(x), ty, body)
                }
            }
        })
    }

    fn zonk_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(_) | Term::Const(_) => t.clone(),
            Term::App(f, a) => Term::app(self.zonk_term(f), self.zonk_term(a)),
            Term::Abs(x, ty, b) => Term::Abs(x.clone(), self.zonk(ty), Arc::new(self.zonk_term(b))),
            Term::Fix(b) => Term::fix(self.zonk_term(b)),
        }
    }

    fn zonk_formula(&self, f: &Formula) -> Formula {
        match f {
            Formula::Top => Formula::Top,
            Formula::Atom(t) => Formula::Atom(beta_normalize(&self.zonk_term(t))),
            Formula::And(a, b) => Formula::and(self.zonk_formula(a), self.zonk_formula(b)),
            Formula::Or(a, b) => Formula::or(self.zonk_formula(a), self.zonk_formula(b)),
            Formula::Imp(a, b) => Formula::imp(self.zonk_formula(a), self.zonk_formula(b)),
            Formula::Forall(x, ty, b) => Formula::Forall(x.clone(), self.zonk(ty), Arc::new(self.zonk_formula(b))),
            Formula::Exists(x, ty, b) => Formula::Exists(x.clone(), self.zonk(ty), Arc::new(self.zonk_formula(b))),
        }
    }
}

fn check_fixes(sig: &Signature, t: &Term, span: Span) -> Result<(), ParseError> {
    for s in crate::term::subterms(t) {
        if let Term::Fix(_) = s {
            let rep = check_guarded_fixed_point(sig, &s);
            if let Some(v) = rep.violations.first() {
                return err(ParseErrorKind::Guardedness, span, v.detail.clone());
            }
        }
    }
    Ok(())
}

fn check_formula_fixes(sig: &Signature, f: &Formula, span: Span) -> Result<(), ParseError> {
    for a in f.atoms() {
        check_fixes(sig, a, span)?;
    }
    Ok(())
}

fn is_sugar_atom(rf: &RF) -> bool {
    matches!(rf, RF::Atom(_))
}

fn elaborate_formula(
    sig: &Signature,
    defs: &[FixDef],
    rf: &RF,
    span: Span,
    sugar: bool,
) -> Result<Formula, ParseError> {
    let mut el = Elab::new(sig, defs);
    if sugar {
        el.implicit = Some(Vec::new());
    }
    let f = el.formula(rf, &mut Vec::new(), span)?;
    let mut f = el.zonk_formula(&f);
    if let Some(imp) = el.implicit.take() {
        for (x, ty) in imp.into_iter().rev() {
            f = Formula::Forall(name(&x), el.zonk(&ty), Arc::new(f));
        }
    }
    typecheck_formula(sig, &Context::new(), &f).map_err(|e| ParseError {
        kind: ParseErrorKind::Type,
        span,
        message: e.to_string(),
    })?;
    check_formula_fixes(sig, &f, span)?;
    Ok(f)
}

fn reserved(s: &str) -> bool {
    s.starts_with(RESERVED_PREFIX) || crate::term::is_logical(s) || s == "fix"
}

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let mut prog = Program::new(Signature::new());
    prog.notes = std::mem::take(&mut p.pragmas);
    while !p.at_eof() {
        let start = p.span();
        match p.peek().clone() {
            Tok::Ident(kw) if kw == "const" && matches!(p.peek_at(1), Tok::Ident(_)) => {
                p.bump();
                let mut names = Vec::new();
                while let Tok::Ident(_) = p.peek() {
                    names.push(p.ident()?);
                }
                p.expect(&Tok::Colon)?;
                let ty = p.parse_type()?;
                p.expect(&Tok::Dot)?;
                for (n, sp) in names {
                    if reserved(&n) {
                        return err(ParseErrorKind::Syntax, sp, format!("`{n}` is a reserved name"));
                    }
                    if prog.signature.contains(&n) || prog.def(&n).is_some() {
                        return err(ParseErrorKind::Syntax, sp, format!("`{n}` is declared twice"));
                    }
                    prog.signature.declare(&n, ty.clone());
                    if let Some(bad) = prog.signature.first_order_violations().first() {
                        return err(
                            ParseErrorKind::NonFirstOrderSignature,
                            sp,
                            format!("`{bad}` : {ty} is not a first-order declaration"),
                        );
                    }
                }
            }
            Tok::Ident(kw) if kw == "def" && matches!(p.peek_at(1), Tok::Ident(_)) => {
                p.bump();
                let (n, sp) = p.ident()?;
                if reserved(&n) || prog.signature.contains(&n) || prog.def(&n).is_some() {
                    return err(ParseErrorKind::Syntax, sp, format!("`{n}` cannot be defined here"));
                }
                p.expect(&Tok::Equals)?;
                let rt = p.parse_term()?;
                p.expect(&Tok::Dot)?;
                let mut el = Elab::new(&prog.signature, &prog.defs);
                let (t, ty) = el.term(&rt, &mut Vec::new())?;
                let t = el.zonk_term(&t);
                let ty = el.zonk(&ty);
                let checked = typecheck(&prog.signature, &Context::new(), &t).map_err(|e| ParseError {
                    kind: ParseErrorKind::Type,
                    span: sp,
                    message: e.to_string(),
                })?;
                debug_assert_eq!(checked, ty);
                check_fixes(&prog.signature, &t, sp)?;
                prog.defs.push(FixDef {
                    name: name(&n),
                    term: t,
                    ty,
                });
            }
            _ => {
                let head = p.parse_formula()?;
                let f = if p.eat(&Tok::Neck) {
                    if !is_sugar_atom(&head) {
                        return err(ParseErrorKind::Syntax, start, "the head of `:-` must be an atom");
                    }
                    p.comma_and = true;
                    let body = p.parse_formula();
                    p.comma_and = false;
                    let rf = RF::Imp(Box::new(body?), Box::new(head));
                    elaborate_formula(&prog.signature, &prog.defs, &rf, start, true)?
                } else {
                    elaborate_formula(&prog.signature, &prog.defs, &head, start, is_sugar_atom(&head))?
                };
                p.expect(&Tok::Dot)?;
                if classify(&prog.signature, &f, Role::Clause)
                    .map(|s| s.is_empty())
                    .unwrap_or(true)
                {
                    return err(
                        ParseErrorKind::NotAClause,
                        start,
                        "formula is not a program clause of any calculus",
                    );
                }
                prog.clauses.push(Clause {
                    formula: f,
                    line: Some(start.line),
                });
            }
        }
    }
    Ok(prog)
}

/// Parses a formula against a program's signature and definitions. All binding
/// is explicit.
pub fn parse_formula(src: &str, program: &Program) -> Result<Formula, ParseError> {
    parse_formula_with(src, program, &[])
}

/// As [`parse_formula`], with extra constants (typically eigenvariables) in scope.
pub fn parse_formula_with(src: &str, program: &Program, extra: &[(Name, Type)]) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let start = p.span();
    let rf = p.parse_formula()?;
    p.eat(&Tok::Dot);
    p.expect_eof()?;
    let sig = if extra.is_empty() {
        program.signature.clone()
    } else {
        program.with_constants(extra).signature
    };
    elaborate_formula(&sig, &program.defs, &rf, start, false)
}

pub fn parse_goal(src: &str, program: &Program) -> Result<Formula, ParseError> {
    parse_formula(src, program)
}

/// Parses a closed term, optionally checking it against an expected type.
pub fn parse_term(src: &str, program: &Program, extra: &[(Name, Type)], expected: Option<&Type>) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let start = p.span();
    let rt = p.parse_term()?;
    p.expect_eof()?;
    let sig = program.with_constants(extra).signature;
    let mut el = Elab::new(&sig, &program.defs);
    let (t, ty) = el.term(&rt, &mut Vec::new())?;
    if let Some(e) = expected {
        el.unify(&ty, e, start)?;
    }
    let t = beta_normalize(&el.zonk_term(&t));
    typecheck(&sig, &Context::new(), &t).map_err(|e| ParseError {
        kind: ParseErrorKind::Type,
        span: start,
        message: e.to_string(),
    })?;
    check_fixes(&sig, &t, start)?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.parse_type()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses a `name : type` signature entry.
pub fn parse_declaration(src: &str) -> Result<(Name, Type), ParseError> {
    let mut p = Parser::new(src)?;
    let (n, _) = p.ident()?;
    p.expect(&Tok::Colon)?;
    let t = p.parse_type()?;
    p.expect_eof()?;
    Ok((name(&n), t))
}

/// Raw term syntax of an interpretation listing line (with `*` allowed).
pub(crate) fn parse_raw_tree(src: &str) -> Result<RT, ParseError> {
    let mut p = Parser::new(src)?.with_stars();
    let t = p.parse_term()?;
    p.eat(&Tok::Dot);
    p.expect_eof()?;
    Ok(t)
}

/// Decomposes raw syntax into constructor applications, for tree listings.
pub(crate) fn raw_tree_view(rt: &RT) -> Result<RawNode, ParseError> {
    match rt {
        RT::Star(_) => Ok(RawNode::Star),
        RT::Nil(_) => Ok(RawNode::Node("nil".into(), Vec::new())),
        RT::Cons(h, t, _) => Ok(RawNode::Node(
            "scons".into(),
            vec![raw_tree_view(h)?, raw_tree_view(t)?],
        )),
        RT::Id(..) | RT::App(..) => {
            let (h, args) = rt.spine();
            let RT::Id(f, _) = h else {
                return err(ParseErrorKind::Syntax, rt.span(), "expected a constructor application");
            };
            Ok(RawNode::Node(
                f.clone(),
                args.into_iter().map(raw_tree_view).collect::<Result<_, _>>()?,
            ))
        }
        RT::Lam(_, _, _, sp) | RT::Fix(_, sp) => err(ParseErrorKind::Syntax, *sp, "trees contain no binders"),
    }
}

pub(crate) enum RawNode {
    Star,
    Node(String, Vec<RawNode>),
}

/// Signature of declared constants, for diagnostics.
pub fn declared_constants(program: &Program) -> BTreeMap<Name, Type> {
    program
        .signature
        .declarations()
        .map(|(c, t)| (c.clone(), t.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::alpha_eq_formula;

    const STREAMS: &str = "
        const 0 1 : i.
        const s : i -> i.
        const scons : i -> i -> i.
        const bit : i -> o.
        const bitstream : i -> o.
        def n_str = fix \\f.\\n. scons n (f n).
        bitstream [X|Y] :- bit X, bitstream Y.
        bit 0.
        bit 1.
    ";

    #[test]
    fn parses_sugar_and_definitions() {
        let p = parse_program(STREAMS).unwrap();
        assert_eq!(p.clauses.len(), 3);
        assert_eq!(p.defs[0].ty, Type::arrow(Type::iota(), Type::iota()));
        let explicit = parse_formula("forall X Y. bit X /\\ bitstream Y => bitstream [X|Y]", &p).unwrap();
        assert!(alpha_eq_formula(&p.clauses[0].formula, &explicit));
        let g = parse_goal("bitstream [0|n_str 0]", &p).unwrap();
        assert!(g.as_atom().unwrap().contains_fix());
    }

    #[test]
    fn reports_errors_with_kinds() {
        let e = parse_program("const p : i -> o.\np q.").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbound);
        assert_eq!(e.span.line, 2);
        let e = parse_program("const p : (i -> o) -> o.").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonFirstOrderSignature);
        let e = parse_program("const s : i -> i.\nconst p : i -> o.\np (fix \\x. x).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Guardedness);
        let e = parse_program("const p : i -> o.\np (p).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Type);
        let e = parse_program("const p : o.\np \\/ p.").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NotAClause);
        let e = parse_program("const p : o\np.").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn precedence_and_scope() {
        let p = parse_program("const a b c : o.\nconst q : i -> o.").unwrap();
        let f = parse_formula("a /\\ b \\/ c => a", &p).unwrap();
        let expect = Formula::imp(
            Formula::or(
                Formula::and(Formula::atom(Term::cnst("a")), Formula::atom(Term::cnst("b"))),
                Formula::atom(Term::cnst("c")),
            ),
            Formula::atom(Term::cnst("a")),
        );
        assert_eq!(f, expect);
        let f = parse_formula("forall x. q x => exists y. q y", &p).unwrap();
        assert!(matches!(f, Formula::Forall(..)));
    }

    #[test]
    fn infers_binder_types() {
        let p = parse_program("const 0 : i.\nconst s : i -> i.\nconst q : i -> o.").unwrap();
        let f = parse_formula("forall f. q (f 0)", &p).unwrap();
        let Formula::Forall(_, ty, _) = f else { panic!() };
        assert_eq!(ty, Type::arrow(Type::iota(), Type::iota()));
    }

    #[test]
    fn pragmas_become_notes() {
        let p = parse_program("%! limitation: needs induction\nconst p : o.").unwrap();
        assert_eq!(p.limitation_note().as_deref(), Some("needs induction"));
    }
}
