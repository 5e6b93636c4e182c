//! Printing in the concrete syntax accepted by the parser.
//!
//! Fix terms that are α-equal to a named definition print as that name, and
//! `scons` chains print with list brackets, so printed formulas re-parse to
//! α-equal ones.

use std::fmt::Write;

use crate::formula::Formula;
use crate::program::Program;
use crate::term::{Term, Type};

pub struct Printer<'a> {
    program: Option<&'a Program>,
}

impl<'a> Printer<'a> {
    pub fn new(program: &'a Program) -> Printer<'a> {
        Printer {
            program: Some(program),
        }
    }

    pub fn bare() -> Printer<'static> {
        Printer { program: None }
    }

    pub fn term(&self, t: &Term) -> String {
        let mut s = String::new();
        self.term_into(t, &mut s);
        s
    }

    fn def_name(&self, t: &Term) -> Option<String> {
        self.program
            .and_then(|p| p.def_name_of(t))
            .map(|n| n.to_string())
    }

    fn term_into(&self, t: &Term, out: &mut String) {
        if let Some(n) = self.def_name(t) {
            out.push_str(&n);
            return;
        }
        match t {
            Term::Var(x) | Term::Const(x) => out.push_str(x),
            Term::Abs(..) => {
                let mut cur = t;
                out.push('\\');
                let mut first = true;
                while let Term::Abs(x, ty, b) = cur {
                    if !first {
                        out.push(' ');
                    }
                    first = false;
                    if ty.is_iota() {
                        out.push_str(x);
                    } else {
                        let _ = write!(out, "({x} : {ty})");
                    }
                    cur = b;
                    if self.def_name(cur).is_some() {
                        break;
                    }
                }
                out.push_str(". ");
                self.term_into(cur, out);
            }
            Term::Fix(b) => {
                out.push_str("fix ");
                self.arg_into(b, out);
            }
            Term::App(..) => {
                if let Some((items, tail)) = list_view(t) {
                    out.push('[');
                    for (k, it) in items.iter().enumerate() {
                        if k > 0 {
                            out.push('|');
                        }
                        self.term_into(it, out);
                    }
                    out.push('|');
                    self.term_into(tail, out);
                    out.push(']');
                    return;
                }
                let (h, args) = t.spine();
                self.arg_into(h, out);
                for a in args {
                    out.push(' ');
                    self.arg_into(a, out);
                }
            }
        }
    }

    fn arg_into(&self, t: &Term, out: &mut String) {
        let atomic = match t {
            Term::Var(_) | Term::Const(_) => true,
            Term::App(..) => list_view(t).is_some() || self.def_name(t).is_some(),
            _ => self.def_name(t).is_some(),
        };
        if atomic {
            self.term_into(t, out);
        } else {
            out.push('(');
            self.term_into(t, out);
            out.push(')');
        }
    }

    pub fn formula(&self, f: &Formula) -> String {
        let mut s = String::new();
        self.formula_into(f, 0, &mut s);
        s
    }

    // Levels: 0 quantifier/any, 1 implication, 2 disjunction, 3 conjunction, 4 atom.
    fn formula_into(&self, f: &Formula, level: u8, out: &mut String) {
        let (mine, paren) = match f {
            Formula::Top | Formula::Atom(_) => (4, false),
            Formula::And(..) => (3, level > 3),
            Formula::Or(..) => (2, level > 2),
            Formula::Imp(..) => (1, level > 1),
            Formula::Forall(..) | Formula::Exists(..) => (0, level > 0),
        };
        if paren {
            out.push('(');
        }
        match f {
            Formula::Top => out.push_str("true"),
            Formula::Atom(t) => self.term_into(t, out),
            Formula::And(a, b) => {
                self.formula_into(a, 4, out);
                out.push_str(" /\\ ");
                self.formula_into(b, 3, out);
            }
            Formula::Or(a, b) => {
                self.formula_into(a, 3, out);
                out.push_str(" \\/ ");
                self.formula_into(b, 2, out);
            }
            Formula::Imp(a, b) => {
                self.formula_into(a, 2, out);
                out.push_str(" => ");
                self.formula_into(b, 1, out);
            }
            Formula::Forall(..) | Formula::Exists(..) => {
                let is_forall = matches!(f, Formula::Forall(..));
                out.push_str(if is_forall { "forall" } else { "exists" });
                let mut cur = f;
                loop {
                    match (cur, is_forall) {
                        (Formula::Forall(x, ty, b), true) | (Formula::Exists(x, ty, b), false) => {
                            out.push(' ');
                            binder(out, x, ty);
                            cur = b;
                        }
                        _ => break,
                    }
                }
                out.push_str(". ");
                self.formula_into(cur, 0, out);
            }
        }
        if paren {
            out.push(')');
        }
        let _ = mine;
    }

    pub fn program(&self, p: &Program) -> String {
        let mut out = String::new();
        for (c, t) in p.signature.declarations() {
            let _ = writeln!(out, "const {c} : {t}.");
        }
        for d in &p.defs {
            let inner = Printer::bare();
            let _ = writeln!(out, "def {} = {}.", d.name, inner.term(&d.term));
        }
        for c in &p.clauses {
            let _ = writeln!(out, "{}.", self.formula(&c.formula));
        }
        out
    }
}

fn binder(out: &mut String, x: &str, ty: &Type) {
    if ty.is_iota() {
        out.push_str(x);
    } else {
        let _ = write!(out, "({x} : {ty})");
    }
}

/// `scons a1 (scons a2 .. t)` as `([a1, a2, ..], t)`.
fn list_view(t: &Term) -> Option<(Vec<&Term>, &Term)> {
    let mut items = Vec::new();
    let mut cur = t;
    loop {
        let (h, args) = cur.spine();
        match h {
            Term::Const(c) if &**c == "scons" && args.len() == 2 => {
                items.push(args[0]);
                cur = args[1];
            }
            _ => break,
        }
    }
    if items.is_empty() {
        None
    } else {
        Some((items, cur))
    }
}

pub fn pretty_term(t: &Term, program: &Program) -> String {
    Printer::new(program).term(t)
}

pub fn pretty_formula(f: &Formula, program: &Program) -> String {
    Printer::new(program).formula(f)
}

pub fn pretty_program(p: &Program) -> String {
    Printer::new(p).program(p)
}

/// Concrete syntax without definition names, for diagnostics.
impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&Printer::bare().term(self))
    }
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&Printer::bare().formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::alpha_eq_formula;
    use crate::syntax::parser::{parse_formula, parse_program};

    #[test]
    fn round_trips() {
        let p = parse_program(
            "const 0 : i.\nconst s : i -> i.\nconst scons : i -> i -> i.\nconst from : i -> i -> o.\n\
             def fr_str = fix \\f.\\n. scons n (f (s n)).",
        )
        .unwrap();
        for src in [
            "forall x. from x (fr_str x)",
            "from 0 [0|s 0|fr_str (s (s 0))]",
            "exists y. from y [y|y] /\\ true \\/ from 0 0 => from 0 0",
            "(from 0 0 => from 0 0) => from 0 0",
            "forall (f : i -> i). from (f 0) ((\\x. x) 0)",
            "from 0 (fix \\x. scons (s 0) x)",
        ] {
            let f = parse_formula(src, &p).unwrap();
            let printed = pretty_formula(&f, &p);
            let back = parse_formula(&printed, &p).unwrap();
            assert!(alpha_eq_formula(&f, &back), "{src} printed as {printed}");
        }
        let f = parse_formula("from 0 (fr_str 0)", &p).unwrap();
        assert_eq!(pretty_formula(&f, &p), "from 0 (fr_str 0)");
        let printed = pretty_program(&p);
        assert!(parse_program(&printed).is_ok());
    }
}
