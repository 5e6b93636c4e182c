//! Programs: a signature, named fix definitions and an ordered list of clauses.

use crate::formula::{alpha_eq_formula, Formula};
use crate::term::{alpha_eq, Name, Signature, Term, Type};

#[derive(Clone, Debug)]
pub struct FixDef {
    pub name: Name,
    pub term: Term,
    pub ty: Type,
}

#[derive(Clone, Debug)]
pub struct Clause {
    pub formula: Formula,
    /// 1-based line in the source file, when parsed.
    pub line: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct Program {
    pub signature: Signature,
    pub defs: Vec<FixDef>,
    pub clauses: Vec<Clause>,
    /// `%!` pragma lines from the source, used to attach notes to a program.
    pub notes: Vec<String>,
}

impl Program {
    pub fn new(signature: Signature) -> Program {
        Program {
            signature,
            ..Program::default()
        }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.clauses.iter().map(|c| &c.formula)
    }

    pub fn push(&mut self, f: Formula) {
        self.clauses.push(Clause {
            formula: f,
            line: None,
        });
    }

    /// Keeps only the clauses at the given 0-based positions, in that order.
    pub fn select(&self, indices: &[usize]) -> Program {
        Program {
            signature: self.signature.clone(),
            defs: self.defs.clone(),
            clauses: indices.iter().filter_map(|&i| self.clauses.get(i).cloned()).collect(),
            notes: self.notes.clone(),
        }
    }

    pub fn contains_clause(&self, f: &Formula) -> bool {
        self.formulas().any(|g| alpha_eq_formula(f, g))
    }

    pub fn def(&self, n: &str) -> Option<&FixDef> {
        self.defs.iter().find(|d| &*d.name == n)
    }

    /// Name of the definition a fix term was expanded from, if any.
    pub fn def_name_of(&self, t: &Term) -> Option<&Name> {
        self.defs.iter().find(|d| alpha_eq(&d.term, t)).map(|d| &d.name)
    }

    /// The same program with extra constants (eigenvariables) in the signature.
    pub fn with_constants(&self, extra: &[(Name, Type)]) -> Program {
        let mut p = self.clone();
        for (c, t) in extra {
            p.signature.declare_name(c.clone(), t.clone());
        }
        p
    }

    /// The `%! <key>:` pragma lines for `key`, joined into one paragraph.
    pub fn note(&self, key: &str) -> Option<String> {
        let prefix = format!("{key}:");
        let lines: Vec<&str> = self
            .notes
            .iter()
            .filter_map(|n| n.strip_prefix(prefix.as_str()).map(str::trim))
            .collect();
        (!lines.is_empty()).then(|| lines.join(" "))
    }

    /// A documented limitation of the calculi on this program, if any.
    pub fn limitation_note(&self) -> Option<String> {
        self.note("limitation")
    }
}
