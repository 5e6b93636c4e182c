//! The shipped example programs and the coinductive goals run against them.

use crate::formula::Calculus;
use crate::program::Program;
use crate::syntax::{parse_program, ParseError};

pub struct CorpusFile {
    pub name: &'static str,
    pub source: &'static str,
}

pub const FILES: [CorpusFile; 5] = [
    CorpusFile {
        name: "member.cup",
        source: include_str!("../corpus/member.cup"),
    },
    CorpusFile {
        name: "bitstream.cup",
        source: include_str!("../corpus/bitstream.cup"),
    },
    CorpusFile {
        name: "from.cup",
        source: include_str!("../corpus/from.cup"),
    },
    CorpusFile {
        name: "comember.cup",
        source: include_str!("../corpus/comember.cup"),
    },
    CorpusFile {
        name: "fibs.cup",
        source: include_str!("../corpus/fibs.cup"),
    },
];

pub fn file(name: &str) -> Option<&'static CorpusFile> {
    let name = name.strip_suffix(".cup").unwrap_or(name);
    FILES.iter().find(|f| f.name.strip_suffix(".cup") == Some(name))
}

pub fn load(name: &str) -> Result<Program, ParseError> {
    let f = file(name).unwrap_or_else(|| panic!("no corpus file `{name}`"));
    parse_program(f.source)
}

/// What a coinductive goal is expected to do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Proved,
    Inconclusive,
}

pub struct Entry {
    pub name: &'static str,
    pub file: &'static str,
    /// 0-based clause positions to keep, when only part of the file is used.
    pub clauses: Option<&'static [usize]>,
    pub calculus: Calculus,
    pub goal: &'static str,
    pub expect: Expect,
}

impl Entry {
    pub fn program(&self) -> Program {
        let p = load(self.file).expect("corpus files parse");
        match self.clauses {
            Some(ix) => p.select(ix),
            None => p,
        }
    }
}

pub const ENTRIES: [Entry; 6] = [
    Entry {
        name: "member-eq",
        file: "member.cup",
        clauses: Some(&[2, 3]),
        calculus: Calculus::Fohc,
        goal: "member 0 [0|nil]",
        expect: Expect::Proved,
    },
    Entry {
        name: "bitstream-zeros",
        file: "bitstream.cup",
        clauses: None,
        calculus: Calculus::Hohc,
        goal: "bitstream [0|n_str 0]",
        expect: Expect::Proved,
    },
    Entry {
        name: "from-successors",
        file: "from.cup",
        clauses: None,
        calculus: Calculus::Hohh,
        goal: "forall x. from x (fr_str x)",
        expect: Expect::Proved,
    },
    Entry {
        name: "comember-bit",
        file: "comember.cup",
        clauses: None,
        calculus: Calculus::Fohh,
        goal: "forall y s. bit y => comember_bit y s",
        expect: Expect::Proved,
    },
    Entry {
        name: "from-zero-atomic",
        file: "from.cup",
        clauses: None,
        calculus: Calculus::Hohc,
        goal: "from 0 (fr_str 0)",
        expect: Expect::Inconclusive,
    },
    Entry {
        name: "fibs",
        file: "fibs.cup",
        clauses: None,
        calculus: Calculus::Hohh,
        goal: "forall x y z. add x y z => fibs x y [x|fib_str y z]",
        expect: Expect::Inconclusive,
    },
];

pub fn entry(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_goal;

    #[test]
    fn every_file_and_goal_parses() {
        for f in &FILES {
            parse_program(f.source).unwrap_or_else(|e| panic!("{}: {e}", f.name));
        }
        for e in &ENTRIES {
            parse_goal(e.goal, &e.program()).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        }
        assert!(load("fibs").unwrap().limitation_note().is_some());
    }
}
