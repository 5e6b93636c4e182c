//! JSON proof documents. Formulas and terms are stored as concrete syntax and
//! re-parsed on import against the program signature plus the constants
//! introduced further up the tree.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::parser::{parse_declaration, parse_formula_with, parse_term, ParseErrorKind};
use super::pretty::Printer;
use crate::engine::{ProofNode, Rule};
use crate::program::Program;
use crate::term::{Name, Type};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofDoc {
    pub rule: String,
    #[serde(default)]
    pub signature_additions: Vec<String>,
    #[serde(default)]
    pub program_additions: Vec<String>,
    #[serde(default)]
    pub focus: Option<String>,
    pub goal: String,
    #[serde(default)]
    pub guarded: bool,
    #[serde(default)]
    pub witness: Option<String>,
    #[serde(default)]
    pub children: Vec<ProofDoc>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocError {
    #[error("malformed proof document: {0}")]
    MalformedDocument(String),
    #[error("proof document does not fit the program signature: {0}")]
    SignatureMismatch(String),
}

pub fn export_proof(p: &ProofNode, program: &Program) -> ProofDoc {
    let pr = Printer::new(program);
    ProofDoc {
        rule: p.rule.name().to_string(),
        signature_additions: p.sig_add.iter().map(|(c, t)| format!("{c} : {t}")).collect(),
        program_additions: p.prog_add.iter().map(|f| pr.formula(f)).collect(),
        focus: p.focus.as_ref().map(|f| pr.formula(f)),
        goal: pr.formula(&p.goal),
        guarded: p.guarded,
        witness: p.witness.as_ref().map(|w| pr.term(w)),
        children: p.children.iter().map(|c| export_proof(c, program)).collect(),
    }
}

pub fn to_json(p: &ProofNode, program: &Program) -> String {
    serde_json::to_string_pretty(&export_proof(p, program)).expect("proof documents serialize")
}

pub fn from_json(text: &str, program: &Program) -> Result<ProofNode, DocError> {
    let doc: ProofDoc = serde_json::from_str(text).map_err(|e| DocError::MalformedDocument(e.to_string()))?;
    import_proof(&doc, program)
}

pub fn import_proof(doc: &ProofDoc, program: &Program) -> Result<ProofNode, DocError> {
    import(doc, program, &mut Vec::new())
}

fn map_parse(e: super::ParseError, what: &str) -> DocError {
    match e.kind {
        ParseErrorKind::Unbound => DocError::SignatureMismatch(format!("{what}: {e}")),
        _ => DocError::MalformedDocument(format!("{what}: {e}")),
    }
}

fn import(doc: &ProofDoc, program: &Program, extra: &mut Vec<(Name, Type)>) -> Result<ProofNode, DocError> {
    let rule = Rule::from_name(&doc.rule).ok_or_else(|| DocError::MalformedDocument(format!("unknown rule `{}`", doc.rule)))?;
    let goal = parse_formula_with(&doc.goal, program, extra).map_err(|e| map_parse(e, "goal"))?;
    let focus = match &doc.focus {
        Some(f) => Some(parse_formula_with(f, program, extra).map_err(|e| map_parse(e, "focus"))?),
        None => None,
    };
    let witness = match &doc.witness {
        Some(w) => Some(parse_term(w, program, extra, None).map_err(|e| map_parse(e, "witness"))?),
        None => None,
    };
    let mut sig_add = Vec::new();
    for s in &doc.signature_additions {
        let (c, t) = parse_declaration(s).map_err(|e| map_parse(e, "signature addition"))?;
        if program.signature.contains(&c) || extra.iter().any(|(d, _)| *d == c) {
            return Err(DocError::SignatureMismatch(format!("`{c}` is already declared")));
        }
        sig_add.push((c, t));
    }
    let depth = extra.len();
    extra.extend(sig_add.iter().cloned());
    let prog_add = doc
        .program_additions
        .iter()
        .map(|f| parse_formula_with(f, program, extra).map_err(|e| map_parse(e, "program addition")))
        .collect::<Result<Vec<_>, _>>();
    let children = prog_add.and_then(|pa| {
        doc.children
            .iter()
            .map(|c| import(c, program, extra))
            .collect::<Result<Vec<_>, _>>()
            .map(|cs| (pa, cs))
    });
    extra.truncate(depth);
    let (prog_add, children) = children?;
    Ok(ProofNode {
        rule,
        sig_add,
        prog_add,
        focus,
        goal,
        guarded: doc.guarded,
        witness,
        children,
    })
}
