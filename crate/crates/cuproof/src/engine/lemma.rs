//! Promotion of coinductively proven formulas to lemmas.
//!
//! A checked CO-FIX proof of an H-shaped formula may be added to later programs
//! as an extra clause. Lemmas are selectable by the unguarded DECIDE only.

use thiserror::Error;

use super::check::check_with_lemmas;
use super::proof::{ProofNode, Rule};
use crate::formula::{Calculus, Formula, HClause};
use crate::program::Program;

#[derive(Clone, Debug)]
pub struct Lemma {
    pub formula: Formula,
    pub proof: ProofNode,
    pub calculus: Calculus,
}

impl Lemma {
    pub fn h_clause(&self) -> HClause {
        HClause::from_formula(&self.formula).expect("promotion checks the shape")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LemmaError {
    #[error("lemma proof does not check: {0}")]
    ProofInvalid(String),
    #[error("lemma proofs must end with CO-FIX")]
    NotCoinductive,
    #[error("lemma is not H-shaped")]
    NotHShaped,
}

/// Checks `proof` against the program (and earlier lemmas) and returns the lemma.
pub fn promote_lemma(
    program: &Program,
    proof: &ProofNode,
    calculus: Calculus,
    earlier: &[Lemma],
    fixbeta_bound: usize,
) -> Result<Lemma, LemmaError> {
    if proof.rule != Rule::CoFix {
        return Err(LemmaError::NotCoinductive);
    }
    if HClause::from_formula(&proof.goal).is_none() {
        return Err(LemmaError::NotHShaped);
    }
    let prior: Vec<Formula> = earlier.iter().map(|l| l.formula.clone()).collect();
    let rep = check_with_lemmas(proof, program, &prior, calculus, fixbeta_bound);
    if let Some(f) = rep.failure {
        return Err(LemmaError::ProofInvalid(format!("at {:?} ({}): {}", f.path, f.rule.name(), f.reason)));
    }
    Ok(Lemma {
        formula: proof.goal.clone(),
        proof: proof.clone(),
        calculus,
    })
}

pub fn lemma_formulas(lemmas: &[Lemma]) -> Vec<Formula> {
    lemmas.iter().map(|l| l.formula.clone()).collect()
}
