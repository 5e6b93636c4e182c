//! Proof search, proof checking and lemmas for the four coinductive calculi.

pub mod check;
pub mod lemma;
pub mod proof;
pub mod search;
pub mod unify;

pub use check::{check, check_with_lemmas, CheckFailure, CheckReport};
pub use lemma::{lemma_formulas, promote_lemma, Lemma, LemmaError};
pub use proof::{ProofNode, Rule, SearchConfig};
pub use search::{coprove, prove, Outcome, SearchError, SearchResult, SearchStats};
pub use unify::{unify_first_order, Unifier};
