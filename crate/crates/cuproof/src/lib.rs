//! Coinductive uniform proofs for Horn clause programs over infinite terms.
//!
//! Terms are simply typed and may contain guarded fixed points `fix f. λx̄. ...`
//! denoting rational infinite trees. Four calculi are provided (first- or
//! higher-order, Horn or hereditary Harrop), each with a goal-directed search,
//! an independent proof checker and lemma promotion. For first-order programs the
//! greatest Herbrand model is approximated at a fixed tree depth, and the harness
//! in [`harness`] relates proofs back to it.

pub mod corpus;
pub mod engine;
pub mod formula;
pub mod guard;
pub mod harness;
pub mod program;
pub mod semantics;
pub mod syntax;
pub mod term;
