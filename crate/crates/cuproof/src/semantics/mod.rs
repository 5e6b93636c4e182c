//! Truncated trees, the distance between them, and the coinductive Herbrand
//! semantics of first-order programs.

pub mod model;
pub mod tree;

pub use model::{
    parse_interpretation, parse_tree, print_interpretation, Interpretation, Membership, ModelConfig, ModelError,
    Semantics,
};
pub use tree::{
    distance, guarded_atom_to_tree, substitute, term_to_tree, unfold_to_depth, Distance, Position, Symbol, Tree,
    TreeError,
};
