//! Surface syntax: lexer, parser, printer and proof documents.

pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod proofdoc;

pub use lexer::Span;
pub use parser::{
    parse_declaration, parse_formula, parse_formula_with, parse_goal, parse_program, parse_term,
    parse_type, ParseError, ParseErrorKind,
};
pub use pretty::{pretty_formula, pretty_program, pretty_term, Printer};
pub use proofdoc::{export_proof, import_proof, DocError, ProofDoc};
