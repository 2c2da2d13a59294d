//! The GPA input language: lexer, parser, printer and validation.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod validate;

pub use parser::{parse_expression, parse_model};
pub use printer::print_model;
pub use validate::{validate, ValidatedModel};
