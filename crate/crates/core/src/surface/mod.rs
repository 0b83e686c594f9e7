//! Lexing, parsing, and pretty-printing of the mini-ML surface language.

mod ast;
mod lexer;
mod parser;
mod print;

use std::fmt;

pub use ast::{Binder, Item, Program, Term, TermKind, TypeExpr, TypeExprKind};
pub use lexer::{tokenize, Tok, Token};
pub use parser::parse_program;
pub use print::{print_program, print_term};

use crate::source::{FileId, Location};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub loc: Location,
    pub message: String,
    /// Tokens that would have been accepted, when known.
    pub expected: Vec<String>,
}

impl SyntaxError {
    pub fn new(loc: Location, message: impl Into<String>) -> Self {
        SyntaxError { loc, message: message.into(), expected: Vec::new() }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for SyntaxError {}

/// Tokenize and parse one file.
pub fn parse_source(src: &str, file: FileId) -> Result<Program, SyntaxError> {
    let toks = tokenize(src, file)?;
    parse_program(&toks, file, src.len())
}
