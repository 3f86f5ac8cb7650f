//! Concrete syntax: lexing, parsing and pretty-printing.
//!
//! Programs are a list of `data`/`codata` declarations followed by `in` and
//! a body expression. Safe types and constructors carry a leading tick
//! (`'nat`, `'Succ`); the grammar is written out in `docs/grammar.md`.

mod ast;
mod lexer;
mod parser;
mod pretty;

use std::fmt;

use serde::Serialize;

pub use ast::{node_id, Arm, Binding, Decl, DeclKind, Program, Side, SiteId, Span, SpanMap, Summand, Term};
pub use lexer::is_keyword;
pub use parser::{parse_decls_in, parse_expr_in, parse_program, parse_type_in, Scope};
pub use pretty::{pretty_program, pretty_term, pretty_ty, PrettyOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    DuplicateDeclaration,
    DuplicateConstructor,
    ForwardReference,
}

impl ParseErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ParseErrorKind::Lexical => "lexical",
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::DuplicateDeclaration => "duplicate-declaration",
            ParseErrorKind::DuplicateConstructor => "duplicate-constructor",
            ParseErrorKind::ForwardReference => "forward-reference",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
    /// Tokens that would have been accepted at the error position.
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn lexical(span: Span, message: &str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Lexical,
            line: span.line,
            col: span.col,
            message: message.to_string(),
            expected: vec![],
        }
    }

    pub fn span(&self) -> Span {
        Span { line: self.line, col: self.col }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}
