//! Lexing and parsing of program and fact files.
//!
//! The accepted language is a small ASP subset: normal rules, integrity
//! constraints and facts over flat terms. Body literals are atoms,
//! default-negated atoms, or comparisons between integer arithmetic
//! expressions. Every rule must be safe: each variable has to occur in some
//! positive body atom.

mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_facts, parse_ground_atom, parse_program};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl ParseDiagnostic {
    pub fn error(message: impl Into<String>, line: usize, column: usize) -> Self {
        ParseDiagnostic { severity: Severity::Error, message: message.into(), line, column }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl ParseError {
    pub fn new(diagnostics: Vec<ParseDiagnostic>) -> Self {
        ParseError { diagnostics }
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.diagnostics.iter().any(|d| d.message.contains(needle))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}
