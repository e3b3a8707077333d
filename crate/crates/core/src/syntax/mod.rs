//! Textual specification language: lexer, parser, elaboration into the
//! core types, printing, and file loading with imports.

pub mod ast;
pub mod elaborate;
pub mod lexer;
pub mod loader;
pub mod parser;
pub mod printer;

use std::fmt;

pub use elaborate::{elaborate, Check, Morphism, Universe, Workspace};
pub use loader::{load, load_str, Loaded, SourceMap};
pub use parser::parse_unit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub file: usize,
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(file: usize, start: usize, end: usize) -> Self {
        Span { file, start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span {
            file: self.file,
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    pub note: Option<String>,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            span,
            message: message.into(),
            note: None,
        }
    }

    pub fn warning(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            span,
            message: message.into(),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Parse a single formula against a signature, as in an axiom.
pub fn parse_sentence(
    text: &str,
    sig: &crate::edts::EdSignature,
) -> Result<crate::logic::Formula, Vec<Diagnostic>> {
    let ast = parser::parse_formula_text(text)?;
    elaborate::lower_sentence(&ast, sig).map_err(|d| vec![d])
}

/// Parse a state predicate (`kind = State`) or transition predicate.
pub fn parse_predicate(
    text: &str,
    data: &crate::data::DataSignature,
    kind: crate::pred::PredKind,
) -> Result<crate::pred::Expr, Vec<Diagnostic>> {
    let ast = parser::parse_formula_text(text)?;
    elaborate::lower_pred(&ast, data, kind).map_err(|d| vec![d])
}

/// Parse a standalone action.
pub fn parse_action(text: &str, sig: &crate::edts::EdSignature) -> Result<crate::logic::Action, Vec<Diagnostic>> {
    let ast = parser::parse_action_text(text)?;
    elaborate::lower_action(&ast, sig).map_err(|d| vec![d])
}
