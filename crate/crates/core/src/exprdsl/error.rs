use std::fmt;

use thiserror::Error;

use super::ast::Span;
use crate::jets::JetError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    UnknownIdentifier,
    Arity,
    /// Well-formed statements that do not describe a valid immersion
    /// (missing `dim`, wrong component count, empty interval, ...).
    Semantic,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Lexical => "lexical error",
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UnknownIdentifier => "unknown identifier",
            ParseErrorKind::Arity => "arity error",
            ParseErrorKind::Semantic => "invalid specification",
        })
    }
}

/// Parse failure with its 1-based line and column.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub span: Span,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, message: impl Into<String>, span: Span, src: &str) -> Self {
        let start = span.start.min(src.len());
        let span = Span::new(start, span.end.clamp(start, src.len()));
        let (line, column) = line_col(src, start);
        ParseError {
            kind,
            message: message.into(),
            span,
            line,
            column,
        }
    }
}

pub(crate) fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let col = match before.rfind('\n') {
        Some(nl) => before[nl + 1..].chars().count() + 1,
        None => before.chars().count() + 1,
    };
    (line, col)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("point has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("coordinate {var} = {value} outside its domain [{lo}, {hi}]")]
    OutsideDomain {
        var: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("component {component}: {source}")]
    Jet {
        component: usize,
        #[source]
        source: JetError,
    },
}
