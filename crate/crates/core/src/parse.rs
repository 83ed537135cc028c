//! Shared helpers for the textual grammars.

use thiserror::Error;

/// A failed parse, naming the grammar production that rejected the input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{input}` as {production}: {reason}")]
pub struct ParseError {
    pub production: &'static str,
    pub input: String,
    pub reason: String,
}

impl ParseError {
    pub fn new(production: &'static str, input: &str, reason: impl Into<String>) -> Self {
        ParseError {
            production,
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}

pub(crate) fn parse_uint(production: &'static str, whole: &str, s: &str) -> Result<u32, ParseError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::new(production, whole, format!("expected a number, found `{s}`")));
    }
    s.parse::<u32>()
        .map_err(|e| ParseError::new(production, whole, e.to_string()))
}

/// Splits a sum on ` + ` (also accepting a bare `+`).
pub(crate) fn split_sum(s: &str) -> Vec<&str> {
    s.split('+').map(str::trim).collect()
}
