use thiserror::Error;

use crate::lang::ast::Pos;

/// Syntax error with the position of the offending token.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{pos}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
    /// Tokens that would have been accepted at `pos`, if known.
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected one of: {})", expected.join(", "))
    }
}

/// Semantic problem found while resolving a parsed file.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{message}", pos_prefix(.pos))]
pub struct ValidationError {
    pub pos: Option<Pos>,
    pub message: String,
}

fn pos_prefix(pos: &Option<Pos>) -> String {
    pos.map(|p| format!("{p}: ")).unwrap_or_default()
}

impl ValidationError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            pos: None,
            message: message.into(),
        }
    }

    pub fn at(pos: Pos, message: impl Into<String>) -> Self {
        Self {
            pos: Some(pos),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum GpaError {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),
    #[error("invalid model: {0}")]
    Validation(#[from] ValidationError),
    #[error("moment order must be at least 1, got {0}")]
    InvalidOrder(u32),
    #[error("the linear noise approximation needs a split-free model")]
    NotSplitFree,
    #[error("integration produced a non-finite value at t = {time}")]
    NonFinite { time: f64 },
    #[error("moment {0} is not available in the data set")]
    MissingMoment(String),
    #[error("propensity of transition class {class} is invalid ({value}) at t = {time}")]
    BadPropensity { class: usize, value: f64, time: f64 },
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = GpaError> = std::result::Result<T, E>;
