use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Location inside a formula source text. Lines and columns are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub fn locate(text: &str, offset: usize) -> Self {
        let offset = offset.min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
        Position {
            offset,
            line,
            column,
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("gate `{gate}` expects {expected} inputs, found {found}")]
    ArityMismatch {
        gate: String,
        expected: usize,
        found: usize,
    },
    #[error("variable x{0} appears more than once (formula is not read-once)")]
    RepeatedVariable(usize),
    #[error("variable indices must be exactly x1..x{max}; x{missing} is missing")]
    NonContiguousVariables { missing: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{position}: {kind}")]
pub struct ParseError {
    pub position: Position,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),

    #[error("registry line {line}: {message}")]
    Registry { line: usize, message: String },

    #[error("malformed formula: {0}")]
    Malformed(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("input has {found} bits, expected {expected}")]
    InputLength { expected: usize, found: usize },

    #[error("invalid bit string `{0}`")]
    InvalidBits(String),

    #[error("no cost bound available for gate `{0}`")]
    MissingBound(String),

    #[error("gate `{0}` is not an AND or OR gate")]
    NotAndOr(String),

    #[error("gate `{gate}` has fan-in {fan_in}; expand to fan-in two first")]
    FanIn { gate: String, fan_in: usize },

    #[error("weights must be strictly positive, got {0}")]
    NonPositiveWeight(f64),

    #[error("cost vector invalid: {0}")]
    InvalidCosts(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("outer input {0} needs a dual (negated) inner program, none was supplied")]
    MissingDual(usize),

    #[error("gate `{0}` has no attached span programs")]
    MissingPrograms(String),

    #[error("witness problem infeasible (residual {residual:.3e})")]
    Infeasible { residual: f64 },

    #[error("minimax solver did not converge: value bracketed in [{lower}, {upper}]")]
    NoConvergence { lower: f64, upper: f64 },

    #[error("gate arity {0} exceeds the supported maximum for this operation")]
    ArityTooLarge(usize),

    #[error("adversary certificate infeasible: {}", .0.join("; "))]
    InfeasibleCertificate(Vec<String>),

    #[error("energy {energy} outside (0, {max}]")]
    EnergyOutOfRange { energy: f64, max: f64 },

    #[error("NAND-tree calibration failed: {0}")]
    Calibration(String),

    #[error("span program is not canonical-shaped: {0}")]
    NotCanonical(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
