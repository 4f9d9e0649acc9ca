use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("payoff matrices must be non-empty")]
    Empty,
    #[error("payoff matrix rows have different lengths")]
    Ragged,
    #[error("R and C have different shapes")]
    ShapeMismatch,
    #[error("{matrix}[{row}][{col}] = {value} lies outside [0, 1]")]
    OutOfRange {
        matrix: &'static str,
        row: usize,
        col: usize,
        value: Rational,
    },
    #[error("{side} index {index} out of range (size {len})")]
    IndexOutOfRange {
        side: &'static str,
        index: usize,
        len: usize,
    },
    #[error("{side} strategy has length {found}, expected {expected}")]
    StrategyLength {
        side: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),
    #[error("invalid support pair: {0}")]
    InvalidSupport(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
}

/// Raised when an LP that must have an optimum reports otherwise. Indicates
/// a bug, never bad user input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("solver anomaly: {0}")]
pub struct SolverAnomaly(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("z must be positive for q to be defined")]
    ZeroZ,
    #[error("z = {0} outside the supported range [0, 1/6)")]
    ZOutOfRange(Rational),
    #[error("t = {0} outside [0, 1]")]
    TOutOfRange(Rational),
    #[error("worst bad row {row} puts no probability on its small columns")]
    NoSmallMass { row: usize },
    #[error("columns {columns:?} of row {row} are both big and small")]
    Overlap { row: usize, columns: Vec<usize> },
    #[error("({row}, {col}, {row2}, {col2}) is not a matching-pennies sub-game at this z")]
    NotMatchingPennies {
        row: usize,
        row2: usize,
        col: usize,
        col2: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofLabError {
    #[error("t = {0} outside [0, 1]")]
    TOutOfRange(Rational),
    #[error("z = {0} is negative or too large for phi(z, 3) to be defined")]
    ZOutOfRange(Rational),
    #[error("phi denominator is not positive at z = {z}, qbar = {qbar}")]
    PhiDenominator { z: Box<Rational>, qbar: Box<Rational> },
    #[error(transparent)]
    Anomaly(#[from] SolverAnomaly),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("game dimensions must be positive")]
    EmptyDims,
    #[error("grid denominator must be at least 1")]
    ZeroDenominator,
    #[error("{kind} needs at least {rows}x{cols}")]
    TooSmall {
        kind: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("delta = {0} outside [0, 1/3)")]
    DeltaOutOfRange(Rational),
}
