use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Which end of a radial integral failed to converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Origin,
    Infinity,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidGrid(String),
    DimensionMismatch { expected: usize, found: usize },
    GridMismatch,
    NonFiniteSymbol { operator: String, frequency: [f64; 2] },
    NonRealResult { residue: f64 },
    NonFiniteValue { what: &'static str, index: usize, value: f64 },
    NegativeWeight { index: usize, value: f64 },
    UnknownWeight(String),
    UnknownOperator(String),
    InvalidParameter { name: &'static str, reason: String },
    /// A certificate was requested for data that fails one of the hypothesis
    /// conditions.
    HypothesisRefused { condition: &'static str, detail: String },
    StepFailure { time: f64, index: usize, value: f64 },
    BeyondBlowupBound { time: f64, bound: f64 },
    DiagnosticRefused { diagnostic: &'static str, reason: String },
    NonConvergentTail { end: End, detail: String },
    NotEvenPiPeriodic { defect: f64 },
    TooFewNodes { needed: usize, found: usize },
    GridTooCoarse { spacing: f64, required: f64 },
    NotConeSupported { outside_mass: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::GridMismatch => write!(f, "fields live on different grids"),
            Error::NonFiniteSymbol { operator, frequency } => write!(
                f,
                "symbol of {operator} is not finite at frequency ({}, {})",
                frequency[0], frequency[1]
            ),
            Error::NonRealResult { residue } => {
                write!(f, "multiplier produced a non-real field (imaginary residue {residue:e})")
            }
            Error::NonFiniteValue { what, index, value } => {
                write!(f, "{what} is not finite at node {index} (value {value})")
            }
            Error::NegativeWeight { index, value } => {
                write!(f, "weight W2 is negative at node {index} (value {value:e})")
            }
            Error::UnknownWeight(name) => write!(f, "unknown weight pair `{name}`"),
            Error::UnknownOperator(name) => write!(f, "unknown operator `{name}`"),
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::HypothesisRefused { condition, detail } => {
                write!(f, "certificate refused: {condition} condition fails ({detail})")
            }
            Error::StepFailure { time, index, value } => write!(
                f,
                "time step failed at t = {time}: exponential overflow at node {index} (exponent {value:e})"
            ),
            Error::BeyondBlowupBound { time, bound } => {
                write!(f, "sample time {time} is not below the certified bound {bound}")
            }
            Error::DiagnosticRefused { diagnostic, reason } => {
                write!(f, "diagnostic {diagnostic} refused: {reason}")
            }
            Error::NonConvergentTail { end, detail } => {
                let at = match end {
                    End::Origin => "r = 0",
                    End::Infinity => "r = ∞",
                };
                write!(f, "radial integral does not converge at {at}: {detail}")
            }
            Error::NotEvenPiPeriodic { defect } => write!(
                f,
                "angular data is not even and π-periodic (relative defect {defect:e})"
            ),
            Error::TooFewNodes { needed, found } => {
                write!(f, "need at least {needed} nodes, found {found}")
            }
            Error::GridTooCoarse { spacing, required } => write!(
                f,
                "grid spacing {spacing:e} does not resolve the probed radius {required:e}"
            ),
            Error::NotConeSupported { outside_mass } => write!(
                f,
                "data is not supported in the cone (relative mass outside {outside_mass:e})"
            ),
        }
    }
}

impl core::error::Error for Error {}
