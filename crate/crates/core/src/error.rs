use num_complex::Complex64;
use thiserror::Error;

/// Coarse failure category, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Input does not satisfy a type invariant.
    Validation,
    /// A numerical procedure could not deliver a trustworthy answer.
    Numerical,
    /// The input is valid but the requested quantity is undefined for it.
    Precondition,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RirError {
    #[error("no roots defined for a constant or zero polynomial")]
    NoRoots,
    #[error("root solver residual check failed (worst residual ratio {ratio:e})")]
    RootResidual { ratio: f64 },
    #[error("evaluation at a pole s = {}{:+}j", .at.re, .at.im)]
    Pole { at: Complex64 },
    #[error("zero denominator polynomial")]
    ZeroDenominator,
    #[error("numerator and denominator share an approximate root near {}{:+}j", .at.re, .at.im)]
    Cancellation { at: Complex64 },
    #[error("transfer function is improper (numerator degree {num} > denominator degree {den})")]
    Improper { num: usize, den: usize },
    #[error("H-infinity norm undefined: function is not stable")]
    HinfUndefined,
    #[error("{what} must have real coefficients")]
    NotReal { what: &'static str },
    #[error("{what} is not stable")]
    NotStable { what: &'static str },
    #[error("perturbation not in RH-infinity (channel {index})")]
    PerturbationNotStable { index: usize },
    #[error("n must be odd and at least 3 (got {0})")]
    InvalidAgentCount(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("perturbation has {got} channels but the network has {expected} agents")]
    LengthMismatch { expected: usize, got: usize },
    #[error("unreliable modal subsystem: {0}")]
    UnreliableModal(String),
    #[error("indeterminate characteristic polynomial: root near {}{:+}j cancels a denominator root", .at.re, .at.im)]
    IndeterminateCharPoly { at: Complex64 },
    #[error("network not strictly unstable; rho_plus undefined")]
    NotStrictlyUnstable,
    #[error("outside lemma hypothesis: {0}")]
    OutsideLemmaHypothesis(String),
    #[error("search bracket [{low}, {high}] lies below the lower bound {floor}")]
    BracketBelowFloor { low: f64, high: f64, floor: f64 },
    #[error("brute force limited to n <= 5 (got {0})")]
    BruteForceLimit(usize),
    #[error("transfer function has a zero on the imaginary axis at omega = {omega}")]
    AxisZero { omega: f64 },
}

impl RirError {
    pub fn kind(&self) -> ErrorKind {
        use RirError::*;
        match self {
            RootResidual { .. }
            | Pole { .. }
            | Cancellation { .. }
            | UnreliableModal(_)
            | IndeterminateCharPoly { .. } => ErrorKind::Numerical,
            NotStrictlyUnstable | BracketBelowFloor { .. } | BruteForceLimit(_) => {
                ErrorKind::Precondition
            }
            NoRoots
            | ZeroDenominator
            | Improper { .. }
            | HinfUndefined
            | NotReal { .. }
            | NotStable { .. }
            | PerturbationNotStable { .. }
            | InvalidAgentCount(_)
            | InvalidParameter(_)
            | LengthMismatch { .. }
            | OutsideLemmaHypothesis(_)
            | AxisZero { .. } => ErrorKind::Validation,
        }
    }
}

pub type Result<T, E = RirError> = std::result::Result<T, E>;
