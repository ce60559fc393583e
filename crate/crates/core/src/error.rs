use num_complex::Complex64;
use thiserror::Error;

/// Coarse grouping of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// A root finder, Newton iteration or grid search did not converge.
    Solver,
    /// A function could not be evaluated (singularity, zero of a log argument, ...).
    Evaluation,
    /// Malformed input: bad formula, unknown catalog entry, bad option.
    Input,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {0} is too close to zero for a logarithm or power")]
    ZeroValue(Complex64),

    #[error("series divisor has a vanishing constant term")]
    DivisorConstantZero,

    #[error("series has a nonzero constant term {0}; cannot divide by z")]
    NonzeroConstantTerm(Complex64),

    #[error("expected a normalized input ({what}), found {found}")]
    NotNormalized { what: &'static str, found: Complex64 },

    #[error("series of order {have} is too short, order {need} required")]
    InsufficientOrder { have: usize, need: usize },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("exponent at byte {offset} depends on z; only constant exponents are supported")]
    NonConstantExponent { offset: usize },

    #[error("unknown catalog function `{0}`")]
    UnknownCatalog(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("domain error at z = {z}: {what}")]
    Domain { z: Complex64, what: String },

    #[error("critical point: f'(z) vanishes at z = {0}")]
    CriticalPoint(Complex64),

    #[error("branch tracking failed on [0, {0}] after maximal subdivision")]
    BranchTrackingFailure(Complex64),

    #[error("gamma = {0} must satisfy Re gamma > 0")]
    BadGamma(Complex64),

    #[error("every grid point of the norm search was singular")]
    AllPointsSingular,

    #[error("no sign change found while bracketing {0}")]
    BracketFailure(&'static str),

    #[error("theta = {0} is too close to the pole of varsigma")]
    PoleProximity(f64),

    #[error("f'(z) + t vanishes at z = {z}, t = {t}")]
    DivergentP { z: Complex64, t: f64 },

    #[error("chain is not Herglotz: Re p = {value} at z = {z}, t = {t}")]
    NotHerglotz { z: Complex64, t: f64, value: f64 },

    #[error("p = -1 is a pole of the Becker dilatation")]
    PoleAtMinusOne,

    #[error("p + q vanishes")]
    DegenerateDenominator,

    #[error("Newton iteration diverged (residual {residual:e}) at z = {z}")]
    NewtonDivergence { z: Complex64, residual: f64 },

    #[error("function is not {lambda}-spirallike: Re(e^(-i lambda) z f'/f) = {value} at z = {z}")]
    NotSpirallike { lambda: f64, z: Complex64, value: f64 },

    #[error("omega is not a self-map of the disk: |omega({z})| = {modulus}")]
    NotSelfMap { z: Complex64, modulus: f64 },

    #[error("{failed} of {total} extension cells failed (first failure: {first})")]
    TooManyFailures { failed: usize, total: usize, first: String },

    #[error("inconsistent results: {0}")]
    Inconsistent(String),
}

impl Error {
    pub fn domain(z: Complex64, what: impl Into<String>) -> Self {
        Error::Domain { z, what: what.into() }
    }

    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            BracketFailure(_)
            | NewtonDivergence { .. }
            | TooManyFailures { .. }
            | Inconsistent(_)
            | BranchTrackingFailure(_) => ErrorClass::Solver,
            Syntax { .. }
            | NonConstantExponent { .. }
            | UnknownCatalog(_)
            | BadParameter(_)
            | BadGamma(_)
            | NotNormalized { .. }
            | InsufficientOrder { .. } => ErrorClass::Input,
            _ => ErrorClass::Evaluation,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
