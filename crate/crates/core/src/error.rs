use alloc::string::String;
use core::fmt;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: wrong shapes, non-finite entries, out-of-range parameters.
    InvalidInput(String),
    /// A matrix that must be Hermitian positive definite is not.
    NotHermitianPd { what: String, detail: String },
    /// The spectrum of the symbol violates a structural assumption
    /// (simple zeros, no zero on the unit circle, deficiency bookkeeping).
    AssumptionViolation(String),
    /// A factorization or iteration failed to produce a usable result.
    NumericalFailure(String),
    /// Two independent evaluation routes disagree beyond their tolerance.
    Inconsistency {
        what: String,
        discrepancy: f64,
        tolerance: f64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::NumericalFailure(msg.into())
    }

    pub(crate) fn assumption(msg: impl Into<String>) -> Self {
        Error::AssumptionViolation(msg.into())
    }

    pub(crate) fn not_pd(what: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::NotHermitianPd {
            what: what.into(),
            detail: detail.into(),
        }
    }

    /// Returns `Ok(())` when `discrepancy <= tolerance`, otherwise an
    /// [`Error::Inconsistency`] naming the check.
    pub(crate) fn check(what: &str, discrepancy: f64, tolerance: f64) -> Result<()> {
        if discrepancy <= tolerance {
            Ok(())
        } else {
            Err(Error::Inconsistency {
                what: what.into(),
                discrepancy,
                tolerance,
            })
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::NotHermitianPd { what, detail } => {
                write!(f, "{what} is not Hermitian positive definite: {detail}")
            }
            Error::AssumptionViolation(msg) => write!(f, "assumption violated: {msg}"),
            Error::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
            Error::Inconsistency {
                what,
                discrepancy,
                tolerance,
            } => write!(
                f,
                "inconsistent results for {what}: discrepancy {discrepancy:e} exceeds {tolerance:e}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
