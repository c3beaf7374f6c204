use core::fmt;

use crate::waveguide::ModeKind;

/// Failure modes of the numerical kernels and physics layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain(&'static str),
    /// A result is not representable in `f64`.
    Overflow(&'static str),
    /// The requested mode is below cutoff at the requested frequency.
    NotGuided(ModeKind),
    /// An iterative or adaptive procedure did not reach its tolerance.
    NoConvergence {
        what: &'static str,
        lower: f64,
        upper: f64,
        residual: f64,
    },
    /// Both forces vanish, so the asymmetry ratio is 0/0.
    UndefinedAsymmetry,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Overflow(msg) => write!(f, "overflow: {msg}"),
            Error::NotGuided(kind) => write!(f, "mode {kind} is not guided (below cutoff)"),
            Error::NoConvergence {
                what,
                lower,
                upper,
                residual,
            } => write!(
                f,
                "{what} did not converge (bracket [{lower:e}, {upper:e}], residual {residual:e})"
            ),
            Error::UndefinedAsymmetry => {
                write!(f, "asymmetry undefined: both forces are zero")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
