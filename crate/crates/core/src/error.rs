//! Error type shared by all operator-model computations.

use std::fmt;

/// Errors produced by matrix construction, decompositions, and verifications.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operation requires a square matrix.
    NotSquare { rows: usize, cols: usize },
    /// Entry count does not match the declared shape.
    DimensionMismatch { expected: usize, actual: usize },
    /// A matrix entry is NaN or infinite.
    NotFinite,
    /// Input is not Hermitian within tolerance.
    NotHermitian { residual: f64 },
    /// A scalar function is undefined (non-finite) at a spectrum atom.
    DomainError { atom: f64 },
    /// Least-squares system is numerically rank-deficient.
    SingularFit { degree: usize, samples: usize },
    /// A vector argument is (numerically) zero.
    ZeroVector,
    /// Operation requires an invertible operator.
    SingularOperator,
    /// The given vector is not cyclic: its cyclic subspace is a proper subspace.
    NotCyclic { subspace_dim: usize, space_dim: usize },
    /// Numerator measure has mass at an atom the base measure misses.
    NotAbsolutelyContinuous { atom: f64 },
    /// Pushforward under inversion hit a nonpositive atom.
    AtomAtZero { atom: f64 },
    /// Malformed matrix or report JSON.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquare { rows, cols } => {
                write!(f, "matrix must be square, got {rows}x{cols}")
            }
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "expected {expected} entries, got {actual}")
            }
            Error::NotFinite => write!(f, "matrix has NaN or infinite entries"),
            Error::NotHermitian { residual } => {
                write!(f, "matrix is not Hermitian (residual {residual:.3e})")
            }
            Error::DomainError { atom } => {
                write!(f, "function undefined at spectrum atom {atom}")
            }
            Error::SingularFit { degree, samples } => write!(
                f,
                "rank-deficient least-squares fit (degree {degree}, {samples} samples)"
            ),
            Error::ZeroVector => write!(f, "vector argument is zero"),
            Error::SingularOperator => write!(f, "operator is singular"),
            Error::NotCyclic {
                subspace_dim,
                space_dim,
            } => write!(
                f,
                "vector is not cyclic: spans {subspace_dim} of {space_dim} dimensions"
            ),
            Error::NotAbsolutelyContinuous { atom } => {
                write!(f, "measure has mass at atom {atom} where base measure has none")
            }
            Error::AtomAtZero { atom } => {
                write!(f, "cannot invert measure with atom at {atom}")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
