//! Error types shared across the library.

use thiserror::Error;

/// Errors produced by library operations.
///
/// Numerical operations are total wherever the underlying mathematics is;
/// errors mark genuine precondition violations (mismatched shapes, matrices
/// that are not PSD, inverse transforms that fail to come back real).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Tensor or spectrum dimensions do not agree with what the operation requires.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Channel counts do not agree.
    #[error("channel mismatch: expected {expected}, got {got}")]
    ChannelMismatch { expected: usize, got: usize },

    /// Spectrum layout flags do not match between operands.
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    /// Operation requires a natural-order spectrum (zero frequency at (0,0)).
    #[error("operation requires natural spectrum layout, got centered")]
    CenteredLayout,

    /// Inverse transform left an imaginary residue above the acceptance threshold,
    /// meaning the spectrum was not that of a real tensor.
    #[error("inverse transform imaginary residue {residue:e} exceeds {limit:e}")]
    NonRealResult { residue: f64, limit: f64 },

    /// Iterative eigensolver did not converge. Diagnostic only; not expected
    /// for symmetric matrices of order <= 512.
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    /// Matrix violates the positive semi-definite precondition beyond tolerance.
    #[error("matrix not positive semi-definite (min eigenvalue {min_eigenvalue:e}, max {max_eigenvalue:e})")]
    NotPsd {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    /// Matrix is numerically zero where an inverse is required.
    #[error("matrix is numerically zero")]
    ZeroMatrix,

    /// A content channel variance is too small to normalize against.
    #[error("channel {channel} variance {variance:e} is degenerate")]
    DegenerateChannel { channel: usize, variance: f64 },

    /// Input smaller than the operation's minimum size.
    #[error("input too small: {0}")]
    TooSmall(String),

    /// A non-finite value was found where finite data is required.
    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),

    /// A configuration parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
