use thiserror::Error;

/// Errors for the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (dim {dim}, Frobenius norm {norm:.6e})"
    )]
    EighNoConvergence {
        dim: usize,
        norm: f64,
        sweeps: usize,
    },

    #[error("scalar function undefined at eigenvalue {eigenvalue}")]
    FnDomain { eigenvalue: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.6e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("state is not faithful (min eigenvalue {min_eigenvalue:.6e})")]
    NotFaithful { min_eigenvalue: f64 },

    #[error("numeric degradation: imaginary residue {imag:.6e} above threshold")]
    NumericDegradation { imag: f64 },

    #[error("trace is not normalized (got {trace})")]
    NotNormalized { trace: f64 },

    #[error("exponent magnitude {max_exponent:.3e} exceeds the overflow threshold")]
    Overflow { max_exponent: f64 },

    #[error("evaluation at a saturated (infinite) point")]
    Saturated,

    #[error(
        "optimizer did not converge after {iterations} iterations (gradient norm {grad_norm:.3e})"
    )]
    NotConverged { iterations: usize, grad_norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
