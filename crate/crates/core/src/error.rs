use thiserror::Error;

/// Errors raised by the coherence toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("entry count {got} does not match shape {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: relative asymmetry {defect:.3e}")]
    NonHermitian { defect: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("invalid subsystem dimensions: {0}")]
    InvalidDims(String),

    #[error("invalid subsystem permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("parameter `{name}` = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("witness diagonal entry {index} is {value:.3e}, expected zero")]
    DiagonalNotZero { index: usize, value: f64 },

    #[error("witness is negative on the incoherent basis state {index} (diagonal {value:.3e})")]
    NegativeOnIncoherent { index: usize, value: f64 },

    #[error("witness expectation on random incoherent state (seed {seed}) is {value:.3e}, expected zero")]
    NonzeroOnIncoherent { seed: u64, value: f64 },

    #[error("trace of Hermitian product has imaginary part {0:.3e}")]
    NonRealTrace(f64),

    #[error("witness spectrum is degenerate (lambda_max - lambda_min = {0:.3e})")]
    DegenerateSpectrum(f64),

    #[error("invalid wiring: {0}")]
    WiringInvalid(String),

    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimTooLarge { dim: usize, max: usize },

    #[error("f - g does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
