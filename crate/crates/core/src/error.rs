use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max asymmetry {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("invalid subsystem specification: {0}")]
    InvalidSubsystems(String),

    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("unsupported dimension d = {d} for {family}; supported: {supported}")]
    UnsupportedDimension {
        d: usize,
        family: &'static str,
        supported: &'static str,
    },

    #[error("invalid construction: {0}")]
    InvalidConstruction(String),

    #[error("trace norm of X is {trace_norm}, expected 1")]
    TraceNorm { trace_norm: f64 },

    #[error("state is not invariant under the flip (residual {residual:e})")]
    NotFlipInvariant { residual: f64 },

    #[error("state is not metrologically useful: qfi {qfi} <= separable bound {bound}")]
    NotUseful { qfi: f64, bound: f64 },

    #[error("denominator <i[M,H]> vanishes ({value:e})")]
    VanishingSignal { value: f64 },

    #[error("not a PPT density matrix: trace residual {trace:e}, min eig {min_eig:e}, min eig of partial transpose {min_eig_pt:e}")]
    Infeasible {
        trace: f64,
        min_eig: f64,
        min_eig_pt: f64,
    },

    #[error("projection did not converge after {iterations} iterations (psd {psd:e}, ppt {ppt:e}, trace {trace:e})")]
    ProjectionNotConverged {
        iterations: usize,
        psd: f64,
        ppt: f64,
        trace: f64,
    },

    #[error("eigensolver did not converge: off-diagonal norm {off_norm:e} after {sweeps} sweeps")]
    EigenNotConverged { off_norm: f64, sweeps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
