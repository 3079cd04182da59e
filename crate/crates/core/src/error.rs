use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group orders differ: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },
    #[error("group order must be at least 2, got {0}")]
    InvalidOrder(u64),
    #[error("digit {digit} out of range for order {order}")]
    InvalidDigit { digit: u32, order: u32 },
    #[error("radius must be at least 1")]
    ZeroRadius,
    #[error("enumeration of {requested} elements exceeds the cap of {cap}")]
    EnumerationCap { requested: u128, cap: u64 },
    #[error("invalid walk spec: {0}")]
    InvalidSpec(String),
    #[error("jump law is not normalizable: {0}")]
    Divergence(String),
    #[error("derived jump probability r_{k} = {value:e} is not positive")]
    InvalidKernel { k: usize, value: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no certificate either way: {0}")]
    Indeterminate(String),
    #[error("solver failure: residual {residual:e} exceeds {tolerance:e}; refine the grid")]
    SolverFailure { residual: f64, tolerance: f64 },
}
