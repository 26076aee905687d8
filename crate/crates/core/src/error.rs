use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the range where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The conditioning event has zero measure under the current state.
    #[error("conditioning error: {0}")]
    Conditioning(String),
    /// Quadrature failed to reach the requested tolerance.
    #[error("numeric error: {what} (residual {residual:e})")]
    Numeric { what: String, residual: f64 },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("inconsistent data: {0}")]
    InconsistentData(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
