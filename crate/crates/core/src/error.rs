use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the computation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An observation falls outside the declared support (or is not finite).
    #[error("sample {index} = {value} lies outside the support [{a}, {b}]")]
    OutOfSupport {
        index: usize,
        value: f64,
        a: f64,
        b: f64,
    },

    #[error("no samples supplied")]
    NoSamples,

    /// The sample source ran dry before a stage reached its size.
    #[error("sample stream exhausted at stage {stage}: needed {needed} samples, got {available}")]
    Exhausted {
        stage: usize,
        needed: u64,
        available: u64,
    },

    #[error("invalid plan: {}", .0.join("; "))]
    InvalidPlan(Vec<String>),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
