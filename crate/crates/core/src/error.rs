use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at sample {sample}, column {column}")]
    NonFinite { sample: usize, column: usize },

    #[error("label {label} at sample {sample} is not 0 or 1")]
    InvalidLabel { sample: usize, label: u8 },

    #[error("training data must contain both classes")]
    SingleClass,

    #[error("empty sample set")]
    EmptyView,

    #[error("histograms do not share bin edges")]
    EdgeMismatch,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
