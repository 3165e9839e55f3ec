use thiserror::Error;

/// Failures raised by index construction and queries.
///
/// `Usage` covers violated preconditions (bad rank, dimension mismatch,
/// zero weight vector). `Data` covers inputs that are well-formed but
/// unusable, such as non-finite coordinates or duplicate points where the
/// structure needs distinct ones.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn data(msg: impl Into<String>) -> Error {
    Error::Data(msg.into())
}
