use thiserror::Error;

/// Errors raised by the library.
///
/// `Input` covers malformed arguments (bad indices, sizes out of range),
/// `Domain` covers values outside a formula's region of validity, and
/// `Capacity` is raised when an exhaustive search would be too large.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Domain(_) => "domain",
            Error::Capacity(_) => "capacity",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)*) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($arg)*)));
        }
    };
}
pub(crate) use ensure;
