use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model or grid parameter is outside its domain.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: String,
    },

    #[error("polynomial order {order} exceeds the supported cap {max}")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("non-finite argument passed to `{0}`")]
    NonFinite(&'static str),

    /// The heralding event cannot occur for these parameters.
    #[error("zero-probability event: {0}")]
    ZeroProbability(String),

    #[error("Mandel Q is undefined for a state with zero mean photon number")]
    UndefinedMandelQ,

    #[error("moment order k + l = {0} exceeds the supported degree 8")]
    DegreeOverflow(usize),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: impl ToString, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            reason: reason.into(),
        }
    }

    pub fn is_zero_probability(&self) -> bool {
        matches!(self, Error::ZeroProbability(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
