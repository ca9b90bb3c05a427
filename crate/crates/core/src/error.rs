use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("config key `{key}`: cannot parse `{value}` ({reason})")]
    Parse {
        key: String,
        value: String,
        reason: String,
    },

    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("policy {policy} requires the training phase but no quality matrix was supplied")]
    MissingQuality { policy: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
