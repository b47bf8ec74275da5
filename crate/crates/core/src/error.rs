use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("unknown {kind}: {id}")]
    Reference { kind: &'static str, id: String },
    #[error("insufficient funds: need {needed}, have {available}")]
    Funds {
        needed: crate::Money,
        available: crate::Money,
    },
    #[error("phase error: {0}")]
    Phase(String),
    #[error("news is disabled in this environment")]
    NewsDisabled,
    #[error("argument error: {0}")]
    Argument(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn unknown_sku(id: impl Into<String>) -> Self {
        Error::Reference {
            kind: "sku",
            id: id.into(),
        }
    }

    pub fn unknown_supplier(id: impl Into<String>) -> Self {
        Error::Reference {
            kind: "supplier",
            id: id.into(),
        }
    }
}
