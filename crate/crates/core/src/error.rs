use thiserror::Error;

/// Problems found while reading or validating a charging network.
#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("malformed network file: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("{location}: cannot parse number {text:?}")]
    BadNumber { location: String, text: String },
    #[error("{location}: {reason}")]
    Thresholds { location: String, reason: String },
    #[error("{location}: {expected} intervals but {speeds} speeds and {prices} prices")]
    LengthMismatch {
        location: String,
        expected: usize,
        speeds: usize,
        prices: usize,
    },
    #[error("{location}: duplicate node label {label:?}")]
    DuplicateNode { location: String, label: String },
    #[error("{location}: unknown node {label:?}")]
    UnknownNode { location: String, label: String },
    #[error("{location}: {field} must be non-negative")]
    Negative { location: String, field: &'static str },
    #[error("{location}: battery capacity must be positive")]
    Battery { location: String },
    #[error("{location}: station at origin/destination node {node:?}")]
    StationAtOdNode { location: String, node: String },
    #[error("{location}: origin and destination are both {node:?}")]
    DegenerateOdPair { location: String, node: String },
}
