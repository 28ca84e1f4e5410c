use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("offer `{id}`: reliability {value} outside [0, 1)")]
    Reliability { id: String, value: f64 },
    #[error("offer `{id}`: volume must be positive, got {value}")]
    Volume { id: String, value: f64 },
    #[error("offer `{id}`: price must be nonnegative, got {value}")]
    Price { id: String, value: f64 },
    #[error("offer id must not be empty")]
    EmptyId,
    #[error("duplicate offer id `{0}`")]
    DuplicateId(String),
    #[error("no offers")]
    NoOffers,
    #[error("probability {0} outside {1}")]
    Probability(f64, &'static str),
    #[error("invalid requirement: {0}")]
    Requirement(String),
    #[error("unknown offer id `{0}`")]
    UnknownOffer(String),
    #[error("block {block}: {detail}")]
    BlockInvariant { block: usize, detail: String },
}
