use thiserror::Error;

#[derive(Debug, Error)]
pub enum RepairError {
    #[error(transparent)]
    Localize(#[from] toylang::LocalizeError),
    #[error(transparent)]
    Aos(#[from] aos_core::AosError),
    #[error("invalid search configuration: {0}")]
    Config(String),
}
