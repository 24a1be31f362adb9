use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AosError {
    #[error("invalid configuration: `{field}` {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("arm {arm} out of range for a controller with {n_arms} arms")]
    ArmOutOfRange { arm: usize, n_arms: usize },

    #[error("flush_generation called on a controller that credits per mutation")]
    CadenceMisuse,

    #[error("malformed snapshot at line {line}: {reason}")]
    Snapshot { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, AosError>;
