use thiserror::Error;

use crate::birational::BirError;
use crate::equivariant::EquivError;
use crate::ring::RingError;
use crate::strata::{StrataError, ValidationReport};
use crate::toric::ToricError;
use crate::volume::VolumeError;

/// Crate-level error with the process exit code each failure maps to.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema: {0}")]
    Schema(String),
    #[error("validation failed: {0}")]
    Validation(ValidationReport),
    #[error("{0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
    #[error("corpus mismatch: {0}")]
    CorpusMismatch(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Bir(#[from] BirError),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Strata(StrataError),
    #[error(transparent)]
    Volume(VolumeError),
    #[error(transparent)]
    Equiv(EquivError),
}

impl From<StrataError> for Error {
    fn from(e: StrataError) -> Self {
        match e {
            StrataError::Invalid(r) => Error::Validation(r),
            StrataError::Bir(b) => Error::Bir(b),
            other => Error::Strata(other),
        }
    }
}

impl From<VolumeError> for Error {
    fn from(e: VolumeError) -> Self {
        match e {
            VolumeError::Bir(b) => Error::Bir(b),
            VolumeError::Strata(s) => s.into(),
            other => Error::Volume(other),
        }
    }
}

impl From<EquivError> for Error {
    fn from(e: EquivError) -> Self {
        match e {
            EquivError::Strata(s) => s.into(),
            EquivError::Volume(v) => v.into(),
            other => Error::Equiv(other),
        }
    }
}

impl Error {
    /// 1 for a corpus mismatch, 3 when the merge search exceeds its budget,
    /// 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CorpusMismatch(_) => 1,
            Error::Bir(BirError::SearchBudget { .. }) => 3,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            Error::Schema(_) => "schema",
            Error::Validation(_) => "validation",
            Error::Usage(_) => "usage",
            Error::Io(_) => "io",
            Error::CorpusMismatch(_) => "corpus_mismatch",
            Error::Bir(BirError::SearchBudget { .. }) => "budget",
            Error::Ring(_) | Error::Bir(_) | Error::Toric(_) => "math",
            Error::Strata(_) | Error::Volume(_) | Error::Equiv(_) => "math",
        };
        let mut out = serde_json::json!({ "error": kind, "message": self.to_string() });
        if let Error::Validation(r) = self {
            out["issues"] = serde_json::to_value(&r.issues).expect("issues serialize");
        }
        out
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
