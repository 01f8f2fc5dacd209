// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

/// Errors raised while loading workloads or evaluating the cost model.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: u64, reason: String },

    #[error("invalid layer `{layer}`: {reason}")]
    Validation { layer: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("chiplet index {index} out of range for {total} chiplets")]
    Index { index: u64, total: u64 },

    #[error("wrong interconnect kind: {0}")]
    Kind(String),

    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ModelError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        ModelError::Config(msg.into())
    }

    /// True for failures caused by the filesystem rather than by the inputs.
    pub fn is_io(&self) -> bool {
        matches!(self, ModelError::Io { .. })
    }
}
