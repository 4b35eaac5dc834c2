use std::io;

use thiserror::Error;

/// Identifies one block of a wavelet pyramid: the coarsest smooth block or
/// the detail block of a given level (1 = finest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum BlockTag {
    Smooth,
    Detail(usize),
}

impl std::fmt::Display for BlockTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BlockTag::Smooth => write!(f, "s"),
            BlockTag::Detail(j) => write!(f, "d{j}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range (valid 1..={len})")]
    Index { index: usize, len: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{levels} wavelet level(s) require 2^{levels} to divide p = {p}")]
    Level { levels: usize, p: usize },

    #[error("rank {rank} out of range (valid 1..={max})")]
    Rank { rank: usize, max: usize },

    #[error("singular wavelet-domain slice at block {block}, slice {slice} (condition estimate {condition:e})")]
    SingularSlice {
        block: BlockTag,
        slice: usize,
        condition: f64,
    },

    #[error("matrix is not orthogonal: |QᵀQ - I| = {deviation:e}")]
    Orthogonality { deviation: f64 },

    #[error("invalid tensor file at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn format(offset: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: msg.into(),
        }
    }
}
