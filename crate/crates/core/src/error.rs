use std::path::PathBuf;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Domain,
    Parameter,
    Sequencing,
    Io,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: edge weight must be a positive finite number, got {weight}")]
    NonPositiveWeight { line: usize, weight: f64 },

    #[error("edge weight must be a positive finite number, got {weight} on {src} -> {dst}")]
    InvalidWeight { src: NodeId, dst: NodeId, weight: f64 },

    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: NodeId, dst: NodeId },

    #[error("node {0} already has a self-loop")]
    SelfLoopPresent(NodeId),

    #[error("node {0} has zero incoming weight")]
    ZeroIncomingWeight(NodeId),

    #[error("node {0} is not part of the snapshot")]
    UnknownNode(NodeId),

    #[error("snapshot has no nodes")]
    EmptySnapshot,

    #[error("snapshot stream is empty")]
    EmptyStream,

    #[error("expected time index {expected}, found {found}")]
    Sequencing { expected: u64, found: u64 },

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("invalid label distribution: {0}")]
    InvalidDistribution(String),

    #[error("node sets differ: {0}")]
    NodeSetMismatch(String),

    #[error("graph has zero total edge weight")]
    ZeroTotalWeight,

    #[error("{0}")]
    Domain(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } => ErrorKind::Parse,
            Error::InvalidParameter { .. } => ErrorKind::Parameter,
            Error::Sequencing { .. } => ErrorKind::Sequencing,
            Error::Io { .. } => ErrorKind::Io,
            _ => ErrorKind::Domain,
        }
    }

    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
