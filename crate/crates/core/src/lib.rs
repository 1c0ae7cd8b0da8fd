//! Community detection by stabilized label propagation on weighted, directed
//! graphs, with an incremental driver for snapshot streams.
//!
//! * [`graph`]: snapshots, edge-list IO, self-loops, snapshot deltas
//! * [`labelprop`]: label rows, the four operators, static detection
//! * [`dynamic`]: incremental detection across snapshots
//! * [`metrics`]: modularity, community sizes, Rand index
//! * [`synthgen`]: seeded planted-partition streams with evolution events

pub mod dynamic;
pub mod error;
pub mod graph;
pub mod labelprop;
pub mod metrics;
pub mod synthgen;

pub use error::{Error, ErrorKind, Result};
pub use graph::{NodeId, SelfLoopMode, Snapshot, SnapshotDelta};
pub use labelprop::{CommunityAssignment, LabelDistribution, LabelState, Params};
