//! Label distributions and the four LabelRank operators.
//!
//! Each node holds a sparse probability row over labels (labels are node
//! ids). One iteration propagates rows along incoming arcs, sharpens them by
//! inflation, prunes small entries by cutoff, and lets a node keep the new
//! row only when its best labels are not already shared by most of its
//! neighbors. Communities are read off the best label of each row.

mod distribution;
mod engine;
mod state;

pub use distribution::{cutoff, inflate, max_label_set, LabelDistribution, MAX_TIE_TOLERANCE};
pub use engine::{
    conditional_update, propagate, run_labelrank, LabelRankRun, StopReason, SweepStats,
};
pub use state::{extract_communities, init_distribution, CommunityAssignment, LabelState};

pub(crate) use engine::iterate;
pub(crate) use state::init_row;

use crate::error::{Error, Result};
use crate::graph::SelfLoopMode;

/// Algorithm configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    /// Inflation exponent, at least 1.
    pub inflation: f64,
    /// Cutoff threshold in `[0, 1)`.
    pub cutoff: f64,
    /// Conditional-update parameter in `[0, 1]`.
    pub q: f64,
    pub self_loop: SelfLoopMode,
    pub max_iters: usize,
    /// Stop once the community count is unchanged for this many iterations.
    pub stall_iters: usize,
    /// Incremental runs only: also let the direct neighbors of changed nodes
    /// accept updates. Off by default.
    pub expand_active: bool,
}

impl Params {
    pub const DEFAULT_CUTOFF: f64 = 0.1;
    pub const DEFAULT_Q: f64 = 0.5;
    pub const DEFAULT_MAX_ITERS: usize = 50;
    pub const DEFAULT_STALL_ITERS: usize = 5;

    /// Defaults for everything except the inflation exponent, which has no
    /// sensible universal value.
    pub fn new(inflation: f64) -> Self {
        Params {
            inflation,
            cutoff: Self::DEFAULT_CUTOFF,
            q: Self::DEFAULT_Q,
            self_loop: SelfLoopMode::Unit,
            max_iters: Self::DEFAULT_MAX_ITERS,
            stall_iters: Self::DEFAULT_STALL_ITERS,
            expand_active: false,
        }
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_self_loop(mut self, mode: SelfLoopMode) -> Self {
        self.self_loop = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inflation.is_finite() && self.inflation >= 1.0) {
            return Err(Error::param("inflation", format!("must be >= 1, got {}", self.inflation)));
        }
        if !(0.0..1.0).contains(&self.cutoff) {
            return Err(Error::param("cutoff", format!("must be in [0, 1), got {}", self.cutoff)));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::param("q", format!("must be in [0, 1], got {}", self.q)));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be positive"));
        }
        if self.stall_iters == 0 {
            return Err(Error::param("stall_iters", "must be positive"));
        }
        Ok(())
    }
}
