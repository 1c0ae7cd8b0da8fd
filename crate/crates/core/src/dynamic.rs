//! Incremental detection over a stream of snapshots.
//!
//! Between consecutive snapshots only changed and newborn nodes are
//! reinitialized and allowed to accept new rows. Every other node carries its
//! row over unchanged and merely feeds its neighbors during propagation.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{add_self_loops, diff_snapshots, NodeId, Snapshot, SnapshotDelta};
use crate::labelprop::{
    extract_communities, init_row, iterate, run_labelrank, CommunityAssignment, LabelState,
    Params, SweepStats,
};

/// Detection state after processing one snapshot.
#[derive(Debug, Clone)]
pub struct StreamState {
    time_index: u64,
    state: LabelState,
    snapshot: Snapshot,
    assignment: CommunityAssignment,
}

/// Telemetry of one processed snapshot.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub time_index: u64,
    pub assignment: CommunityAssignment,
    pub stats: SweepStats,
    /// Nodes allowed to update (all nodes for the first snapshot).
    pub active_nodes: usize,
    pub mean_row_len: f64,
}

/// A single-arc modification, applied as a one-arc-difference snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeChange {
    /// Inserts `src -> dst` or replaces its weight.
    Upsert { src: NodeId, dst: NodeId, weight: f64 },
    Remove { src: NodeId, dst: NodeId },
}

impl StreamState {
    /// Full static run on the first snapshot of a stream.
    pub fn start(snapshot: &Snapshot, params: &Params) -> Result<(StreamState, SweepStats)> {
        let run = run_labelrank(snapshot, params)?;
        let stats = run.stats;
        Ok((
            StreamState {
                time_index: snapshot.time_index(),
                state: run.state,
                snapshot: run.snapshot,
                assignment: run.assignment,
            },
            stats,
        ))
    }

    pub fn time_index(&self) -> u64 {
        self.time_index
    }

    pub fn state(&self) -> &LabelState {
        &self.state
    }

    /// The processed snapshot, self-loops included.
    pub fn snapshot(&self) -> &Snapshot {
        &self.snapshot
    }

    pub fn assignment(&self) -> &CommunityAssignment {
        &self.assignment
    }

    /// Moves to the next snapshot, updating only what changed.
    pub fn step(&self, cur: &Snapshot, params: &Params) -> Result<(StreamState, StepOutcome)> {
        let looped = self.prepare(cur, params)?;
        let delta = diff_snapshots(&self.snapshot, &looped)?;
        self.advance(looped, &delta, params)
    }

    /// Like [`step`](Self::step) but with a caller-supplied delta, e.g.
    /// [`SnapshotDelta::all_changed`].
    pub fn step_with_delta(
        &self,
        cur: &Snapshot,
        delta: &SnapshotDelta,
        params: &Params,
    ) -> Result<(StreamState, StepOutcome)> {
        let looped = self.prepare(cur, params)?;
        self.advance(looped, delta, params)
    }

    /// Applies one arc change as its own snapshot at the next time index.
    pub fn apply_edge_change(
        &self,
        change: EdgeChange,
        params: &Params,
    ) -> Result<(StreamState, StepOutcome)> {
        let raw = self.snapshot.strip_self_loops();
        let mut edges: Vec<(NodeId, NodeId, f64)> = raw.edges().collect();
        match change {
            EdgeChange::Upsert { src, dst, weight } => {
                if src == dst {
                    return Err(Error::Domain(format!("self-loop {src} -> {dst} in input data")));
                }
                match edges.iter_mut().find(|e| e.0 == src && e.1 == dst) {
                    Some(e) => e.2 = weight,
                    None => edges.push((src, dst, weight)),
                }
            }
            EdgeChange::Remove { src, dst } => {
                let before = edges.len();
                edges.retain(|e| !(e.0 == src && e.1 == dst));
                if edges.len() == before {
                    return Err(Error::Domain(format!("no edge {src} -> {dst} to remove")));
                }
            }
        }
        let next = Snapshot::from_edges(
            self.time_index + 1,
            edges,
            raw.nodes().iter().copied(),
        )?;
        self.step(&next, params)
    }

    fn prepare(&self, cur: &Snapshot, params: &Params) -> Result<Snapshot> {
        params.validate()?;
        if cur.time_index() != self.time_index + 1 {
            return Err(Error::Sequencing {
                expected: self.time_index + 1,
                found: cur.time_index(),
            });
        }
        if cur.is_empty() {
            return Err(Error::EmptySnapshot);
        }
        add_self_loops(cur, params.self_loop)
    }

    fn advance(
        &self,
        looped: Snapshot,
        delta: &SnapshotDelta,
        params: &Params,
    ) -> Result<(StreamState, StepOutcome)> {
        let nodes = looped.nodes();
        let mut rows = Vec::with_capacity(nodes.len());
        let mut active = Vec::new();
        for (i, &node) in nodes.iter().enumerate() {
            let carried = if delta.changed.contains(&node) || delta.born.contains(&node) {
                None
            } else {
                let prev = self
                    .state
                    .row(node)
                    .ok_or_else(|| Error::Domain(format!("node {node} has no carried row")))?;
                if delta.dead.is_empty() {
                    Some(prev.clone())
                } else {
                    prev.retain_labels(|l| !delta.dead.contains(&l))
                }
            };
            match carried {
                Some(row) => rows.push(row),
                // changed, born, or every label it held has died
                None => {
                    rows.push(init_row(&looped, i)?);
                    active.push(i);
                }
            }
        }
        if params.expand_active {
            let mut grown: BTreeSet<usize> = active.iter().copied().collect();
            for &i in &active {
                grown.extend(looped.neighbor_indices(i));
            }
            active = grown.into_iter().collect();
        }

        let mut state = LabelState::from_parts(nodes.to_vec(), rows);
        let stats = iterate(&looped, &mut state, &active, params);
        let assignment = extract_communities(&state);
        let outcome = StepOutcome {
            time_index: looped.time_index(),
            assignment: assignment.clone(),
            stats,
            active_nodes: active.len(),
            mean_row_len: state.mean_row_len(),
        };
        Ok((
            StreamState {
                time_index: looped.time_index(),
                state,
                snapshot: looped,
                assignment,
            },
            outcome,
        ))
    }
}

/// Convenience driver that owns the current [`StreamState`].
#[derive(Debug, Clone)]
pub struct IncrementalDetector {
    params: Params,
    current: Option<StreamState>,
}

impl IncrementalDetector {
    pub fn new(params: Params) -> Self {
        IncrementalDetector {
            params,
            current: None,
        }
    }

    pub fn current(&self) -> Option<&StreamState> {
        self.current.as_ref()
    }

    /// Processes the next snapshot; the first one gets a full static run.
    pub fn push(&mut self, snapshot: &Snapshot) -> Result<StepOutcome> {
        let (next, outcome) = match &self.current {
            None => {
                if snapshot.time_index() != 0 {
                    return Err(Error::Sequencing {
                        expected: 0,
                        found: snapshot.time_index(),
                    });
                }
                let (state, stats) = StreamState::start(snapshot, &self.params)?;
                let outcome = StepOutcome {
                    time_index: state.time_index,
                    assignment: state.assignment.clone(),
                    stats,
                    active_nodes: state.snapshot.node_count(),
                    mean_row_len: state.state.mean_row_len(),
                };
                (state, outcome)
            }
            Some(prev) => prev.step(snapshot, &self.params)?,
        };
        self.current = Some(next);
        Ok(outcome)
    }
}

/// Runs the incremental detector over a whole stream.
pub fn run_stream(snapshots: &[Snapshot], params: &Params) -> Result<Vec<StepOutcome>> {
    if snapshots.is_empty() {
        return Err(Error::EmptyStream);
    }
    let mut detector = IncrementalDetector::new(params.clone());
    snapshots.iter().map(|s| detector.push(s)).collect()
}
