use std::collections::BTreeMap;

use super::distribution::{cutoff, inflate_unchecked, LabelDistribution};
use super::state::{extract_communities, init_distribution, CommunityAssignment, LabelState};
use super::Params;
use crate::error::{Error, Result};
use crate::graph::{add_self_loops, NodeId, Snapshot};

const UPDATE_SLACK: f64 = 1e-9;

/// Why an iteration loop ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// There was nothing to update.
    NoActiveNodes,
    /// No node accepted its new row in the last iteration.
    NoUpdates,
    /// The community count held steady for `stall_iters` iterations.
    Stalled,
    /// `max_iters` was reached.
    MaxIters,
}

/// Counters from one run of the iteration loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepStats {
    pub iterations: usize,
    /// Distinct nodes that accepted at least one new row.
    pub updated_nodes: usize,
    /// Neighbor rows read while propagating, summed over all iterations.
    pub row_ops: u64,
    pub stop: StopReason,
}

/// Result of a static run.
#[derive(Debug, Clone)]
pub struct LabelRankRun {
    /// The input snapshot with the self-loops the run added.
    pub snapshot: Snapshot,
    pub state: LabelState,
    pub assignment: CommunityAssignment,
    pub stats: SweepStats,
}

impl LabelRankRun {
    pub fn iterations(&self) -> usize {
        self.stats.iterations
    }
}

/// New rows for `active` nodes, each the weighted average of its
/// in-neighbors' rows. All rows are read from `state`, never from the output.
pub fn propagate(
    snapshot: &Snapshot,
    state: &LabelState,
    active: &[NodeId],
) -> Result<BTreeMap<NodeId, LabelDistribution>> {
    state.ensure_aligned(snapshot)?;
    let mut scratch = Vec::new();
    let mut out = BTreeMap::new();
    for &node in active {
        let i = snapshot.index_of(node).ok_or(Error::UnknownNode(node))?;
        if snapshot.in_adj(i).is_empty() {
            return Err(Error::ZeroIncomingWeight(node));
        }
        out.insert(node, propagate_row(snapshot, state, i, &mut scratch));
    }
    Ok(out)
}

pub(crate) fn propagate_row(
    snapshot: &Snapshot,
    state: &LabelState,
    i: usize,
    scratch: &mut Vec<(NodeId, f64)>,
) -> LabelDistribution {
    scratch.clear();
    for arc in snapshot.in_adj(i) {
        for &(label, p) in state.row_at(arc.idx).entries() {
            scratch.push((label, arc.weight * p));
        }
    }
    // stable: equal labels keep in-neighbor order, so sums are reproducible
    scratch.sort_by_key(|e| e.0);
    let mut merged: Vec<(NodeId, f64)> = Vec::with_capacity(scratch.len());
    for &(label, mass) in scratch.iter() {
        match merged.last_mut() {
            Some(last) if last.0 == label => last.1 += mass,
            _ => merged.push((label, mass)),
        }
    }
    LabelDistribution::from_sorted_masses(merged)
}

fn is_subset(small: &[NodeId], large: &[NodeId]) -> bool {
    if small.len() > large.len() {
        return false;
    }
    let mut it = large.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

/// Whether node `i` may take a new row: at most `q * k_i` neighbors have a
/// maximal-label set containing that of `i`.
fn accepts(state: &LabelState, i: usize, neighbors: &[usize], q: f64) -> bool {
    let own = state.max_set_at(i);
    let similar = neighbors
        .iter()
        .filter(|&&j| is_subset(own, state.max_set_at(j)))
        .count();
    similar as f64 <= q * neighbors.len() as f64 + UPDATE_SLACK
}

/// Applies the update rule to `active` nodes. Acceptance is judged on the
/// maximal-label sets of `state`, before any row changes.
pub fn conditional_update(
    state: &LabelState,
    candidates: &BTreeMap<NodeId, LabelDistribution>,
    snapshot: &Snapshot,
    q: f64,
    active: &[NodeId],
) -> Result<(LabelState, usize)> {
    state.ensure_aligned(snapshot)?;
    let mut accepted = Vec::new();
    for &node in active {
        let i = snapshot.index_of(node).ok_or(Error::UnknownNode(node))?;
        let candidate = candidates
            .get(&node)
            .ok_or_else(|| Error::Domain(format!("no candidate row for node {node}")))?;
        if accepts(state, i, &snapshot.neighbor_indices(i), q) {
            accepted.push((i, candidate.clone()));
        }
    }
    let count = accepted.len();
    let mut next = state.clone();
    for (i, row) in accepted {
        next.set_row(i, row);
    }
    Ok((next, count))
}

fn community_count(state: &LabelState, active: &[usize]) -> usize {
    let mut labels: Vec<NodeId> = active.iter().map(|&i| state.community_label_at(i)).collect();
    labels.sort_unstable();
    labels.dedup();
    labels.len()
}

/// The propagate / inflate / cutoff / conditional-update loop over `active`
/// (positions in `snapshot`, ascending). Nodes outside `active` keep their
/// rows and only feed their neighbors.
pub(crate) fn iterate(
    snapshot: &Snapshot,
    state: &mut LabelState,
    active: &[usize],
    params: &Params,
) -> SweepStats {
    let mut stats = SweepStats {
        iterations: 0,
        updated_nodes: 0,
        row_ops: 0,
        stop: StopReason::NoActiveNodes,
    };
    if active.is_empty() {
        return stats;
    }
    let neighbors: Vec<Vec<usize>> = active
        .iter()
        .map(|&i| snapshot.neighbor_indices(i))
        .collect();
    let mut ever_updated = vec![false; active.len()];
    let mut scratch = Vec::new();
    let mut prev_count = community_count(state, active);
    let mut stall = 0;

    for iteration in 1..=params.max_iters {
        stats.iterations = iteration;
        // Rejected candidates are discarded, so only accepting nodes need
        // their rows propagated.
        let accepting: Vec<usize> = (0..active.len())
            .filter(|&k| accepts(state, active[k], &neighbors[k], params.q))
            .collect();
        let mut fresh = Vec::with_capacity(accepting.len());
        for &k in &accepting {
            let i = active[k];
            stats.row_ops += snapshot.in_adj(i).len() as u64;
            let row = propagate_row(snapshot, state, i, &mut scratch);
            let row = inflate_unchecked(&row, params.inflation);
            fresh.push(cutoff(&row, params.cutoff));
        }
        for (&k, row) in accepting.iter().zip(fresh) {
            state.set_row(active[k], row);
            ever_updated[k] = true;
        }

        if accepting.is_empty() {
            stats.stop = StopReason::NoUpdates;
            break;
        }
        let count = community_count(state, active);
        if count == prev_count {
            stall += 1;
        } else {
            stall = 0;
        }
        prev_count = count;
        if stall >= params.stall_iters {
            stats.stop = StopReason::Stalled;
            break;
        }
        stats.stop = StopReason::MaxIters;
    }
    stats.updated_nodes = ever_updated.iter().filter(|&&u| u).count();
    stats
}

/// Static detection on one snapshot.
pub fn run_labelrank(snapshot: &Snapshot, params: &Params) -> Result<LabelRankRun> {
    params.validate()?;
    if snapshot.is_empty() {
        return Err(Error::EmptySnapshot);
    }
    let looped = add_self_loops(snapshot, params.self_loop)?;
    let mut state = init_distribution(&looped)?;
    let all: Vec<usize> = (0..looped.node_count()).collect();
    let stats = iterate(&looped, &mut state, &all, params);
    let assignment = extract_communities(&state);
    Ok(LabelRankRun {
        snapshot: looped,
        state,
        assignment,
        stats,
    })
}
