//! Weighted directed graph snapshots.
//!
//! A [`Snapshot`] stores its nodes in ascending [`NodeId`] order together with
//! per-node incoming and outgoing adjacency lists. Adjacency entries refer to
//! positions in the node list and are kept sorted, so iteration order is a
//! function of node ids alone.

mod io;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

pub use io::{
    load_snapshot, load_stream, parse_stream, read_snapshot_file, snapshot_file_name,
    write_snapshot, write_snapshot_file,
};

/// Stable node identifier, shared by every snapshot in a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for NodeId {
    fn from(v: u64) -> Self {
        NodeId(v)
    }
}

/// One adjacency entry: position of the neighbor in the snapshot's node list
/// and the positive weight of the arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Adj {
    pub idx: usize,
    pub weight: f64,
}

/// How the artificial self-loop weight of each node is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfLoopMode {
    /// `w_ii = 1`.
    #[default]
    Unit,
    /// `w_ii` is the largest incoming weight.
    MaxIncident,
    /// `w_ii` is the total incoming weight.
    SumIncident,
}

/// A weighted directed graph observed at one time index.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    time_index: u64,
    nodes: Vec<NodeId>,
    in_adj: Vec<Vec<Adj>>,
    out_adj: Vec<Vec<Adj>>,
}

impl Snapshot {
    /// Builds a snapshot from `(src, dst, weight)` arcs. Every arc endpoint
    /// becomes a node; `extra_nodes` adds nodes that may have no arcs at all.
    pub fn from_edges<E, N>(time_index: u64, edges: E, extra_nodes: N) -> Result<Self>
    where
        E: IntoIterator<Item = (NodeId, NodeId, f64)>,
        N: IntoIterator<Item = NodeId>,
    {
        let edges: Vec<(NodeId, NodeId, f64)> = edges.into_iter().collect();
        let mut nodes: Vec<NodeId> = extra_nodes.into_iter().collect();
        for &(src, dst, weight) in &edges {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidWeight { src, dst, weight });
            }
            nodes.push(src);
            nodes.push(dst);
        }
        nodes.sort_unstable();
        nodes.dedup();

        let n = nodes.len();
        let mut in_adj = vec![Vec::new(); n];
        let mut out_adj = vec![Vec::new(); n];
        for &(src, dst, weight) in &edges {
            let s = position(&nodes, src);
            let d = position(&nodes, dst);
            out_adj[s].push(Adj { idx: d, weight });
            in_adj[d].push(Adj { idx: s, weight });
        }
        for (i, list) in out_adj.iter_mut().enumerate() {
            list.sort_by_key(|a| a.idx);
            if let Some(w) = list.windows(2).find(|w| w[0].idx == w[1].idx) {
                return Err(Error::DuplicateEdge {
                    src: nodes[i],
                    dst: nodes[w[0].idx],
                });
            }
        }
        for list in in_adj.iter_mut() {
            list.sort_by_key(|a| a.idx);
        }

        Ok(Snapshot {
            time_index,
            nodes,
            in_adj,
            out_adj,
        })
    }

    pub fn empty(time_index: u64) -> Self {
        Snapshot {
            time_index,
            nodes: Vec::new(),
            in_adj: Vec::new(),
            out_adj: Vec::new(),
        }
    }

    pub fn time_index(&self) -> u64 {
        self.time_index
    }

    pub fn with_time_index(mut self, time_index: u64) -> Self {
        self.time_index = time_index;
        self
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of stored arcs, self-loops included.
    pub fn arc_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.index_of(node).is_some()
    }

    pub fn index_of(&self, node: NodeId) -> Option<usize> {
        self.nodes.binary_search(&node).ok()
    }

    /// Incoming arcs of `node` as `(source, weight)`, ascending by source.
    pub fn in_edges(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let list = self.index_of(node).map_or(&[][..], |i| &self.in_adj[i][..]);
        list.iter().map(move |a| (self.nodes[a.idx], a.weight))
    }

    /// Outgoing arcs of `node` as `(target, weight)`, ascending by target.
    pub fn out_edges(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let list = self.index_of(node).map_or(&[][..], |i| &self.out_adj[i][..]);
        list.iter().map(move |a| (self.nodes[a.idx], a.weight))
    }

    /// Weight of the arc `src -> dst`, if present.
    pub fn weight(&self, src: NodeId, dst: NodeId) -> Option<f64> {
        let s = self.index_of(src)?;
        let d = self.index_of(dst)?;
        let list = &self.out_adj[s];
        list.binary_search_by_key(&d, |a| a.idx)
            .ok()
            .map(|k| list[k].weight)
    }

    /// All arcs as `(src, dst, weight)`, ordered by `(src, dst)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.out_adj.iter().enumerate().flat_map(move |(s, list)| {
            list.iter()
                .map(move |a| (self.nodes[s], self.nodes[a.idx], a.weight))
        })
    }

    pub fn has_self_loops(&self) -> bool {
        self.out_adj
            .iter()
            .enumerate()
            .any(|(i, list)| list.iter().any(|a| a.idx == i))
    }

    /// Copy of the snapshot without any `i -> i` arcs. Nodes are kept.
    pub fn strip_self_loops(&self) -> Snapshot {
        let strip = |lists: &[Vec<Adj>]| -> Vec<Vec<Adj>> {
            lists
                .iter()
                .enumerate()
                .map(|(i, list)| list.iter().copied().filter(|a| a.idx != i).collect())
                .collect()
        };
        Snapshot {
            time_index: self.time_index,
            nodes: self.nodes.clone(),
            in_adj: strip(&self.in_adj),
            out_adj: strip(&self.out_adj),
        }
    }

    /// Distinct neighbors of `node` in either direction, self excluded.
    /// This is the neighborhood used by the conditional update.
    pub fn neighbors(&self, node: NodeId) -> Vec<NodeId> {
        match self.index_of(node) {
            Some(i) => self
                .neighbor_indices(i)
                .into_iter()
                .map(|j| self.nodes[j])
                .collect(),
            None => Vec::new(),
        }
    }

    /// Every arc weight replaced by 1.0, direction kept.
    pub fn binarize(&self) -> Snapshot {
        let unit = |lists: &[Vec<Adj>]| -> Vec<Vec<Adj>> {
            lists
                .iter()
                .map(|list| {
                    list.iter()
                        .map(|a| Adj {
                            idx: a.idx,
                            weight: 1.0,
                        })
                        .collect()
                })
                .collect()
        };
        Snapshot {
            time_index: self.time_index,
            nodes: self.nodes.clone(),
            in_adj: unit(&self.in_adj),
            out_adj: unit(&self.out_adj),
        }
    }

    pub(crate) fn in_adj(&self, i: usize) -> &[Adj] {
        &self.in_adj[i]
    }

    pub(crate) fn out_adj(&self, i: usize) -> &[Adj] {
        &self.out_adj[i]
    }

    /// Sorted union of in- and out-neighbor positions of `i`, excluding `i`.
    pub(crate) fn neighbor_indices(&self, i: usize) -> Vec<usize> {
        let (ins, outs) = (&self.in_adj[i], &self.out_adj[i]);
        let mut merged = Vec::with_capacity(ins.len() + outs.len());
        let (mut a, mut b) = (0, 0);
        while a < ins.len() || b < outs.len() {
            let next = match (ins.get(a), outs.get(b)) {
                (Some(x), Some(y)) if x.idx == y.idx => {
                    a += 1;
                    b += 1;
                    x.idx
                }
                (Some(x), Some(y)) if x.idx < y.idx => {
                    a += 1;
                    x.idx
                }
                (Some(_), Some(y)) => {
                    b += 1;
                    y.idx
                }
                (Some(x), None) => {
                    a += 1;
                    x.idx
                }
                (None, Some(y)) => {
                    b += 1;
                    y.idx
                }
                (None, None) => unreachable!(),
            };
            if next != i {
                merged.push(next);
            }
        }
        merged
    }
}

fn position(nodes: &[NodeId], node: NodeId) -> usize {
    nodes
        .binary_search(&node)
        .expect("node list is built from every endpoint")
}

/// Makes every arc reciprocal. With `binarize` all weights become 1.0;
/// otherwise a pair present in both directions gets the sum of both weights.
pub fn symmetrize(snapshot: &Snapshot, binarize: bool) -> Snapshot {
    let mut edges = Vec::with_capacity(2 * snapshot.arc_count());
    for (src, dst, w) in snapshot.edges() {
        if src == dst {
            edges.push((src, dst, if binarize { 1.0 } else { w }));
            continue;
        }
        let back = snapshot.weight(dst, src);
        let weight = match (binarize, back) {
            (true, _) => 1.0,
            (false, Some(b)) => w + b,
            (false, None) => w,
        };
        edges.push((src, dst, weight));
        if back.is_none() {
            edges.push((dst, src, weight));
        }
    }
    Snapshot::from_edges(
        snapshot.time_index,
        edges,
        snapshot.nodes.iter().copied(),
    )
    .expect("reciprocal arcs of a valid snapshot form a valid snapshot")
}

/// Adds one self-loop per node, weighted according to `mode`. Nodes without
/// incoming arcs always get weight 1.
pub fn add_self_loops(snapshot: &Snapshot, mode: SelfLoopMode) -> Result<Snapshot> {
    let mut out = snapshot.clone();
    for i in 0..out.nodes.len() {
        if out.in_adj[i].iter().any(|a| a.idx == i) {
            return Err(Error::SelfLoopPresent(out.nodes[i]));
        }
        let incoming = &out.in_adj[i];
        let weight = if incoming.is_empty() {
            1.0
        } else {
            match mode {
                SelfLoopMode::Unit => 1.0,
                SelfLoopMode::MaxIncident => {
                    incoming.iter().map(|a| a.weight).fold(f64::MIN, f64::max)
                }
                SelfLoopMode::SumIncident => incoming.iter().map(|a| a.weight).sum(),
            }
        };
        let loop_arc = Adj { idx: i, weight };
        let at = out.in_adj[i].partition_point(|a| a.idx < i);
        out.in_adj[i].insert(at, loop_arc);
        let at = out.out_adj[i].partition_point(|a| a.idx < i);
        out.out_adj[i].insert(at, loop_arc);
    }
    Ok(out)
}

/// Nodes whose surroundings differ between two consecutive snapshots.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SnapshotDelta {
    /// Present in both snapshots, incident arcs differ.
    pub changed: BTreeSet<NodeId>,
    /// Present only in the later snapshot.
    pub born: BTreeSet<NodeId>,
    /// Present only in the earlier snapshot.
    pub dead: BTreeSet<NodeId>,
}

impl SnapshotDelta {
    pub fn is_empty(&self) -> bool {
        self.changed.is_empty() && self.born.is_empty() && self.dead.is_empty()
    }

    /// A delta that marks every surviving node of `cur` as changed.
    pub fn all_changed(prev: &Snapshot, cur: &Snapshot) -> SnapshotDelta {
        let mut delta = SnapshotDelta::default();
        for &node in &cur.nodes {
            if prev.contains(node) {
                delta.changed.insert(node);
            } else {
                delta.born.insert(node);
            }
        }
        delta.dead = prev
            .nodes
            .iter()
            .copied()
            .filter(|&n| !cur.contains(n))
            .collect();
        delta
    }

    /// Nodes whose rows must be rebuilt: `changed ∪ born`.
    pub fn touched(&self) -> BTreeSet<NodeId> {
        self.changed.union(&self.born).copied().collect()
    }
}

/// Compares consecutive snapshots. A node present in both is changed when
/// its incident arcs differ in neighbor, direction, or weight.
pub fn diff_snapshots(prev: &Snapshot, cur: &Snapshot) -> Result<SnapshotDelta> {
    if prev.time_index + 1 != cur.time_index {
        return Err(Error::Sequencing {
            expected: prev.time_index + 1,
            found: cur.time_index,
        });
    }
    let mut delta = SnapshotDelta::default();
    let (mut a, mut b) = (0, 0);
    while a < prev.nodes.len() || b < cur.nodes.len() {
        match (prev.nodes.get(a), cur.nodes.get(b)) {
            (Some(&p), Some(&c)) if p == c => {
                let same = same_arcs(prev, &prev.in_adj[a], cur, &cur.in_adj[b])
                    && same_arcs(prev, &prev.out_adj[a], cur, &cur.out_adj[b]);
                if !same {
                    delta.changed.insert(p);
                }
                a += 1;
                b += 1;
            }
            (Some(&p), Some(&c)) if p < c => {
                delta.dead.insert(p);
                a += 1;
            }
            (Some(_), Some(&c)) => {
                delta.born.insert(c);
                b += 1;
            }
            (Some(&p), None) => {
                delta.dead.insert(p);
                a += 1;
            }
            (None, Some(&c)) => {
                delta.born.insert(c);
                b += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    Ok(delta)
}

fn same_arcs(prev: &Snapshot, x: &[Adj], cur: &Snapshot, y: &[Adj]) -> bool {
    x.len() == y.len()
        && x.iter().zip(y).all(|(p, c)| {
            prev.nodes[p.idx] == cur.nodes[c.idx] && p.weight.to_bits() == c.weight.to_bits()
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(t: u64, edges: &[(u64, u64, f64)]) -> Snapshot {
        Snapshot::from_edges(
            t,
            edges.iter().map(|&(s, d, w)| (NodeId(s), NodeId(d), w)),
            [],
        )
        .unwrap()
    }

    fn ids(v: &[u64]) -> BTreeSet<NodeId> {
        v.iter().copied().map(NodeId).collect()
    }

    #[test]
    fn from_edges_keeps_adjacency_consistent() {
        let s = snap(0, &[(3, 1, 2.0), (1, 2, 0.5), (2, 1, 1.5)]);
        assert_eq!(s.nodes(), &[NodeId(1), NodeId(2), NodeId(3)]);
        let ins: Vec<_> = s.in_edges(NodeId(1)).collect();
        assert_eq!(ins, vec![(NodeId(2), 1.5), (NodeId(3), 2.0)]);
        for (src, dst, w) in s.edges() {
            assert!(s.in_edges(dst).any(|(j, x)| j == src && x == w));
        }
        assert_eq!(s.weight(NodeId(1), NodeId(2)), Some(0.5));
        assert_eq!(s.weight(NodeId(1), NodeId(3)), None);
    }

    #[test]
    fn duplicate_and_bad_weights_are_rejected() {
        let dup = Snapshot::from_edges(
            0,
            [(NodeId(1), NodeId(2), 1.0), (NodeId(1), NodeId(2), 2.0)],
            [],
        );
        assert!(matches!(dup, Err(Error::DuplicateEdge { .. })));
        let zero = Snapshot::from_edges(0, [(NodeId(1), NodeId(2), 0.0)], []);
        assert!(matches!(zero, Err(Error::InvalidWeight { .. })));
        let nan = Snapshot::from_edges(0, [(NodeId(1), NodeId(2), f64::NAN)], []);
        assert!(matches!(nan, Err(Error::InvalidWeight { .. })));
    }

    #[test]
    fn symmetrize_binarized() {
        let s = symmetrize(&snap(0, &[(1, 2, 3.0)]), true);
        let e: Vec<_> = s.edges().collect();
        assert_eq!(
            e,
            vec![(NodeId(1), NodeId(2), 1.0), (NodeId(2), NodeId(1), 1.0)]
        );
    }

    #[test]
    fn symmetrize_sums_reciprocal_pairs() {
        let s = symmetrize(&snap(0, &[(1, 2, 2.0), (2, 1, 3.0)]), false);
        let e: Vec<_> = s.edges().collect();
        assert_eq!(
            e,
            vec![(NodeId(1), NodeId(2), 5.0), (NodeId(2), NodeId(1), 5.0)]
        );
    }

    #[test]
    fn symmetrize_empty() {
        let s = symmetrize(&Snapshot::empty(4), false);
        assert!(s.is_empty());
        assert_eq!(s.time_index(), 4);
    }

    #[test]
    fn self_loop_modes() {
        let s = snap(0, &[(2, 1, 2.0), (3, 1, 3.0)]);
        let w = |mode| {
            add_self_loops(&s, mode)
                .unwrap()
                .weight(NodeId(1), NodeId(1))
                .unwrap()
        };
        assert_eq!(w(SelfLoopMode::Unit), 1.0);
        assert_eq!(w(SelfLoopMode::MaxIncident), 3.0);
        assert_eq!(w(SelfLoopMode::SumIncident), 5.0);
    }

    #[test]
    fn nodes_without_incoming_arcs_get_unit_loops() {
        let s = snap(0, &[(2, 1, 4.0)]);
        for mode in [
            SelfLoopMode::Unit,
            SelfLoopMode::MaxIncident,
            SelfLoopMode::SumIncident,
        ] {
            let l = add_self_loops(&s, mode).unwrap();
            assert_eq!(l.weight(NodeId(2), NodeId(2)), Some(1.0));
        }
    }

    #[test]
    fn second_self_loop_pass_is_rejected() {
        let l = add_self_loops(&snap(0, &[(1, 2, 1.0)]), SelfLoopMode::Unit).unwrap();
        assert!(l.has_self_loops());
        assert!(matches!(
            add_self_loops(&l, SelfLoopMode::Unit),
            Err(Error::SelfLoopPresent(_))
        ));
        assert_eq!(l.strip_self_loops(), snap(0, &[(1, 2, 1.0)]));
    }

    #[test]
    fn neighbors_union_excludes_self() {
        let s = add_self_loops(
            &snap(0, &[(1, 2, 1.0), (3, 2, 1.0), (2, 3, 1.0), (2, 4, 1.0)]),
            SelfLoopMode::Unit,
        )
        .unwrap();
        assert_eq!(
            s.neighbors(NodeId(2)),
            vec![NodeId(1), NodeId(3), NodeId(4)]
        );
    }

    #[test]
    fn diff_identity() {
        let s = snap(0, &[(1, 2, 1.0)]);
        let d = diff_snapshots(&s, &s.clone().with_time_index(1)).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn diff_rewired_neighbor() {
        let prev = snap(0, &[(1, 3, 1.0), (2, 3, 1.0), (4, 5, 1.0)]);
        let cur = snap(1, &[(1, 3, 1.0), (4, 3, 1.0), (4, 5, 1.0), (2, 5, 1.0)]);
        let d = diff_snapshots(&prev, &cur).unwrap();
        assert!(d.changed.contains(&NodeId(3)));
        assert!(d.changed.contains(&NodeId(2)));
        assert!(d.changed.contains(&NodeId(4)));
        assert!(!d.changed.contains(&NodeId(1)));
        assert!(d.born.is_empty() && d.dead.is_empty());
    }

    #[test]
    fn diff_births_and_deaths() {
        let prev = snap(0, &[(1, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0)]);
        let cur = snap(1, &[(1, 2, 1.0), (3, 4, 1.0), (4, 6, 1.0)]);
        let d = diff_snapshots(&prev, &cur).unwrap();
        assert_eq!(d.born, ids(&[6]));
        assert_eq!(d.dead, ids(&[5]));
        assert_eq!(d.changed, ids(&[4]));
    }

    #[test]
    fn diff_weight_only_change_marks_both_endpoints() {
        let prev = snap(0, &[(1, 2, 1.0), (2, 3, 1.0)]);
        let cur = snap(1, &[(1, 2, 2.0), (2, 3, 1.0)]);
        let d = diff_snapshots(&prev, &cur).unwrap();
        assert_eq!(d.changed, ids(&[1, 2]));
    }

    #[test]
    fn diff_requires_consecutive_indices() {
        let s = snap(0, &[(1, 2, 1.0)]);
        let err = diff_snapshots(&s, &s.clone().with_time_index(2)).unwrap_err();
        assert!(matches!(
            err,
            Error::Sequencing {
                expected: 1,
                found: 2
            }
        ));
    }
}
