use std::collections::{BTreeMap, BTreeSet};

use super::distribution::{max_label_set, LabelDistribution};
use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot};

/// Label rows for every node of a snapshot, plus their maximal-label sets.
///
/// Rows are stored in ascending node order, which is also the order of the
/// snapshot the state was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelState {
    nodes: Vec<NodeId>,
    rows: Vec<LabelDistribution>,
    max_sets: Vec<Vec<NodeId>>,
}

impl LabelState {
    pub fn from_rows(rows: BTreeMap<NodeId, LabelDistribution>) -> Self {
        let (nodes, rows): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        LabelState::from_parts(nodes, rows)
    }

    pub(crate) fn from_parts(nodes: Vec<NodeId>, rows: Vec<LabelDistribution>) -> Self {
        let max_sets = rows.iter().map(max_label_set).collect();
        LabelState {
            nodes,
            rows,
            max_sets,
        }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn row(&self, node: NodeId) -> Option<&LabelDistribution> {
        self.index_of(node).map(|i| &self.rows[i])
    }

    pub fn max_set(&self, node: NodeId) -> Option<&[NodeId]> {
        self.index_of(node).map(|i| &self.max_sets[i][..])
    }

    pub fn rows(&self) -> impl Iterator<Item = (NodeId, &LabelDistribution)> + '_ {
        self.nodes.iter().copied().zip(self.rows.iter())
    }

    /// Average number of labels per row.
    pub fn mean_row_len(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().map(LabelDistribution::len).sum::<usize>() as f64
            / self.rows.len() as f64
    }

    pub(crate) fn index_of(&self, node: NodeId) -> Option<usize> {
        self.nodes.binary_search(&node).ok()
    }

    pub(crate) fn row_at(&self, i: usize) -> &LabelDistribution {
        &self.rows[i]
    }

    pub(crate) fn max_set_at(&self, i: usize) -> &[NodeId] {
        &self.max_sets[i]
    }

    /// Smallest maximal label of row `i`: its community label.
    pub(crate) fn community_label_at(&self, i: usize) -> NodeId {
        self.max_sets[i][0]
    }

    pub(crate) fn set_row(&mut self, i: usize, row: LabelDistribution) {
        self.max_sets[i] = max_label_set(&row);
        self.rows[i] = row;
    }

    pub(crate) fn is_aligned_with(&self, snapshot: &Snapshot) -> bool {
        self.nodes == snapshot.nodes()
    }

    pub(crate) fn ensure_aligned(&self, snapshot: &Snapshot) -> Result<()> {
        if self.is_aligned_with(snapshot) {
            Ok(())
        } else {
            Err(Error::NodeSetMismatch(format!(
                "label state covers {} nodes, snapshot has {}",
                self.len(),
                snapshot.node_count()
            )))
        }
    }
}

/// Row of node `i` from its incoming arc weights (self-loop included).
pub(crate) fn init_row(snapshot: &Snapshot, i: usize) -> Result<LabelDistribution> {
    let arcs = snapshot.in_adj(i);
    let total: f64 = arcs.iter().map(|a| a.weight).sum();
    if arcs.is_empty() || !(total > 0.0) {
        return Err(Error::ZeroIncomingWeight(snapshot.nodes()[i]));
    }
    let nodes = snapshot.nodes();
    Ok(LabelDistribution::from_sorted_masses(
        arcs.iter().map(|a| (nodes[a.idx], a.weight)).collect(),
    ))
}

/// Initial label state: every node observes each in-neighbor's label with
/// probability proportional to the arc weight. Expects self-loops in place.
pub fn init_distribution(snapshot: &Snapshot) -> Result<LabelState> {
    let rows = (0..snapshot.node_count())
        .map(|i| init_row(snapshot, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(LabelState::from_parts(snapshot.nodes().to_vec(), rows))
}

/// Disjoint communities keyed by label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommunityAssignment {
    membership: BTreeMap<NodeId, NodeId>,
    communities: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl CommunityAssignment {
    pub fn from_membership<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let membership: BTreeMap<NodeId, NodeId> = pairs.into_iter().collect();
        let mut communities: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for (&node, &label) in &membership {
            communities.entry(label).or_default().insert(node);
        }
        CommunityAssignment {
            membership,
            communities,
        }
    }

    pub fn community_of(&self, node: NodeId) -> Option<NodeId> {
        self.membership.get(&node).copied()
    }

    pub fn membership(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.membership
    }

    pub fn communities(&self) -> &BTreeMap<NodeId, BTreeSet<NodeId>> {
        &self.communities
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    pub fn node_count(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.membership.keys().copied()
    }

    /// `node community` lines, communities ascending by label and nodes
    /// ascending within each community.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (label, members) in &self.communities {
            for node in members {
                out.push_str(&format!("{node} {label}\n"));
            }
        }
        out
    }

    /// Reads the `node community` format written by [`to_text`](Self::to_text).
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = t.split_ascii_whitespace().collect();
            let parsed = match fields.as_slice() {
                [a, b] => a.parse::<u64>().ok().zip(b.parse::<u64>().ok()),
                _ => None,
            };
            let (node, label) = parsed.ok_or_else(|| Error::Parse {
                line: n + 1,
                message: "expected `node community`".into(),
            })?;
            if pairs.insert(NodeId(node), NodeId(label)).is_some() {
                return Err(Error::Parse {
                    line: n + 1,
                    message: format!("node {node} assigned twice"),
                });
            }
        }
        Ok(CommunityAssignment::from_membership(pairs))
    }
}

/// Groups nodes by the smallest label of their maximal-label set.
pub fn extract_communities(state: &LabelState) -> CommunityAssignment {
    CommunityAssignment::from_membership(
        (0..state.len()).map(|i| (state.nodes[i], state.community_label_at(i))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{add_self_loops, SelfLoopMode};

    fn looped(edges: &[(u64, u64, f64)], extra: &[u64]) -> Snapshot {
        let s = Snapshot::from_edges(
            0,
            edges.iter().map(|&(a, b, w)| (NodeId(a), NodeId(b), w)),
            extra.iter().copied().map(NodeId),
        )
        .unwrap();
        add_self_loops(&s, SelfLoopMode::Unit).unwrap()
    }

    #[test]
    fn init_is_proportional_to_incoming_weights() {
        // node 1 receives from 2 (w=2) and 3 (w=3), plus its unit self-loop
        let s = looped(&[(2, 1, 2.0), (3, 1, 3.0)], &[]);
        let st = init_distribution(&s).unwrap();
        let r = st.row(NodeId(1)).unwrap();
        assert!((r.get(NodeId(2)) - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.get(NodeId(3)) - 0.5).abs() < 1e-12);
        assert!((r.get(NodeId(1)) - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(st.max_set(NodeId(1)).unwrap(), &[NodeId(3)]);
    }

    #[test]
    fn isolated_node_observes_itself() {
        let s = looped(&[], &[4]);
        let st = init_distribution(&s).unwrap();
        assert_eq!(st.row(NodeId(4)).unwrap().entries(), &[(NodeId(4), 1.0)]);
    }

    #[test]
    fn unweighted_in_neighbors_share_mass_evenly() {
        let s = looped(&[(2, 1, 1.0), (3, 1, 1.0), (4, 1, 1.0)], &[]);
        let st = init_distribution(&s).unwrap();
        let r = st.row(NodeId(1)).unwrap();
        assert_eq!(r.len(), 4);
        for (_, p) in r.entries() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn init_without_self_loops_fails_on_sources() {
        let s = Snapshot::from_edges(0, [(NodeId(1), NodeId(2), 1.0)], []).unwrap();
        assert!(matches!(
            init_distribution(&s),
            Err(Error::ZeroIncomingWeight(NodeId(1)))
        ));
    }

    #[test]
    fn extraction_groups_by_best_label() {
        let rows = BTreeMap::from([
            (NodeId(1), LabelDistribution::single(NodeId(10))),
            (NodeId(2), LabelDistribution::single(NodeId(10))),
            (NodeId(3), LabelDistribution::single(NodeId(20))),
        ]);
        let a = extract_communities(&LabelState::from_rows(rows));
        assert_eq!(a.community_count(), 2);
        assert_eq!(
            a.communities()[&NodeId(10)],
            BTreeSet::from([NodeId(1), NodeId(2)])
        );
        assert_eq!(a.communities()[&NodeId(20)], BTreeSet::from([NodeId(3)]));
    }

    #[test]
    fn ties_go_to_the_smallest_label() {
        let tied =
            LabelDistribution::new(vec![(NodeId(7), 0.5), (NodeId(3), 0.5)]).unwrap();
        let a = extract_communities(&LabelState::from_rows(BTreeMap::from([(NodeId(1), tied)])));
        assert_eq!(a.community_of(NodeId(1)), Some(NodeId(3)));
    }

    #[test]
    fn single_node_is_one_community() {
        let st = init_distribution(&looped(&[], &[5])).unwrap();
        let a = extract_communities(&st);
        assert_eq!(a.community_count(), 1);
        assert_eq!(a.community_of(NodeId(5)), Some(NodeId(5)));
    }
}
