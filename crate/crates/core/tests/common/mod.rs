#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use labelrankt::{CommunityAssignment, NodeId, Snapshot};
use proptest::prelude::*;

pub fn n(v: u64) -> NodeId {
    NodeId(v)
}

pub fn directed(edges: &[(u64, u64, f64)], extra: &[u64]) -> Snapshot {
    Snapshot::from_edges(
        0,
        edges.iter().map(|&(a, b, w)| (NodeId(a), NodeId(b), w)),
        extra.iter().copied().map(NodeId),
    )
    .unwrap()
}

/// Each pair becomes two unit arcs.
pub fn undirected(edges: &[(u64, u64)]) -> Snapshot {
    let arcs: Vec<_> = edges
        .iter()
        .flat_map(|&(a, b)| [(a, b, 1.0), (b, a, 1.0)])
        .collect();
    directed(&arcs, &[])
}

pub fn clique(ids: std::ops::RangeInclusive<u64>) -> Vec<(u64, u64)> {
    let v: Vec<u64> = ids.collect();
    let mut out = Vec::new();
    for (k, &a) in v.iter().enumerate() {
        for &b in &v[k + 1..] {
            out.push((a, b));
        }
    }
    out
}

pub fn assignment(pairs: &[(u64, u64)]) -> CommunityAssignment {
    CommunityAssignment::from_membership(pairs.iter().map(|&(a, b)| (NodeId(a), NodeId(b))))
}

/// Weakly connected components by union-find, keyed by smallest member.
pub fn components(s: &Snapshot) -> CommunityAssignment {
    let nodes = s.nodes();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (a, b, _) in s.edges() {
        let ia = s.index_of(a).unwrap();
        let ib = s.index_of(b).unwrap();
        let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    CommunityAssignment::from_membership(
        (0..nodes.len()).map(|i| (nodes[i], nodes[find(&mut parent, i)])),
    )
}

/// Random simple digraph on nodes 1..=max_nodes, weights in [0.1, 5).
pub fn arb_snapshot(max_nodes: u64, max_arcs: usize) -> impl Strategy<Value = Snapshot> {
    (1..=max_nodes).prop_flat_map(move |size| {
        prop::collection::vec((1..=size, 1..=size, 0.1f64..5.0), 0..=max_arcs).prop_map(
            move |raw| {
                let mut seen = BTreeSet::new();
                let edges: Vec<_> = raw
                    .into_iter()
                    .filter(|&(a, b, _)| a != b && seen.insert((a, b)))
                    .map(|(a, b, w)| (NodeId(a), NodeId(b), w))
                    .collect();
                Snapshot::from_edges(0, edges, (1..=size).map(NodeId)).unwrap()
            },
        )
    })
}

/// Random undirected unit-weight graph (both arcs present) on 1..=max_nodes.
pub fn arb_undirected(max_nodes: u64, max_edges: usize) -> impl Strategy<Value = Snapshot> {
    (1..=max_nodes).prop_flat_map(move |size| {
        prop::collection::vec((1..=size, 1..=size), 0..=max_edges).prop_map(move |raw| {
            let mut seen = BTreeSet::new();
            let mut arcs = Vec::new();
            for (a, b) in raw {
                let key = (a.min(b), a.max(b));
                if a != b && seen.insert(key) {
                    arcs.push((NodeId(a), NodeId(b), 1.0));
                    arcs.push((NodeId(b), NodeId(a), 1.0));
                }
            }
            Snapshot::from_edges(0, arcs, (1..=size).map(NodeId)).unwrap()
        })
    })
}

/// Double-loop modularity over all ordered node pairs, self-loops ignored.
pub fn brute_force_q(s: &Snapshot, a: &CommunityAssignment, directed: bool) -> f64 {
    let nodes = s.nodes();
    let w = |i: NodeId, j: NodeId| if i == j { 0.0 } else { s.weight(i, j).unwrap_or(0.0) };
    let n = nodes.len();
    let mut adj = vec![vec![0.0; n]; n];
    for (x, &i) in nodes.iter().enumerate() {
        for (y, &j) in nodes.iter().enumerate() {
            adj[x][y] = if directed { w(i, j) } else { w(i, j) + w(j, i) };
        }
    }
    let total: f64 = adj.iter().flatten().sum();
    let out: Vec<f64> = adj.iter().map(|r| r.iter().sum()).collect();
    let inn: Vec<f64> = (0..n).map(|y| (0..n).map(|x| adj[x][y]).sum()).collect();
    let mut q = 0.0;
    for x in 0..n {
        for y in 0..n {
            if a.community_of(nodes[x]) == a.community_of(nodes[y]) {
                q += adj[x][y] - out[x] * inn[y] / total;
            }
        }
    }
    q / total
}

pub fn rows_of(state: &labelrankt::LabelState) -> BTreeMap<NodeId, Vec<(NodeId, f64)>> {
    state.rows().map(|(k, r)| (k, r.entries().to_vec())).collect()
}
