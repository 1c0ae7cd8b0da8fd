//! Partition quality and structure measurements.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot};
use crate::labelprop::CommunityAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModularityVariant {
    /// Arcs are folded into undirected edges (`A = W + Wᵀ`).
    UndirectedWeighted,
    /// Out-strength times in-strength null model.
    DirectedWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularityScore {
    pub q: f64,
    pub variant: ModularityVariant,
}

#[derive(Default)]
struct CommunityTotals {
    intra: f64,
    out_strength: f64,
    in_strength: f64,
}

/// Modularity of `assignment` on `snapshot`. Self-loops are ignored.
pub fn modularity(
    snapshot: &Snapshot,
    assignment: &CommunityAssignment,
    variant: ModularityVariant,
) -> Result<ModularityScore> {
    let nodes = snapshot.nodes();
    let labels = nodes
        .iter()
        .map(|&n| assignment.community_of(n).ok_or(Error::UnknownNode(n)))
        .collect::<Result<Vec<NodeId>>>()?;

    let mut totals: BTreeMap<NodeId, CommunityTotals> = BTreeMap::new();
    let mut total_weight = 0.0;
    for (i, &label) in labels.iter().enumerate() {
        let mut out_w = 0.0;
        let mut intra = 0.0;
        for arc in snapshot.out_adj(i) {
            if arc.idx == i {
                continue;
            }
            out_w += arc.weight;
            if labels[arc.idx] == label {
                intra += arc.weight;
            }
        }
        let in_w: f64 = snapshot
            .in_adj(i)
            .iter()
            .filter(|a| a.idx != i)
            .map(|a| a.weight)
            .sum();
        total_weight += out_w;
        let t = totals.entry(label).or_default();
        t.intra += intra;
        t.out_strength += out_w;
        t.in_strength += in_w;
    }
    if !(total_weight > 0.0) {
        return Err(Error::ZeroTotalWeight);
    }

    // Single division at the end keeps integer-weighted cases exact.
    let q = match variant {
        ModularityVariant::UndirectedWeighted => {
            let two_m = 2.0 * total_weight;
            let mut numerator = 0.0;
            for t in totals.values() {
                let degree = t.out_strength + t.in_strength;
                numerator += two_m * (2.0 * t.intra) - degree * degree;
            }
            numerator / (two_m * two_m)
        }
        ModularityVariant::DirectedWeighted => {
            let m = total_weight;
            let mut numerator = 0.0;
            for t in totals.values() {
                numerator += m * t.intra - t.out_strength * t.in_strength;
            }
            numerator / (m * m)
        }
    };
    Ok(ModularityScore { q, variant })
}

/// Community-size histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeDistribution {
    /// size -> number of communities with that size
    pub histogram: BTreeMap<usize, usize>,
    pub community_count: usize,
}

impl SizeDistribution {
    pub fn node_count(&self) -> usize {
        self.histogram.iter().map(|(s, c)| s * c).sum()
    }
}

pub fn size_distribution(assignment: &CommunityAssignment) -> SizeDistribution {
    let mut histogram = BTreeMap::new();
    for members in assignment.communities().values() {
        *histogram.entry(members.len()).or_insert(0) += 1;
    }
    SizeDistribution {
        histogram,
        community_count: assignment.community_count(),
    }
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Rand index: the fraction of node pairs on which both partitions agree.
pub fn partition_agreement(a: &CommunityAssignment, b: &CommunityAssignment) -> Result<f64> {
    if a.node_count() != b.node_count() || !a.nodes().eq(b.nodes()) {
        return Err(Error::NodeSetMismatch(format!(
            "partitions cover {} and {} nodes",
            a.node_count(),
            b.node_count()
        )));
    }
    let total = pairs(a.node_count() as u64);
    if total == 0 {
        return Ok(1.0);
    }
    let mut joint: HashMap<(NodeId, NodeId), u64> = HashMap::new();
    for (node, &la) in a.membership() {
        let lb = b.membership()[node];
        *joint.entry((la, lb)).or_insert(0) += 1;
    }
    let same_both: u64 = joint.values().map(|&c| pairs(c)).sum();
    let same_a: u64 = a.communities().values().map(|m| pairs(m.len() as u64)).sum();
    let same_b: u64 = b.communities().values().map(|m| pairs(m.len() as u64)).sum();
    let agree = total + 2 * same_both - same_a - same_b;
    Ok(agree as f64 / total as f64)
}
