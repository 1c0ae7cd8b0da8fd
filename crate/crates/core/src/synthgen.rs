//! Seeded planted-partition streams with scripted evolution events.
//!
//! Randomness comes from [`ChaCha8Rng`] seeded with `seed_from_u64`; the
//! identifier [`PRNG_ID`] is written next to generated fixtures. Fixtures are
//! portable by regeneration with the same algorithm, seed, and script.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{snapshot_file_name, write_snapshot_file, NodeId, Snapshot};
use crate::labelprop::CommunityAssignment;

pub const PRNG_ID: &str = "rand_chacha::ChaCha8Rng/seed_from_u64";

/// Edge probabilities and weight ranges of a planted partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeModel {
    pub p_in: f64,
    pub p_out: f64,
    /// Uniform range of intra-community weights.
    pub intra_weight: (f64, f64),
    /// Uniform range of inter-community weights.
    pub inter_weight: (f64, f64),
    pub directed: bool,
}

impl EdgeModel {
    /// Unit weights everywhere.
    pub fn unweighted(p_in: f64, p_out: f64, directed: bool) -> Self {
        EdgeModel {
            p_in,
            p_out,
            intra_weight: (1.0, 1.0),
            inter_weight: (1.0, 1.0),
            directed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(name, format!("must be in [0, 1], got {p}")));
            }
        }
        if self.p_out >= self.p_in {
            return Err(Error::param(
                "p_out",
                format!("must be below p_in ({}), got {}", self.p_in, self.p_out),
            ));
        }
        for (name, (lo, hi)) in [
            ("intra_weight", self.intra_weight),
            ("inter_weight", self.inter_weight),
        ] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::param(
                    name,
                    format!("needs 0 < low <= high, got ({lo}, {hi})"),
                ));
            }
        }
        Ok(())
    }

    fn probability(&self, same: bool) -> f64 {
        if same {
            self.p_in
        } else {
            self.p_out
        }
    }

    fn sample_weight<R: Rng>(&self, same: bool, rng: &mut R) -> f64 {
        let (lo, hi) = if same {
            self.intra_weight
        } else {
            self.inter_weight
        };
        if lo == hi {
            lo
        } else {
            rng.random_range(lo..hi)
        }
    }
}

/// One scripted change to a planted graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EvolutionEvent {
    /// Moves `node` into community `to`, resampling its pairs with both the
    /// old and the new community.
    MigrateNode { node: u64, to: u64 },
    /// Adds `count` absent pairs, inside communities unless `intra` is false.
    AddEdges {
        count: usize,
        #[serde(default = "default_true")]
        intra: bool,
    },
    /// Removes `count` existing pairs.
    DeleteEdges { count: usize },
    /// Adds `node` to `community`, linked to `edges` random members.
    BirthNode { node: u64, community: u64, edges: usize },
    /// Removes `node` with all its arcs.
    DeathNode { node: u64 },
    /// Moves the upper half of `community` (by node id) into `new_community`
    /// and resamples the pairs across the halves.
    SplitCommunity { community: u64, new_community: u64 },
    /// Moves every member of `from` into `into`, resampling cross pairs.
    MergeCommunities { into: u64, from: u64 },
    /// Hands members of `community` round-robin to the remaining communities.
    DissolveCommunity { community: u64 },
}

fn default_true() -> bool {
    true
}

/// Mutable working copy of a planted graph.
struct World<'a> {
    model: &'a EdgeModel,
    arcs: BTreeMap<(NodeId, NodeId), f64>,
    nodes: BTreeSet<NodeId>,
    member: BTreeMap<NodeId, NodeId>,
}

impl<'a> World<'a> {
    fn new(snapshot: &Snapshot, truth: &CommunityAssignment, model: &'a EdgeModel) -> Result<Self> {
        if !truth.nodes().eq(snapshot.nodes().iter().copied()) {
            return Err(Error::NodeSetMismatch(
                "ground truth does not cover the snapshot nodes".into(),
            ));
        }
        Ok(World {
            model,
            arcs: snapshot.edges().map(|(s, d, w)| ((s, d), w)).collect(),
            nodes: snapshot.nodes().iter().copied().collect(),
            member: truth.membership().clone(),
        })
    }

    fn community(&self, c: u64) -> Result<Vec<NodeId>> {
        let members: Vec<NodeId> = self
            .member
            .iter()
            .filter(|(_, &l)| l == NodeId(c))
            .map(|(&n, _)| n)
            .collect();
        if members.is_empty() {
            Err(Error::Domain(format!("community {c} does not exist")))
        } else {
            Ok(members)
        }
    }

    fn require_node(&self, node: u64) -> Result<NodeId> {
        let n = NodeId(node);
        if self.nodes.contains(&n) {
            Ok(n)
        } else {
            Err(Error::Domain(format!("node {node} does not exist")))
        }
    }

    fn connected(&self, a: NodeId, b: NodeId) -> bool {
        self.arcs.contains_key(&(a, b)) || self.arcs.contains_key(&(b, a))
    }

    fn unlink(&mut self, a: NodeId, b: NodeId) {
        self.arcs.remove(&(a, b));
        self.arcs.remove(&(b, a));
    }

    fn link<R: Rng>(&mut self, a: NodeId, b: NodeId, both_ways: bool, rng: &mut R) {
        let same = self.member[&a] == self.member[&b];
        let w = self.model.sample_weight(same, rng);
        self.arcs.insert((a, b), w);
        if both_ways || !self.model.directed {
            self.arcs.insert((b, a), w);
        }
    }

    /// Draws the pair `{a, b}` afresh from the model given current membership.
    fn resample<R: Rng>(&mut self, a: NodeId, b: NodeId, rng: &mut R) {
        self.unlink(a, b);
        let p = self.model.probability(self.member[&a] == self.member[&b]);
        if self.model.directed {
            for (s, d) in [(a, b), (b, a)] {
                if rng.random::<f64>() < p {
                    let w = self.model.sample_weight(self.member[&a] == self.member[&b], rng);
                    self.arcs.insert((s, d), w);
                }
            }
        } else if rng.random::<f64>() < p {
            self.link(a, b, true, rng);
        }
    }

    fn resample_all<R: Rng>(&mut self, pairs: BTreeSet<(NodeId, NodeId)>, rng: &mut R) {
        for (a, b) in pairs {
            self.resample(a, b, rng);
        }
    }

    fn degree_zero(&self) -> BTreeSet<NodeId> {
        let mut touched = BTreeSet::new();
        for &(s, d) in self.arcs.keys() {
            touched.insert(s);
            touched.insert(d);
        }
        self.nodes.difference(&touched).copied().collect()
    }

    /// Links every listed node that has no arcs to one random peer,
    /// preferring its own community.
    fn reattach<R: Rng>(&mut self, lonely: BTreeSet<NodeId>, rng: &mut R) {
        for node in lonely {
            if self.arcs.keys().any(|&(s, d)| s == node || d == node) {
                continue;
            }
            let own = self.member[&node];
            let mut peers: Vec<NodeId> = self
                .member
                .iter()
                .filter(|(&n, &c)| c == own && n != node)
                .map(|(&n, _)| n)
                .collect();
            if peers.is_empty() {
                peers = self.nodes.iter().copied().filter(|&n| n != node).collect();
            }
            if let Some(&peer) = peers.choose(rng) {
                self.link(node, peer, true, rng);
            }
        }
    }

    fn apply<R: Rng>(&mut self, event: &EvolutionEvent, rng: &mut R) -> Result<()> {
        match *event {
            EvolutionEvent::MigrateNode { node, to } => {
                let node = self.require_node(node)?;
                let target = self.community(to)?;
                let old = self.community(self.member[&node].0)?;
                self.member.insert(node, NodeId(to));
                let pairs = old
                    .into_iter()
                    .chain(target)
                    .filter(|&v| v != node)
                    .map(|v| ordered(node, v))
                    .collect();
                self.resample_all(pairs, rng);
            }
            EvolutionEvent::AddEdges { count, intra } => {
                let nodes: Vec<NodeId> = self.nodes.iter().copied().collect();
                let mut added = 0;
                let mut attempts = 0usize;
                while added < count {
                    attempts += 1;
                    if attempts > 1000 * (count + 1) {
                        return Err(Error::Domain(format!(
                            "could only place {added} of {count} new edges"
                        )));
                    }
                    let (Some(&a), Some(&b)) = (nodes.choose(rng), nodes.choose(rng)) else {
                        return Err(Error::Domain("no nodes to connect".into()));
                    };
                    if a == b || self.connected(a, b) {
                        continue;
                    }
                    if intra && self.member[&a] != self.member[&b] {
                        continue;
                    }
                    self.link(a, b, false, rng);
                    added += 1;
                }
            }
            EvolutionEvent::DeleteEdges { count } => {
                let mut pairs: Vec<(NodeId, NodeId)> = self
                    .arcs
                    .keys()
                    .filter(|&&(s, d)| self.model.directed || s < d)
                    .copied()
                    .collect();
                if count > pairs.len() {
                    return Err(Error::Domain(format!(
                        "cannot delete {count} edges from a graph with {}",
                        pairs.len()
                    )));
                }
                let (chosen, _) = pairs.partial_shuffle(rng, count);
                for &(s, d) in chosen.iter() {
                    if self.model.directed {
                        self.arcs.remove(&(s, d));
                    } else {
                        self.unlink(s, d);
                    }
                }
            }
            EvolutionEvent::BirthNode {
                node,
                community,
                edges,
            } => {
                let n = NodeId(node);
                if self.nodes.contains(&n) {
                    return Err(Error::Domain(format!("node {node} already exists")));
                }
                let members = self.community(community)?;
                if edges == 0 || edges > members.len() {
                    return Err(Error::Domain(format!(
                        "new node {node} needs between 1 and {} edges, got {edges}",
                        members.len()
                    )));
                }
                self.nodes.insert(n);
                self.member.insert(n, NodeId(community));
                let peers: Vec<NodeId> = members.choose_multiple(rng, edges).copied().collect();
                for peer in peers {
                    self.link(n, peer, true, rng);
                }
            }
            EvolutionEvent::DeathNode { node } => {
                let n = self.require_node(node)?;
                self.nodes.remove(&n);
                self.member.remove(&n);
                self.arcs.retain(|&(s, d), _| s != n && d != n);
            }
            EvolutionEvent::SplitCommunity {
                community,
                new_community,
            } => {
                let members = self.community(community)?;
                if self.member.values().any(|&c| c == NodeId(new_community)) {
                    return Err(Error::Domain(format!(
                        "community {new_community} already exists"
                    )));
                }
                if members.len() < 2 {
                    return Err(Error::Domain(format!(
                        "community {community} is too small to split"
                    )));
                }
                let (low, high) = members.split_at(members.len() / 2);
                for &n in high {
                    self.member.insert(n, NodeId(new_community));
                }
                let pairs = low
                    .iter()
                    .flat_map(|&a| high.iter().map(move |&b| ordered(a, b)))
                    .collect();
                self.resample_all(pairs, rng);
            }
            EvolutionEvent::MergeCommunities { into, from } => {
                if into == from {
                    return Err(Error::Domain(format!("cannot merge community {into} into itself")));
                }
                let keep = self.community(into)?;
                let moving = self.community(from)?;
                for &n in &moving {
                    self.member.insert(n, NodeId(into));
                }
                let pairs = keep
                    .iter()
                    .flat_map(|&a| moving.iter().map(move |&b| ordered(a, b)))
                    .collect();
                self.resample_all(pairs, rng);
            }
            EvolutionEvent::DissolveCommunity { community } => {
                let members = self.community(community)?;
                let remaining: Vec<NodeId> = self
                    .member
                    .values()
                    .copied()
                    .filter(|&c| c != NodeId(community))
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                if remaining.is_empty() {
                    return Err(Error::Domain(format!(
                        "community {community} is the only community"
                    )));
                }
                for (k, &n) in members.iter().enumerate() {
                    self.member.insert(n, remaining[k % remaining.len()]);
                }
                let mut pairs = BTreeSet::new();
                for &n in &members {
                    let new_home = self.member[&n];
                    for (&v, &c) in &self.member {
                        if v != n && (c == new_home || members.contains(&v)) {
                            pairs.insert(ordered(n, v));
                        }
                    }
                }
                self.resample_all(pairs, rng);
            }
        }
        Ok(())
    }

    fn finish(self, time_index: u64) -> Result<(Snapshot, CommunityAssignment)> {
        let snapshot = Snapshot::from_edges(
            time_index,
            self.arcs.into_iter().map(|((s, d), w)| (s, d, w)),
            self.nodes.iter().copied(),
        )?;
        Ok((snapshot, CommunityAssignment::from_membership(self.member)))
    }
}

fn ordered(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Planted partition with communities of the given sizes. Node ids start at
/// `first_id` and run consecutively; community `c` is labeled `NodeId(c)`.
/// Nodes left without arcs are linked to one random member of their own
/// community.
pub fn generate_planted(
    sizes: &[usize],
    model: &EdgeModel,
    first_id: u64,
    seed: u64,
) -> Result<(Snapshot, CommunityAssignment)> {
    model.validate()?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::param("sizes", "need at least one community, all sizes positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut member = BTreeMap::new();
    let mut next = first_id;
    for (c, &size) in sizes.iter().enumerate() {
        for _ in 0..size {
            member.insert(NodeId(next), NodeId(c as u64));
            next += 1;
        }
    }
    let nodes: Vec<NodeId> = member.keys().copied().collect();
    let community: Vec<NodeId> = member.values().copied().collect();
    let mut arcs = BTreeMap::new();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            let same = community[i] == community[j];
            let p = model.probability(same);
            if model.directed {
                for (s, d) in [(i, j), (j, i)] {
                    if rng.random::<f64>() < p {
                        arcs.insert((nodes[s], nodes[d]), model.sample_weight(same, &mut rng));
                    }
                }
            } else if rng.random::<f64>() < p {
                let w = model.sample_weight(same, &mut rng);
                arcs.insert((nodes[i], nodes[j]), w);
                arcs.insert((nodes[j], nodes[i]), w);
            }
        }
    }
    let mut world = World {
        model,
        arcs,
        nodes: nodes.iter().copied().collect(),
        member,
    };
    let lonely = world.degree_zero();
    world.reattach(lonely, &mut rng);
    world.finish(0)
}

/// Applies `events` in order. The time index is left unchanged. Nodes that
/// lose their last arc, and new nodes, are reattached as in
/// [`generate_planted`].
pub fn apply_events(
    snapshot: &Snapshot,
    truth: &CommunityAssignment,
    events: &[EvolutionEvent],
    model: &EdgeModel,
    seed: u64,
) -> Result<(Snapshot, CommunityAssignment)> {
    if events.is_empty() {
        return Ok((snapshot.clone(), truth.clone()));
    }
    model.validate()?;
    let mut world = World::new(snapshot, truth, model)?;
    let isolated_before = world.degree_zero();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for event in events {
        world.apply(event, &mut rng)?;
    }
    let lonely = world
        .degree_zero()
        .difference(&isolated_before)
        .copied()
        .collect();
    world.reattach(lonely, &mut rng);
    world.finish(snapshot.time_index())
}

/// An event scheduled for the transition into snapshot `step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledEvent {
    pub step: u64,
    #[serde(flatten)]
    pub event: EvolutionEvent,
}

fn default_weight() -> (f64, f64) {
    (1.0, 1.0)
}

fn default_first_id() -> u64 {
    1
}

/// Script for a whole planted stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamSpec {
    pub sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    #[serde(default = "default_weight")]
    pub weight: (f64, f64),
    /// Inter-community weight range; defaults to `weight`.
    #[serde(default)]
    pub inter_weight: Option<(f64, f64)>,
    #[serde(default)]
    pub directed: bool,
    #[serde(default = "default_first_id")]
    pub first_id: u64,
    /// Number of snapshots, including the initial one.
    pub steps: u64,
    /// Fraction of nodes touched per step by random edge deletions and
    /// intra-community additions.
    #[serde(default)]
    pub churn: f64,
    #[serde(default)]
    pub events: Vec<ScheduledEvent>,
}

impl StreamSpec {
    pub fn model(&self) -> EdgeModel {
        EdgeModel {
            p_in: self.p_in,
            p_out: self.p_out,
            intra_weight: self.weight,
            inter_weight: self.inter_weight.unwrap_or(self.weight),
            directed: self.directed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model().validate()?;
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(Error::param("sizes", "need at least one community, all sizes positive"));
        }
        if self.steps == 0 {
            return Err(Error::param("steps", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.churn) {
            return Err(Error::param("churn", format!("must be in [0, 1], got {}", self.churn)));
        }
        if let Some(e) = self.events.iter().find(|e| e.step == 0 || e.step >= self.steps) {
            return Err(Error::param(
                "events",
                format!("step {} is outside 1..{}", e.step, self.steps),
            ));
        }
        Ok(())
    }
}

/// Generated snapshots with their ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedStream {
    pub snapshots: Vec<Snapshot>,
    pub truths: Vec<CommunityAssignment>,
    pub seed: u64,
}

/// Random deletions and intra-community additions touching about
/// `fraction` of `nodes` endpoints.
pub fn churn_events(nodes: usize, fraction: f64) -> Vec<EvolutionEvent> {
    let count = (fraction * nodes as f64 / 4.0).round() as usize;
    if count == 0 {
        return Vec::new();
    }
    vec![
        EvolutionEvent::DeleteEdges { count },
        EvolutionEvent::AddEdges { count, intra: true },
    ]
}

pub fn generate_stream(spec: &StreamSpec, seed: u64) -> Result<PlantedStream> {
    spec.validate()?;
    let model = spec.model();
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let (mut snapshot, mut truth) =
        generate_planted(&spec.sizes, &model, spec.first_id, master.next_u64())?;
    let mut snapshots = vec![snapshot.clone()];
    let mut truths = vec![truth.clone()];
    for t in 1..spec.steps {
        let mut events = churn_events(snapshot.node_count(), spec.churn);
        events.extend(
            spec.events
                .iter()
                .filter(|e| e.step == t)
                .map(|e| e.event.clone()),
        );
        let step_seed = master.next_u64();
        let (next, next_truth) = apply_events(&snapshot, &truth, &events, &model, step_seed)?;
        snapshot = next.with_time_index(t);
        truth = next_truth;
        snapshots.push(snapshot.clone());
        truths.push(truth.clone());
    }
    Ok(PlantedStream {
        snapshots,
        truths,
        seed,
    })
}

/// File name of the ground truth of snapshot `t`.
pub fn truth_file_name(time_index: u64) -> String {
    format!("truth.{time_index:04}.txt")
}

/// Writes `NNNN.edges`, `truth.NNNN.txt`, and a `generator.txt` note with the
/// PRNG identifier and seed.
pub fn write_stream(stream: &PlantedStream, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (snapshot, truth) in stream.snapshots.iter().zip(&stream.truths) {
        let t = snapshot.time_index();
        write_snapshot_file(snapshot, &dir.join(snapshot_file_name(t)))?;
        let path = dir.join(truth_file_name(t));
        fs::write(&path, truth.to_text()).map_err(|e| Error::io(&path, e))?;
    }
    let mut meta = String::new();
    writeln!(meta, "prng {PRNG_ID}").expect("writing to a String");
    writeln!(meta, "seed {}", stream.seed).expect("writing to a String");
    writeln!(meta, "snapshots {}", stream.snapshots.len()).expect("writing to a String");
    let path = dir.join("generator.txt");
    fs::write(&path, meta).map_err(|e| Error::io(&path, e))
}

/// Three snapshots of fifteen-odd nodes in three dense groups. Step 1 moves
/// two nodes into group 0 and churns a few edges; step 2 kills node 6, adds
/// node 16 to group 1, and dissolves group 2. Planted community counts are
/// 3, 3, 2.
pub fn evolution_scenario() -> StreamSpec {
    let at = |step, event| ScheduledEvent { step, event };
    StreamSpec {
        sizes: vec![5, 5, 5],
        p_in: 1.0,
        p_out: 0.05,
        weight: (1.0, 1.0),
        inter_weight: None,
        directed: false,
        first_id: 1,
        steps: 3,
        churn: 0.0,
        events: vec![
            at(1, EvolutionEvent::MigrateNode { node: 10, to: 0 }),
            at(1, EvolutionEvent::MigrateNode { node: 14, to: 0 }),
            at(1, EvolutionEvent::DeleteEdges { count: 3 }),
            at(1, EvolutionEvent::AddEdges { count: 3, intra: true }),
            at(2, EvolutionEvent::DeathNode { node: 6 }),
            at(
                2,
                EvolutionEvent::BirthNode {
                    node: 16,
                    community: 1,
                    edges: 3,
                },
            ),
            at(2, EvolutionEvent::DissolveCommunity { community: 2 }),
        ],
    }
}
