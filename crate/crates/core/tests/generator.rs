mod common;

use std::collections::BTreeSet;

use common::*;
use labelrankt::labelprop::run_labelrank;
use labelrankt::metrics::partition_agreement;
use labelrankt::synthgen::{
    apply_events, evolution_scenario, generate_planted, generate_stream, write_stream, EdgeModel,
    EvolutionEvent, StreamSpec, PRNG_ID,
};
use labelrankt::{CommunityAssignment, NodeId, Params, Snapshot};
use proptest::prelude::*;

fn spec(sizes: Vec<usize>, p_in: f64, p_out: f64, steps: u64, churn: f64) -> StreamSpec {
    StreamSpec {
        sizes,
        p_in,
        p_out,
        weight: (1.0, 1.0),
        inter_weight: None,
        directed: false,
        first_id: 1,
        steps,
        churn,
        events: Vec::new(),
    }
}

fn covers(truth: &CommunityAssignment, s: &Snapshot) -> bool {
    truth.nodes().eq(s.nodes().iter().copied())
}

#[test]
fn certain_edges_make_cliques() {
    let model = EdgeModel::unweighted(1.0, 0.0, false);
    let (s, truth) = generate_planted(&[5, 5], &model, 1, 0).unwrap();
    assert_eq!(s.arc_count(), 2 * 2 * 10);
    assert_eq!(truth.community_count(), 2);
    for (a, b, _) in s.edges() {
        assert_eq!(truth.community_of(a), truth.community_of(b));
    }
    let (k4, _) = generate_planted(&[4], &model, 1, 0).unwrap();
    assert_eq!(k4.arc_count(), 12);
}

#[test]
fn same_seed_same_graph() {
    let model = EdgeModel::unweighted(0.8, 0.05, false);
    let a = generate_planted(&[5, 5, 5], &model, 1, 7).unwrap();
    let b = generate_planted(&[5, 5, 5], &model, 1, 7).unwrap();
    assert_eq!(a, b);
    let sp = spec(vec![30, 30], 0.3, 0.02, 5, 0.05);
    assert_eq!(generate_stream(&sp, 9).unwrap(), generate_stream(&sp, 9).unwrap());
    assert_ne!(generate_stream(&sp, 9).unwrap(), generate_stream(&sp, 10).unwrap());
}

#[test]
fn rejects_bad_probabilities_and_sizes() {
    let bad = EdgeModel::unweighted(0.1, 0.5, false);
    assert!(generate_planted(&[5], &bad, 1, 0).is_err());
    let equal = EdgeModel::unweighted(0.3, 0.3, false);
    assert!(generate_planted(&[5], &equal, 1, 0).is_err());
    let ok = EdgeModel::unweighted(0.5, 0.1, false);
    assert!(generate_planted(&[], &ok, 1, 0).is_err());
    assert!(generate_planted(&[3, 0], &ok, 1, 0).is_err());
    assert!(generate_stream(&spec(vec![5], 0.5, 0.1, 0, 0.0), 1).is_err());
}

#[test]
fn weights_fall_in_their_ranges() {
    let model = EdgeModel {
        p_in: 0.6,
        p_out: 0.1,
        intra_weight: (4.0, 6.0),
        inter_weight: (0.1, 0.5),
        directed: true,
    };
    let (s, truth) = generate_planted(&[15, 15], &model, 1, 3).unwrap();
    for (a, b, w) in s.edges() {
        if truth.community_of(a) == truth.community_of(b) {
            assert!((4.0..=6.0).contains(&w), "{w}");
        } else {
            assert!((0.1..=0.5).contains(&w), "{w}");
        }
    }
}

#[test]
fn no_events_changes_nothing() {
    let model = EdgeModel::unweighted(0.5, 0.05, false);
    let (s, truth) = generate_planted(&[8, 8], &model, 1, 2).unwrap();
    let (s2, t2) = apply_events(&s, &truth, &[], &model, 99).unwrap();
    assert_eq!(s2, s);
    assert_eq!(t2, truth);
}

#[test]
fn separated_cliques_are_recovered_exactly() {
    let sp = spec(vec![6, 9, 7, 8], 1.0, 0.0, 4, 0.0);
    let stream = generate_stream(&sp, 4).unwrap();
    for (s, truth) in stream.snapshots.iter().zip(&stream.truths) {
        let run = run_labelrank(s, &Params::new(2.0)).unwrap();
        assert_eq!(partition_agreement(&run.assignment, truth).unwrap(), 1.0);
    }
}

#[test]
fn scripted_scenario_follows_its_events() {
    let stream = generate_stream(&evolution_scenario(), 1).unwrap();
    let counts: Vec<usize> = stream.truths.iter().map(|t| t.community_count()).collect();
    assert_eq!(counts, [3, 3, 2]);
    let [t0, t1, t2] = [&stream.truths[0], &stream.truths[1], &stream.truths[2]];
    assert_eq!(t0.community_of(n(10)), Some(n(1)));
    assert_eq!(t1.community_of(n(10)), Some(n(0)));
    assert_eq!(t1.community_of(n(14)), Some(n(0)));
    assert!(t2.community_of(n(6)).is_none());
    assert_eq!(t2.community_of(n(16)), Some(n(1)));
    assert!(!t2.communities().contains_key(&n(2)));
    assert!(!stream.snapshots[2].contains(n(6)));
    assert!(stream.snapshots[2].contains(n(16)));
    for (t, s) in stream.snapshots.iter().enumerate() {
        assert_eq!(s.time_index(), t as u64);
    }
}

#[test]
fn split_and_merge_events() {
    let model = EdgeModel::unweighted(0.9, 0.02, false);
    let (s, truth) = generate_planted(&[10, 10], &model, 1, 8).unwrap();
    let split = [EvolutionEvent::SplitCommunity {
        community: 0,
        new_community: 5,
    }];
    let (s1, t1) = apply_events(&s, &truth, &split, &model, 1).unwrap();
    assert_eq!(t1.community_count(), 3);
    assert_eq!(t1.communities()[&n(5)].len(), 5);
    let merge = [EvolutionEvent::MergeCommunities { into: 1, from: 5 }];
    let (s2, t2) = apply_events(&s1, &t1, &merge, &model, 2).unwrap();
    assert_eq!(t2.community_count(), 2);
    assert_eq!(t2.communities()[&n(1)].len(), 15);
    assert!(covers(&t2, &s2));
    let bogus = [EvolutionEvent::DeathNode { node: 99 }];
    assert!(apply_events(&s, &truth, &bogus, &model, 3).is_err());
}

#[test]
fn stream_files_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let stream = generate_stream(&evolution_scenario(), 6).unwrap();
    write_stream(&stream, dir.path()).unwrap();
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "0000.edges",
            "0001.edges",
            "0002.edges",
            "generator.txt",
            "truth.0000.txt",
            "truth.0001.txt",
            "truth.0002.txt"
        ]
    );
    let meta = std::fs::read_to_string(dir.path().join("generator.txt")).unwrap();
    assert!(meta.contains(PRNG_ID) && meta.contains("seed 6"));
    let loaded = labelrankt::graph::load_stream(dir.path()).unwrap();
    assert_eq!(loaded, stream.snapshots);
    let truth = std::fs::read_to_string(dir.path().join("truth.0002.txt")).unwrap();
    assert_eq!(CommunityAssignment::parse(&truth).unwrap(), stream.truths[2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn truth_always_partitions_the_live_nodes(
        seed in any::<u64>(),
        churn in 0.0f64..0.3,
        directed in any::<bool>(),
    ) {
        let mut sp = spec(vec![8, 12, 10], 0.5, 0.05, 5, churn);
        sp.directed = directed;
        sp.events = evolution_like_events();
        let stream = generate_stream(&sp, seed).unwrap();
        for (s, truth) in stream.snapshots.iter().zip(&stream.truths) {
            prop_assert!(covers(truth, s));
            let members: usize = truth.communities().values().map(BTreeSet::len).sum();
            prop_assert_eq!(members, s.node_count());
            prop_assert!(!s.has_self_loops());
            for &v in s.nodes() {
                prop_assert!(!s.neighbors(v).is_empty(), "isolated {v}");
            }
        }
    }
}

fn evolution_like_events() -> Vec<labelrankt::synthgen::ScheduledEvent> {
    use labelrankt::synthgen::ScheduledEvent as At;
    vec![
        At { step: 1, event: EvolutionEvent::MigrateNode { node: 2, to: 1 } },
        At { step: 2, event: EvolutionEvent::DeathNode { node: 12 } },
        At { step: 2, event: EvolutionEvent::BirthNode { node: 100, community: 2, edges: 4 } },
        At { step: 3, event: EvolutionEvent::SplitCommunity { community: 1, new_community: 7 } },
        At { step: 4, event: EvolutionEvent::DissolveCommunity { community: 0 } },
    ]
}

#[test]
fn birth_ids_must_be_new() {
    let model = EdgeModel::unweighted(0.5, 0.05, false);
    let (s, truth) = generate_planted(&[5, 5], &model, 1, 0).unwrap();
    let clash = [EvolutionEvent::BirthNode {
        node: NodeId(3).0,
        community: 0,
        edges: 2,
    }];
    assert!(apply_events(&s, &truth, &clash, &model, 0).is_err());
}
