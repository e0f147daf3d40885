mod common;

use common::{corpus, fixture};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use trak_core::track::generate::{random_oriented_track, random_track};
use trak_core::track::{HalfBranchEnd, Slot};
use trak_core::{parse_track, serialize_track, BranchKind, TrainTrack, TrakError};

fn sample(seed: u64, v: usize, oriented: bool) -> Option<TrainTrack> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..200).find_map(|_| {
        if oriented {
            random_oriented_track(&mut rng, v)
        } else {
            random_track(&mut rng, v)
        }
    })
}

#[test]
fn sphere5_counts_and_regions() {
    let t = fixture("sphere5.trk");
    assert_eq!((t.branch_count(), t.switch_count()), (12, 8));
    let regions = t.complementary_regions();
    assert_eq!(regions.len(), 6);
    let monogons = regions.iter().filter(|r| r.punctured && r.cusps == 1).count();
    let trigons = regions.iter().filter(|r| !r.punctured && r.cusps == 3).count();
    assert_eq!((monogons, trigons), (5, 1));
    let ty = t.topological_type().unwrap();
    assert_eq!((ty.polygon_orders.clone(), ty.punctures, ty.genus), (vec![1], 5, 0));
    assert_eq!(ty.to_string(), "(1;-5)");
    assert!(!t.is_orientable());
}

#[test]
fn genus2max_counts_and_regions() {
    let t = fixture("genus2max.trk");
    assert_eq!((t.branch_count(), t.switch_count()), (18, 12));
    let regions = t.complementary_regions();
    assert_eq!(regions.len(), 4);
    assert!(regions.iter().all(|r| !r.punctured && r.cusps == 3));
    let ty = t.topological_type().unwrap();
    assert_eq!(
        (ty.polygon_orders.clone(), ty.punctures, ty.genus),
        (vec![1, 1, 1, 1], 0, 2)
    );
    assert!(ty.is_maximal());
    assert!(t.twist_connectors().is_empty());
}

#[test]
fn genus2one_is_a_nonorientable_square_track() {
    let t = fixture("genus2one.trk");
    let ty = t.topological_type().unwrap();
    assert_eq!(ty.to_string(), "(4;0)");
    assert_eq!(ty.genus, 2);
    assert!(!t.is_orientable());
}

#[test]
fn empty_file_is_a_syntax_error() {
    assert!(matches!(parse_track(""), Err(TrakError::Syntax { .. })));
}

#[test]
fn bigon_is_rejected() {
    // Two switches joined by three branches bound bigons.
    let text = "track v1\nbranch 1\nbranch 2\nbranch 3\n\
                switch 1 large=1.1 left=2.1 right=3.1\n\
                switch 2 large=1.2 left=3.2 right=2.2\n";
    assert!(matches!(parse_track(text), Err(TrakError::RegionConstraint(_))));
}

#[test]
fn branch_classes_follow_slots() {
    let t = fixture("sphere5.trk");
    for b in 0..t.branch_count() {
        let large_ends = [HalfBranchEnd::first(b), HalfBranchEnd::second(b)]
            .iter()
            .filter(|&&h| t.attachment(h).1 == Slot::Large)
            .count();
        let expected = match large_ends {
            2 => BranchKind::Large,
            0 => BranchKind::Small,
            _ => BranchKind::Mixed,
        };
        assert_eq!(t.classify_branch(b).unwrap(), expected, "branch {b}");
    }
    assert!(!t.branches_of_kind(BranchKind::Mixed).is_empty());
    assert!(matches!(t.classify_branch(99), Err(TrakError::UnknownBranch(99))));
}

#[test]
fn twist_connector_fixture() {
    let t = fixture("twistconn.trk");
    let pairs = t.twist_connectors();
    assert_eq!(pairs.len(), 1);
    let (e, s) = pairs[0];
    assert_eq!(t.classify_branch(e).unwrap(), BranchKind::Large);
    assert_eq!(t.classify_branch(s).unwrap(), BranchKind::Small);
}

#[test]
fn twist_connectors_are_disjoint() {
    let t = fixture("twoconn.trk");
    let pairs = t.twist_connectors();
    assert_eq!(pairs.len(), 2);
    let a: HashSet<usize> = [pairs[0].0, pairs[0].1].into();
    let b: HashSet<usize> = [pairs[1].0, pairs[1].1].into();
    assert!(a.is_disjoint(&b));
    let switches = |(e, s): (usize, usize)| -> HashSet<usize> {
        [e, s]
            .iter()
            .flat_map(|&x| [HalfBranchEnd::first(x), HalfBranchEnd::second(x)])
            .map(|h| t.attachment(h).0)
            .collect()
    };
    assert!(switches(pairs[0]).is_disjoint(&switches(pairs[1])));
}

#[test]
fn corpus_satisfies_counting_identities() {
    for (name, t) in corpus() {
        assert_eq!(2 * t.branch_count(), 3 * t.switch_count(), "{name}");
        let ty = t.topological_type().unwrap();
        let sum: usize = ty.polygon_orders.iter().sum();
        assert_eq!(sum + 4, 4 * ty.genus + ty.punctures, "{name}");
        let cusps: usize = t.complementary_regions().iter().map(|r| r.cusps).sum();
        assert_eq!(cusps, t.switch_count(), "{name}");
    }
}

#[test]
fn corpus_round_trips() {
    for (name, t) in corpus() {
        let text = serialize_track(&t);
        assert_eq!(serialize_track(&parse_track(&text).unwrap()), text, "{name}");
        let path = common::fixtures_dir().join(if name.contains('_') {
            format!("corpus/{name}")
        } else {
            name.clone()
        });
        assert_eq!(
            std::fs::read_to_string(path).unwrap(),
            text,
            "{name} is stored normalized"
        );
    }
}

/// Each dart lies on exactly one region boundary.
fn sides_partition(t: &TrainTrack) -> bool {
    let regions = t.complementary_regions();
    (0..t.branch_count())
        .flat_map(|b| [HalfBranchEnd::first(b), HalfBranchEnd::second(b)])
        .all(|d| {
            regions
                .iter()
                .map(|r| r.boundary.iter().filter(|&&x| x == d).count())
                .sum::<usize>()
                == 1
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_tracks_are_consistent(seed in any::<u64>(), half in 1usize..6) {
        let Some(t) = sample(seed, 2 * half, false) else { return Ok(()) };
        prop_assert_eq!(2 * t.branch_count(), 3 * t.switch_count());
        prop_assert!(sides_partition(&t));
        if let Ok(ty) = t.topological_type() {
            let sum: usize = ty.polygon_orders.iter().sum();
            prop_assert_eq!(sum + 4, 4 * ty.genus + ty.punctures);
        }
        if t.complementary_regions().iter().any(|r| r.cusps % 2 == 1) {
            prop_assert!(!t.is_orientable());
        }
        let text = serialize_track(&t);
        prop_assert_eq!(serialize_track(&parse_track(&text).unwrap()), text);
    }

    #[test]
    fn oriented_samples_are_orientable(seed in any::<u64>(), half in 1usize..6) {
        let Some(t) = sample(seed, 2 * half, true) else { return Ok(()) };
        prop_assert!(t.is_orientable());
        prop_assert!(t.complementary_regions().iter().all(|r| r.cusps % 2 == 0));
    }

    #[test]
    fn relabeling_preserves_type(seed in any::<u64>()) {
        let t = fixture("genus2step1.trk");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::seq::SliceRandom;
        let mut sp: Vec<usize> = (0..t.switch_count()).collect();
        let mut bp: Vec<usize> = (0..t.branch_count()).collect();
        sp.shuffle(&mut rng);
        bp.shuffle(&mut rng);
        let flip: Vec<bool> = (0..t.branch_count()).map(|_| rand::Rng::gen(&mut rng)).collect();
        let u = t.permuted(&sp, &bp, &flip);
        prop_assert!(u.validate().is_ok());
        prop_assert_eq!(u.topological_type().unwrap(), t.topological_type().unwrap());
        prop_assert_eq!(u.is_orientable(), t.is_orientable());
        prop_assert_eq!(u.twist_connectors().len(), t.twist_connectors().len());
    }
}
