mod common;

use common::{corpus, fixture};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use trak_core::canonical::canonical_code;
use trak_core::linalg::Q;
use trak_core::measures::{is_recurrent, vertex_cycle_vectors};
use trak_core::moves::{
    choice_maps, dominated, full_split, full_split_in_order, parse_moves, pull_back, replay, shift, split,
    split_resolve, star, total, CarryingMatrix, Move, SplitChoice, SplitDirection,
};
use trak_core::thermo::random_measure;
use trak_core::{BranchKind, Execution, TrainTrack, TrakError};

/// All permutations of `v`, by Heap's algorithm.
fn permutations(v: &[usize]) -> Vec<Vec<usize>> {
    let mut a = v.to_vec();
    let mut out = vec![a.clone()];
    let mut c = vec![0; a.len()];
    let mut i = 0;
    while i < a.len() {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn every_column_positive(m: &CarryingMatrix) -> bool {
    (0..m.cols).all(|j| (0..m.rows).any(|i| m.get(i, j) > 0))
}

fn measure_on(t: &TrainTrack, rng: &mut ChaCha8Rng) -> Vec<Q> {
    random_measure(&vertex_cycle_vectors(t, Execution::Sequential), rng)
}

fn satisfies_switches(t: &TrainTrack, w: &[Q]) -> bool {
    trak_core::measures::TransverseMeasure::new(w.to_vec()).check(t).is_ok()
}

/// Primitive integer vector of a nonnegative rational vector.
fn primitive(v: &[Q]) -> Vec<u64> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let l = v.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Q::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    ints.iter().map(|x| (x / &g).to_u64().unwrap()).collect()
}

#[test]
fn shift_is_undone_by_shifting_back() {
    let mut checked = 0;
    for (name, t) in corpus() {
        let rays = vertex_cycle_vectors(&t, Execution::Sequential);
        for b in t.branches_of_kind(BranchKind::Mixed) {
            let Ok((t1, m1)) = shift(&t, b) else { continue };
            assert_eq!(t1.topological_type().unwrap(), t.topological_type().unwrap(), "{name}");
            // The new weight of `b` is determined by its neighbours, so only
            // its own column vanishes.
            for j in 0..m1.cols {
                assert_eq!((0..m1.rows).any(|i| m1.get(i, j) > 0), j != b, "{name} column {j}");
            }
            let (t2, m2) = shift(&t1, b).unwrap();
            assert_eq!(canonical_code(&t2, None), canonical_code(&t, None), "{name} branch {b}");
            // The round trip is the identity on the cone.
            let m = m1.mul(&m2).unwrap();
            let mut image: Vec<Vec<u64>> = vertex_cycle_vectors(&t2, Execution::Sequential)
                .iter()
                .map(|c| primitive(&m.apply(&c.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect::<Vec<_>>())))
                .collect();
            image.sort();
            assert_eq!(image, rays, "{name} branch {b}");
            checked += 1;
        }
    }
    assert!(checked > 10);
}

#[test]
fn shift_transports_measures() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, t) in corpus() {
        for b in t.branches_of_kind(BranchKind::Mixed) {
            let Ok((t1, m)) = shift(&t, b) else { continue };
            let w = is_recurrent(&t1).expect("shifts preserve recurrence").weights;
            assert!(satisfies_switches(&t, &m.apply(&w)), "{name}");
            let mu = measure_on(&t1, &mut rng);
            assert!(satisfies_switches(&t, &m.apply(&mu)), "{name}");
        }
    }
}

#[test]
fn shift_rejects_non_mixed_branches() {
    let t = fixture("sphere5.trk");
    let e = t.large_branches()[0];
    assert!(matches!(shift(&t, e), Err(TrakError::WrongBranchKind { .. })));
}

/// Split law and total-weight bracket for one positive measure.
fn check_split_law(t: &TrainTrack, e: usize, mu: &[Q]) -> bool {
    let dir = split_resolve(t, e, mu).unwrap();
    if dir == SplitDirection::Central {
        return true;
    }
    let (t1, m) = split(
        t,
        SplitChoice {
            large_branch: e,
            direction: dir,
        },
    )
    .unwrap();
    let nu = pull_back(t, e, mu, dir).unwrap();
    let st = star(t, e).unwrap();
    let (x, y) = if dir == SplitDirection::Right {
        (st.b.branch, st.d.branch)
    } else {
        (st.a.branch, st.c.branch)
    };
    let half = Q::new(BigInt::one(), BigInt::from(2));
    nu.iter().all(|w| w >= &Q::zero())
        && satisfies_switches(&t1, &nu)
        && m.apply(&nu) == mu
        && mu[e] == &nu[e] + &nu[x] + &nu[y]
        && total(&nu) >= half
        && total(&nu) <= Q::one()
}

#[test]
fn split_law_on_random_measures() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tracks = corpus();
    let mut done = 0;
    while done < 1000 {
        let (name, t) = &tracks[rng.gen_range(0..tracks.len())];
        let large = t.large_branches();
        let e = large[rng.gen_range(0..large.len())];
        let mu = measure_on(t, &mut rng);
        assert_eq!(total(&mu), Q::one());
        assert!(check_split_law(t, e, &mu), "{name} at branch {e}");
        done += 1;
    }
}

#[test]
fn central_split_of_the_square_track_is_orientable() {
    let t = fixture("genus2one.trk");
    let large = t.large_branches();
    assert_eq!(large.len(), 1);
    let (c, m) = split(
        &t,
        SplitChoice {
            large_branch: large[0],
            direction: SplitDirection::Central,
        },
    )
    .unwrap();
    // Removing the diagonal leaves two bivalent switches, which dissolve.
    assert_eq!(c.branch_count(), t.branch_count() - 3);
    assert_eq!(c.switch_count(), t.switch_count() - 2);
    assert_eq!((m.rows, m.cols), (t.branch_count(), c.branch_count()));
    assert!(c.is_orientable());
}

#[test]
fn left_and_right_differ_only_on_the_star() {
    for (name, t) in corpus() {
        for e in t.large_branches() {
            let st = star(&t, e).unwrap();
            let (_, l) = split(
                &t,
                SplitChoice {
                    large_branch: e,
                    direction: SplitDirection::Left,
                },
            )
            .unwrap();
            let (_, r) = split(
                &t,
                SplitChoice {
                    large_branch: e,
                    direction: SplitDirection::Right,
                },
            )
            .unwrap();
            let rows = l.differing_rows(&r);
            assert!(!rows.is_empty(), "{name}");
            let star_branches = [e, st.a.branch, st.b.branch, st.c.branch, st.d.branch];
            assert!(rows.iter().all(|x| star_branches.contains(x)), "{name}: {rows:?}");
        }
    }
}

#[test]
fn splits_preserve_type_and_cover_columns() {
    for (name, t) in corpus() {
        let ty = t.topological_type().unwrap();
        for e in t.large_branches() {
            for dir in [SplitDirection::Left, SplitDirection::Right] {
                let (t1, m) = split(
                    &t,
                    SplitChoice {
                        large_branch: e,
                        direction: dir,
                    },
                )
                .unwrap();
                assert_eq!(t1.topological_type().unwrap(), ty, "{name}");
                assert!(every_column_positive(&m), "{name}");
                assert_eq!(
                    m.column_sums().iter().sum::<u128>(),
                    t.branch_count() as u128 + 2,
                    "{name}"
                );
            }
        }
    }
}

#[test]
fn full_split_is_order_independent() {
    let mut checked = 0;
    for (name, t) in corpus() {
        let large = t.large_branches();
        if large.len() > 3 {
            continue;
        }
        for ch in choice_maps(&t) {
            let (base, bm) = full_split(&t, &ch).unwrap();
            for order in permutations(&large) {
                let (u, um) = full_split_in_order(&t, &ch, &order).unwrap();
                assert_eq!(canonical_code(&u, None), canonical_code(&base, None), "{name}");
                assert_eq!(um, bm, "{name}");
            }
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn distinct_large_branches_commute() {
    for (name, t) in corpus() {
        let large = t.large_branches();
        for (i, &e) in large.iter().enumerate() {
            for &f in &large[i + 1..] {
                for (de, df) in [
                    (SplitDirection::Left, SplitDirection::Right),
                    (SplitDirection::Right, SplitDirection::Right),
                ] {
                    let ch: BTreeMap<usize, SplitDirection> = [(e, de), (f, df)].into();
                    let one = |a: usize, b: usize| {
                        let (x, m1) = split(
                            &t,
                            SplitChoice {
                                large_branch: a,
                                direction: ch[&a],
                            },
                        )
                        .unwrap();
                        let (y, m2) = split(
                            &x,
                            SplitChoice {
                                large_branch: b,
                                direction: ch[&b],
                            },
                        )
                        .unwrap();
                        (canonical_code(&y, None), m1.mul(&m2).unwrap())
                    };
                    assert_eq!(one(e, f), one(f, e), "{name}");
                }
            }
        }
    }
}

#[test]
fn all_left_and_all_right_differ() {
    let t = fixture("genus2max.trk");
    let large = t.large_branches();
    let all = |d| large.iter().map(|&e| (e, d)).collect::<BTreeMap<_, _>>();
    let (l, _) = full_split(&t, &all(SplitDirection::Left)).unwrap();
    let (r, _) = full_split(&t, &all(SplitDirection::Right)).unwrap();
    assert_ne!(canonical_code(&l, None), canonical_code(&r, None));
}

#[test]
fn full_split_rejects_wrong_keys() {
    let t = fixture("genus2max.trk");
    let mut ch = choice_maps(&t).remove(0);
    let first = *ch.keys().next().unwrap();
    ch.remove(&first);
    assert!(matches!(full_split(&t, &ch), Err(TrakError::Precondition(_))));
}

#[test]
fn split_resolve_convention() {
    let t = fixture("sphere5.trk");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut seen = [false; 3];
    for _ in 0..200 {
        let mu = measure_on(&t, &mut rng);
        for e in t.large_branches() {
            let st = star(&t, e).unwrap();
            let dir = split_resolve(&t, e, &mu).unwrap();
            let expected = match mu[st.a.branch].cmp(&mu[st.d.branch]) {
                std::cmp::Ordering::Greater => SplitDirection::Right,
                std::cmp::Ordering::Less => SplitDirection::Left,
                std::cmp::Ordering::Equal => SplitDirection::Central,
            };
            assert_eq!(dir, expected);
            seen[dir as usize % 3] = true;
        }
    }
    // Vertex cycles hit the collision case.
    for c in vertex_cycle_vectors(&t, Execution::Sequential) {
        let mu: Vec<Q> = c.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect();
        for e in t.large_branches() {
            let dir = split_resolve(&t, e, &mu).unwrap();
            let nu = pull_back(&t, e, &mu, dir).unwrap();
            assert!(nu.iter().all(|w| w >= &Q::zero()));
            if dir == SplitDirection::Central {
                let (c, m) = split(
                    &t,
                    SplitChoice {
                        large_branch: e,
                        direction: dir,
                    },
                )
                .unwrap();
                assert!(satisfies_switches(&c, &nu));
                assert_eq!(m.apply(&nu), mu);
                let positive_off_diagonal = mu.iter().enumerate().all(|(b, w)| b == e || w > &Q::zero());
                assert_eq!(nu.iter().all(|w| w > &Q::zero()), positive_off_diagonal);
            }
        }
    }
}

#[test]
fn move_scripts_replay() {
    let t = fixture("sphere5.trk");
    let e = t.large_branches()[0];
    let id = t.branch_labels()[e];
    let script = format!("moves v1\n# one split\nsplit {id} R\n");
    let mv = parse_moves(&script).unwrap();
    assert_eq!(
        mv,
        vec![Move::Split {
            branch: id,
            direction: SplitDirection::Right
        }]
    );
    let (u, m) = replay(&t, &mv).unwrap();
    let (v, n) = split(
        &t,
        SplitChoice {
            large_branch: e,
            direction: SplitDirection::Right,
        },
    )
    .unwrap();
    assert_eq!((u, m), (v, n));
    assert!(parse_moves("split 1 R\n").is_err());
    assert!(parse_moves("moves v1\nsplit 1 Q\n").is_err());
    assert!(replay(&t, &parse_moves("moves v1\nshift 999\n").unwrap()).is_err());
}

/// A random admissible move: a left/right split or a shift.
fn random_move(t: &TrainTrack, rng: &mut ChaCha8Rng) -> Option<(TrainTrack, CarryingMatrix)> {
    let mixed = t.branches_of_kind(BranchKind::Mixed);
    if rng.gen_bool(0.3) && !mixed.is_empty() {
        if let Ok(r) = shift(t, *mixed.choose(rng).unwrap()) {
            return Some(r);
        }
    }
    let e = *t.large_branches().choose(rng)?;
    let dir = if rng.gen() {
        SplitDirection::Left
    } else {
        SplitDirection::Right
    };
    split(
        t,
        SplitChoice {
            large_branch: e,
            direction: dir,
        },
    )
    .ok()
}

/// Carrying monotonicity over one random move word; returns whether it holds.
pub fn monotonicity_trial(t: &TrainTrack, rng: &mut ChaCha8Rng) -> bool {
    let len = rng.gen_range(1..=10);
    let mut cur = t.clone();
    let mut m = CarryingMatrix::identity(t.branch_count());
    for _ in 0..len {
        let Some((next, step)) = random_move(&cur, rng) else {
            break;
        };
        m = m.mul(&step).unwrap();
        cur = next;
    }
    let cycles = vertex_cycle_vectors(&cur, Execution::Sequential);
    if cycles.is_empty() {
        return true;
    }
    let mu = random_measure(&cycles, rng);
    let nu = random_measure(&cycles, rng);
    let a0 = mu
        .iter()
        .zip(&nu)
        .filter(|(_, y)| !y.is_zero())
        .map(|(x, y)| x / y)
        .max()
        .unwrap();
    if !dominated(&mu, &nu, &a0) {
        return true;
    }
    dominated(&m.apply(&mu), &m.apply(&nu), &a0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn carrying_preserves_domination(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tracks = corpus();
        let t = &tracks[rng.gen_range(0..tracks.len())].1;
        prop_assert!(monotonicity_trial(t, &mut rng));
    }

    #[test]
    fn split_law_holds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = fixture("genus2max.trk");
        let e = *t.large_branches().choose(&mut rng).unwrap();
        let mu = measure_on(&t, &mut rng);
        prop_assert!(check_split_law(&t, e, &mu));
    }
}
