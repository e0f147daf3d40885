use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::LN_2;
use trak_core::dyadic::{
    alpha_m, completion, cylinder_min, dyadic_pressure, harmonic_block, harmonic_bound, zeta, zeta_max, zeta_min,
    zeta_n, BitSequence, MAX_PRESSURE_N,
};
use trak_core::linalg::Q;
use trak_core::{Execution, TrakError};

fn random_sequence(rng: &mut ChaCha8Rng, radius: i64) -> BitSequence {
    let mut x = BitSequence::new(rng.gen(), rng.gen());
    for i in -radius..radius {
        x.set(i, rng.gen());
    }
    x
}

/// Ones at even indices in `[-radius, radius]`.
fn alternating(radius: i64) -> BitSequence {
    BitSequence::from_ones((-radius..=radius).filter(|i| i % 2 == 0))
}

#[test]
fn zero_tails_give_exactly_one() {
    for s in ["0(.1)1", "1(1.)0", "0(.)0", "0(000.101)1"] {
        let x: BitSequence = s.parse().unwrap();
        let z = zeta(&x, 1e-12);
        assert_eq!(z.value, 1.0, "{s}");
        assert_eq!(z.error_bound, 0.0, "{s}");
    }
    assert!(alpha_m(&"0(.1)1".parse().unwrap(), 5).is_err());
}

#[test]
fn log2_three_family() {
    let x = BitSequence::from_ones([-1, 0]);
    for m in 2..30 {
        assert!((alpha_m(&x, m).unwrap().value - 3f64.log2()).abs() < 1e-12);
    }
    let z = zeta(&x, 1e-12);
    assert!((z.value - 3f64.log2()).abs() <= 1e-9);
    assert!((z.value - zeta_max()).abs() <= 1e-12);
}

#[test]
fn all_ones_tends_to_one() {
    let x = BitSequence::new(true, true);
    let mut prev = f64::INFINITY;
    for m in 2..40u32 {
        let a = alpha_m(&x, m as u64).unwrap();
        let closed = ((2f64.powi(m as i32 + 1) - 1.0) / (2f64.powi(m as i32) - 1.0)).log2();
        assert!((a.value - closed).abs() < 1e-12);
        assert!(a.value > 1.0 && a.value < prev);
        prev = a.value;
    }
    assert!((zeta(&x, 1e-12).value - 1.0).abs() < 1e-9);
}

#[test]
fn alternating_sequence_is_one() {
    let z = zeta(&alternating(300), 1e-12);
    assert!((z.value - 1.0).abs() <= 1e-9, "{z:?}");
}

#[test]
fn range_endpoints_are_attained() {
    // N = 3 with c = 1/2: a left tail of ones ending at -3, then 0, 0, 1.
    let low: BitSequence = "1(00.1)0".parse().unwrap();
    let z = zeta(&low, 1e-13);
    assert!((z.value - zeta_min()).abs() <= 1e-9, "{z:?}");
    assert!(zeta_min() < 1.0);
    assert!((zeta_max() - 3f64.log2()).abs() < 1e-15);
}

#[test]
fn values_stay_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..500 {
        let x = random_sequence(&mut rng, 12);
        let z = zeta(&x, 1e-10);
        assert!(
            z.value >= zeta_min() - z.error_bound && z.value <= zeta_max() + z.error_bound,
            "{x}: {z:?}"
        );
        if let Some((i0, _)) = x.anchors() {
            for m in i0 + 1..i0 + 30 {
                let a = alpha_m(&x, m).unwrap().value;
                assert!(a >= zeta_min() - 1e-12 && a <= zeta_max() + 1e-12, "{x} m={m}: {a}");
            }
        }
    }
}

#[test]
fn error_bounds_are_honest() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let x = random_sequence(&mut rng, 10);
        let coarse = zeta(&x, 1e-3);
        let fine = zeta(&x, 1e-13);
        assert!(coarse.error_bound <= 1e-3 + 1e-12);
        assert!((coarse.value - fine.value).abs() <= coarse.error_bound + fine.error_bound);
    }
}

#[test]
fn continuity_modulus() {
    // Sequences agreeing on [-m, i1] share alpha_m, so zeta differs by at
    // most twice the Cauchy bound.
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut checked = 0;
    for _ in 0..300 {
        let x = random_sequence(&mut rng, 8);
        let Some((i0, i1)) = x.anchors() else { continue };
        let m = i0 + rng.gen_range(1..12);
        let mut y = random_sequence(&mut rng, 30);
        for i in -(m as i64)..=i1 as i64 {
            y.set(i, x.get(i));
        }
        assert_eq!(y.anchors(), Some((i0, i1)));
        let bound = 2.0 * 2f64.powi(i0 as i32 - m as i32) / ((i0 + i1) as f64 * LN_2);
        let diff = (zeta(&x, 1e-14).value - zeta(&y, 1e-14).value).abs();
        assert!(diff <= bound + 1e-12, "{x} {y} m={m}: {diff} > {bound}");
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn birkhoff_sums_split_along_the_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let x = random_sequence(&mut rng, 10);
        assert_eq!(zeta_n(&x, 1), zeta(&x, 1e-14).value);
        let (a, b) = (rng.gen_range(1..8u64), rng.gen_range(1..8u64));
        let whole = zeta_n(&x, a + b);
        let parts = zeta_n(&x, a) + zeta_n(&x.shift(a as i64), b);
        assert!((whole - parts).abs() <= 1e-12, "{x}: {whole} vs {parts}");
    }
}

#[test]
fn harmonic_blocks_match_exact_sums() {
    let mut exact = Q::zero();
    for j in 0..=12u32 {
        let lo = 1u64 << j;
        let block: Q = (lo..2 * lo).map(|i| Q::new(BigInt::from(1), BigInt::from(i))).sum();
        let v = block.to_f64().unwrap();
        assert!((harmonic_block(j) - v).abs() <= 1e-14, "j={j}");
        assert!((v - LN_2).abs() <= 2f64.powi(-(j as i32)), "j={j}");
        exact += block;
    }
    // The blocks tile the harmonic sum up to 2^13 - 1.
    let direct: Q = (1..1u64 << 13).map(|i| Q::new(BigInt::from(1), BigInt::from(i))).sum();
    assert_eq!(exact, direct);
}

#[test]
fn certified_minimum_is_below_every_completion() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for n in 1..=6u32 {
        for p in 0..1u64 << n {
            let m = cylinder_min(p, n);
            assert!(m.certified <= m.attained + 1e-12);
            let best = completion(p, n, m.a, m.first_right);
            assert!((zeta_n(&best, n as u64) - m.attained).abs() <= 1e-9, "p={p} n={n}");
            for _ in 0..40 {
                let mut x = random_sequence(&mut rng, 12);
                for i in 0..n {
                    x.set(i as i64, (p >> i) & 1 == 1);
                }
                let v = zeta_n(&x, n as u64);
                assert!(v >= m.certified - 1e-9, "p={p} n={n} {x}: {v} < {}", m.certified);
            }
        }
    }
}

#[test]
fn pressure_brackets_and_matches_the_one_letter_case() {
    let p1 = dyadic_pressure(1, Execution::Sequential).unwrap();
    let brute: f64 = (0..2).map(|p| 2f64.powf(-cylinder_min(p, 1).attained)).sum();
    assert!((p1.z_lower - brute).abs() < 1e-12);
    assert!((p1.z_lower - 1.1696).abs() < 1e-4, "{p1:?}");
    for n in 1..=12 {
        let p = dyadic_pressure(n, Execution::Sequential).unwrap();
        assert!(0.0 < p.z_lower && p.z_lower <= p.z_upper, "{p:?}");
        assert!(p.rate_lower <= p.rate_upper);
    }
}

#[test]
fn pressure_rates_shrink() {
    let rates: Vec<f64> = (8..=16)
        .map(|n| dyadic_pressure(n, Execution::Parallel).unwrap().rate_upper.abs())
        .collect();
    assert!(rates.windows(2).all(|w| w[1] < w[0]), "{rates:?}");
}

#[test]
fn parallel_pressure_matches_sequential() {
    let a = dyadic_pressure(13, Execution::Sequential).unwrap();
    let b = dyadic_pressure(13, Execution::Parallel).unwrap();
    assert_eq!(a.z_lower.to_bits(), b.z_lower.to_bits());
    assert_eq!(a.z_upper.to_bits(), b.z_upper.to_bits());
}

#[test]
fn pressure_range_is_checked() {
    assert!(matches!(
        dyadic_pressure(0, Execution::Sequential),
        Err(TrakError::OutOfRange(_))
    ));
    assert!(matches!(
        dyadic_pressure(MAX_PRESSURE_N + 1, Execution::Sequential),
        Err(TrakError::OutOfRange(_))
    ));
    assert!(harmonic_bound(1) > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_form_round_trips(bits in proptest::collection::vec(any::<bool>(), 1..20), split in 0usize..20, l: bool, r: bool) {
        let split = split.min(bits.len()) as i64;
        let mut x = BitSequence::new(l, r);
        for (k, &b) in bits.iter().enumerate() {
            x.set(k as i64 - split, b);
        }
        let back: BitSequence = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn shifts_compose(seed in any::<u64>(), a in -6i64..6, b in -6i64..6) {
        let x = random_sequence(&mut ChaCha8Rng::seed_from_u64(seed), 6);
        prop_assert_eq!(x.shift(a).shift(b), x.shift(a + b));
    }
}
