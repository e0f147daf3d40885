//! The acceptance suite: twelve criteria, one PASS/FAIL line each. The test
//! fails if any criterion fails; tolerances are fixed here and never tuned.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};
use trak_core::dyadic::{alpha_m, dyadic_pressure, zeta, BitSequence};
use trak_core::linalg::Q;
use trak_core::measures::{cone_dimension, is_recurrent, vertex_cycle_vectors};
use trak_core::moves::{
    dominated, pull_back, shift, split, split_resolve, star, total, CarryingMatrix, SplitChoice, SplitDirection,
};
use trak_core::symbolic::{build_subshift, BuildOptions, NumberedTrack, Subshift};
use trak_core::thermo::{
    birkhoff_table, contraction_check, pressure_from_table, random_measure, roof_bounds, tight_weight_bound_holds,
    variation_profile, CYLINDER_GUARD,
};
use trak_core::{parse_track, BranchKind, Execution, TrainTrack};

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> TrainTrack {
    let path = fixtures_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_track(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Named fixtures plus `fixtures/corpus/*.trk`, all recurrent.
fn corpus() -> Vec<(String, TrainTrack)> {
    let mut names: Vec<String> = [
        "sphere5.trk",
        "genus2one.trk",
        "genus2step1.trk",
        "genus2step2.trk",
        "genus2max.trk",
        "twistconn.trk",
        "twoconn.trk",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut extra: Vec<String> = std::fs::read_dir(fixtures_dir().join("corpus"))
        .expect("corpus directory")
        .map(|e| e.expect("dir entry").file_name().into_string().expect("UTF-8 name"))
        .filter(|n| n.ends_with(".trk"))
        .map(|n| format!("corpus/{n}"))
        .collect();
    extra.sort();
    names.extend(extra);
    names.into_iter().map(|n| (n.clone(), fixture(&n))).collect()
}

fn build(seed: TrainTrack, budget: usize) -> Subshift {
    let opts = BuildOptions {
        budget,
        ..BuildOptions::default()
    };
    build_subshift(&[NumberedTrack::identity(seed)], opts).expect("subshift builds")
}

fn sphere5() -> Subshift {
    build(fixture("sphere5.trk"), 10_000)
}

/// Tight cycles through letter 0, shortest first, without the closing letter.
fn tight_cycles(s: &Subshift, count: usize) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut c = s
        .sample_tight_cycles(0, 10..30, 400, &mut rng)
        .expect("tight cycles exist");
    c.truncate(count);
    c
}

fn closed(w: &[usize]) -> Vec<usize> {
    let mut c = w.to_vec();
    c.push(w[0]);
    c
}

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn c1_dimensions() -> Outcome {
    let start = Instant::now();
    let all = corpus();
    let genera: HashSet<usize> = all.iter().map(|(_, t)| t.topological_type().unwrap().genus).collect();
    let mut bad = Vec::new();
    let mut maximal = 0;
    for (name, t) in &all {
        let ty = t.topological_type().unwrap();
        let dim = cone_dimension(t) as i64;
        let ok = is_recurrent(t).is_some()
            && dim == ty.expected_dimension(t.is_orientable())
            && (!ty.is_maximal() || dim == ty.maximal_dimension());
        maximal += ty.is_maximal() as usize;
        if !ok {
            bad.push(name.clone());
        }
    }
    let elapsed = start.elapsed();
    let pass = all.len() >= 10 && genera.len() == 3 && bad.is_empty() && elapsed < Duration::from_secs(1);
    Outcome::new(
        pass,
        format!(
            "{} tracks, genera {:?}, {maximal} maximal, mismatches {bad:?}, {elapsed:.2?}",
            all.len(),
            {
                let mut g: Vec<_> = genera.into_iter().collect();
                g.sort();
                g
            }
        ),
    )
}

fn measure_on(t: &TrainTrack, rng: &mut ChaCha8Rng) -> Vec<Q> {
    random_measure(&vertex_cycle_vectors(t, Execution::Sequential), rng)
}

/// Left/right split of `e` under a normalized measure `mu`; `None` when the
/// measure forces a central split.
fn split_law(t: &TrainTrack, e: usize, mu: &[Q]) -> Option<bool> {
    let dir = split_resolve(t, e, mu).unwrap();
    if dir == SplitDirection::Central {
        return None;
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
    let tot = total(&nu);
    Some(
        nu.iter().all(|w| w >= &Q::zero())
            && trak_core::measures::TransverseMeasure::new(nu.clone())
                .check(&t1)
                .is_ok()
            && m.apply(&nu) == mu
            && mu[e] == &nu[e] + &nu[x] + &nu[y]
            && tot >= half
            && tot <= Q::one(),
    )
}

fn c2_split_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tracks = corpus();
    let (mut done, mut violations, mut central) = (0, 0, 0);
    while done < 1000 {
        let (_, t) = &tracks[rng.gen_range(0..tracks.len())];
        let e = *t.large_branches().choose(&mut rng).unwrap();
        let mu = measure_on(t, &mut rng);
        assert_eq!(total(&mu), Q::one());
        match split_law(t, e, &mu) {
            None => central += 1,
            Some(ok) => {
                violations += !ok as usize;
                done += 1;
            }
        }
    }
    Outcome::new(
        violations == 0,
        format!("{done} splits, {violations} violations, {central} central draws redrawn"),
    )
}

fn c3_roof_bounds(s: &Subshift) -> Outcome {
    let p = s.branch_count;
    let cap = q(1i64 << p);
    let mut cylinders = 0usize;
    let mut over_cap = 0usize;
    let mut tight: HashSet<Vec<usize>> = HashSet::new();
    let mut by_len = Vec::new();
    for len in 2..=8 {
        let words = s.words(len, 10_000_000).unwrap();
        for w in &words {
            let b = roof_bounds(s, w).unwrap();
            over_cap += (b.upper_ratio > cap) as usize;
            if s.is_tight(w).unwrap() {
                tight.insert(w.clone());
            }
        }
        cylinders += words.len();
        by_len.push(words);
    }
    // Cylinders containing a tight block; every block has length at most 8,
    // so it is one of the words collected above.
    let mut with_block = 0usize;
    let mut nonpositive = 0usize;
    if !tight.is_empty() {
        for w in by_len.iter().flatten() {
            let contains = (0..w.len()).any(|i| (i + 2..=w.len()).any(|j| tight.contains(&w[i..j])));
            if contains {
                with_block += 1;
                nonpositive += (roof_bounds(s, w).unwrap().lower <= 0.0) as usize;
            }
        }
    }
    let weight_failures = tight
        .iter()
        .filter(|w| !tight_weight_bound_holds(s, w).unwrap())
        .count();
    // The shortest tight blocks are longer than eight letters; check the
    // same two properties on them with every predecessor letter.
    let (mut long_checked, mut long_failures) = (0, 0);
    for c in tight_cycles(s, 10) {
        let block = closed(&c);
        long_failures += !tight_weight_bound_holds(s, &block).unwrap() as usize;
        for pred in (0..s.len()).filter(|&i| s.has_edge(i, block[0])) {
            let mut w = vec![pred];
            w.extend_from_slice(&block);
            long_checked += 1;
            long_failures += (roof_bounds(s, &w).unwrap().lower <= 0.0) as usize;
        }
    }
    let pass = over_cap == 0 && nonpositive == 0 && weight_failures == 0 && long_failures == 0;
    Outcome::new(
        pass,
        format!(
            "{cylinders} cylinders, {over_cap} above p log 2, {} tight words of length <= 8, {with_block} cylinders with a \
             tight block ({nonpositive} nonpositive), {weight_failures} weight failures; {long_checked} cylinders \
             around longer tight blocks, {long_failures} failures",
            tight.len()
        ),
    )
}

/// A random left/right split or shift.
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

fn c4_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let tracks = corpus();
    let (mut violations, mut moves) = (0, 0);
    for _ in 0..1000 {
        let t = &tracks[rng.gen_range(0..tracks.len())].1;
        let len = rng.gen_range(1..=10);
        let mut cur = t.clone();
        let mut m = CarryingMatrix::identity(t.branch_count());
        for _ in 0..len {
            let Some((next, step)) = random_move(&cur, &mut rng) else {
                break;
            };
            m = m.mul(&step).unwrap();
            cur = next;
            moves += 1;
        }
        let cycles = vertex_cycle_vectors(&cur, Execution::Sequential);
        let mu = random_measure(&cycles, &mut rng);
        let nu = random_measure(&cycles, &mut rng);
        // The least a0 with mu <= a0 nu.
        let a0 = mu
            .iter()
            .zip(&nu)
            .filter(|(_, y)| !y.is_zero())
            .map(|(x, y)| x / y)
            .max()
            .unwrap();
        assert!(dominated(&mu, &nu, &a0));
        violations += !dominated(&m.apply(&mu), &m.apply(&nu), &a0) as usize;
    }
    Outcome::new(
        violations == 0,
        format!("1000 trials, {moves} moves, {violations} violations"),
    )
}

fn c5_contraction(s: &Subshift) -> Outcome {
    let words: Vec<Vec<usize>> = tight_cycles(s, 5).iter().map(|c| closed(c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pass = words.len() == 5;
    let mut parts = Vec::new();
    for w in &words {
        let r = contraction_check(s, w, 200, &mut rng).unwrap();
        pass &= r.violations == 0 && r.delta_hat > 0.0 && r.kappa_hat > 1.0 && r.kappa_above_one;
        parts.push(format!(
            "len {}: violations {} delta {:.3e} kappa {:.4}",
            w.len(),
            r.violations,
            r.delta_hat,
            r.kappa_hat
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn c6_variation(s: &Subshift) -> Outcome {
    let start = Instant::now();
    let induced = s.induced(&tight_cycles(s, 2)).unwrap();
    let v = variation_profile(&induced, 14, 10_000_000, Execution::Parallel).unwrap();
    let elapsed = start.elapsed();
    let pass = v.theta < 1.0 && v.r_squared >= 0.9 && elapsed < Duration::from_secs(300);
    Outcome::new(
        pass,
        format!(
            "induced on 2 tight blocks, n <= 14: theta {:.4}, R^2 {:.4}, {elapsed:.2?}",
            v.theta, v.r_squared
        ),
    )
}

/// Seeds are the letters of nontrivial terminal components; a raw seed
/// whose closure is already transitive is its own core. Closures without a
/// cycle carry no bi-infinite sequence and are listed apart.
fn c7_transitivity() -> Outcome {
    let mut checked = Vec::new();
    let mut skipped = Vec::new();
    let mut bad = Vec::new();
    for (name, t) in corpus() {
        let s = build(t, 3000);
        if !s.closed {
            skipped.push(format!("{name}: open at 3000"));
            continue;
        }
        let all: Vec<usize> = (0..s.len()).collect();
        if !s.graph().has_cycle_within(&all) {
            skipped.push(format!("{name}: empty shift, {} letters", s.len()));
            continue;
        }
        if s.is_transitive().unwrap() {
            checked.push(format!("{name}: {}", s.len()));
            continue;
        }
        let cores: Vec<Vec<usize>> = s
            .graph()
            .terminal_sccs()
            .into_iter()
            .filter(|c| s.graph().has_cycle_within(c))
            .collect();
        if cores.is_empty() {
            skipped.push(format!("{name}: transient, no recurrent core"));
        }
        for core in cores {
            let seed = s.letters[core[0]].track.clone().unwrap();
            let c = build(seed, 3000);
            if c.closed && c.is_transitive().unwrap() && c.len() == core.len() {
                checked.push(format!("{name} core: {}", c.len()));
            } else {
                bad.push(name.clone());
            }
        }
    }
    Outcome::new(
        bad.is_empty() && !checked.is_empty(),
        format!("transitive {checked:?}; skipped {skipped:?}; failures {bad:?}"),
    )
}

fn c8_word_counts(s: &Subshift) -> Outcome {
    // counts[i][j] after n steps, by walking every word.
    fn walk(s: &Subshift, start: usize, at: usize, depth: usize, max: usize, out: &mut [Vec<Vec<u64>>]) {
        if depth > 0 {
            out[depth][start][at] += 1;
        }
        if depth == max {
            return;
        }
        for &j in s.successors(at) {
            walk(s, start, j, depth + 1, max, out);
        }
    }
    let n_max = 6;
    let mut counts = vec![vec![vec![0u64; s.len()]; s.len()]; n_max + 1];
    for i in 0..s.len() {
        walk(s, i, i, 0, n_max, &mut counts);
    }
    let mut mismatches = 0;
    for (n, c) in counts.iter().enumerate().skip(1) {
        let p = s.power(n);
        for i in 0..s.len() {
            for j in 0..s.len() {
                mismatches += (p[i][j] != BigUint::from(c[i][j])) as usize;
            }
        }
    }
    Outcome::new(
        mismatches == 0,
        format!("{} letters, n <= {n_max}, {mismatches} mismatches", s.len()),
    )
}

fn c9_pressure(s: &Subshift) -> (Outcome, Outcome) {
    let log_lambda = s.spectral_radius().unwrap().ln();
    // At multiplier zero every cylinder weighs one, so Z_12 is the word count.
    let z12 = s.total_words(12).to_f64().unwrap();
    let rate = z12.ln() / 12.0;
    let first = Outcome::new(
        (rate - log_lambda).abs() <= 0.05,
        format!(
            "n=12: rate {rate:.6} vs log lambda {log_lambda:.6}, gap {:.4} (tolerance 0.05)",
            rate - log_lambda
        ),
    );
    let table = birkhoff_table(s, 8, CYLINDER_GUARD, Execution::Parallel).unwrap();
    let mut prev: Option<(f64, f64)> = None;
    let mut breaks = 0;
    let grid: Vec<f64> = (0..=60).map(|k| k as f64 * 0.05).collect();
    for &sv in &grid {
        let p = pressure_from_table(&table, sv);
        if let Some((lo, hi)) = prev {
            breaks += (p.rate_lower > lo || p.rate_upper > hi) as usize;
        }
        prev = Some((p.rate_lower, p.rate_upper));
    }
    let second = Outcome::new(
        breaks == 0,
        format!(
            "n=8, {} cylinders, {} multipliers in [0, 3]: {breaks} increases",
            table.bounds.len(),
            grid.len()
        ),
    );
    (first, second)
}

fn c10_dyadic() -> (Outcome, Outcome) {
    let start = Instant::now();
    let rows: Vec<_> = (1..=20)
        .map(|n| dyadic_pressure(n, Execution::Parallel).unwrap())
        .collect();
    let elapsed = start.elapsed();
    let last = rows.last().unwrap();
    let worst = last.rate_lower.abs().max(last.rate_upper.abs());
    let first = Outcome::new(
        worst <= 0.15 && elapsed < Duration::from_secs(120),
        format!(
            "n=20: rate in [{:.4}, {:.4}], {elapsed:.2?}",
            last.rate_lower, last.rate_upper
        ),
    );
    // Z_lower is a certified lower bound, so Z_lower > bound refutes the bound.
    let above: Vec<u32> = rows
        .iter()
        .filter(|d| d.z_lower > d.harmonic_bound)
        .map(|d| d.n)
        .collect();
    let second = Outcome::new(
        above.is_empty(),
        format!(
            "Z_n above the harmonic-block bound for n in {above:?}; n=20: Z >= {:.4}, bound {:.4}",
            last.z_lower, last.harmonic_bound
        ),
    );
    (first, second)
}

fn c11_dyadic_extremes() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for text in ["0(.1)1", "0(.)0", "1(1.)0", "0(000.101)1"] {
        let x: BitSequence = text.parse().unwrap();
        let z = zeta(&x, 1e-12);
        pass &= z.value == 1.0;
        parts.push(format!("{text} -> {}", z.value));
    }
    let x = BitSequence::from_ones([-1, 0]);
    let z = zeta(&x, 1e-12);
    let gap = (z.value - 3f64.log2()).abs();
    pass &= gap <= 1e-9;
    pass &= (2..40).all(|m| (alpha_m(&x, m).unwrap().value - 3f64.log2()).abs() <= 1e-9);
    parts.push(format!("ones at -1,0 -> |zeta - log2 3| = {gap:.2e}"));
    Outcome::new(pass, parts.join("; "))
}

/// Runs `trak` with `args`, returning stdout; panics on a nonzero exit.
fn trak(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_trak"))
        .args(args)
        .output()
        .expect("trak runs");
    assert!(
        out.status.success(),
        "trak {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

/// Every file in `dir` except the manifest, sorted by name.
fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn c12_determinism(s: &Subshift) -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let fx = fixtures_dir();
    let sphere = fx.join("sphere5.trk");
    let sphere = sphere.to_str().unwrap();
    let genus2 = fx.join("genus2max.trk");
    let genus2 = genus2.to_str().unwrap();
    let script = tmp.path().join("moves.txt");
    let t = fixture("sphere5.trk");
    let id = t.branch_labels()[t.large_branches()[0]];
    std::fs::write(&script, format!("moves v1\nsplit {id} L\n")).unwrap();
    let script = script.to_str().unwrap();

    // The subshift feeds the later commands, so build it once up front.
    let base = tmp.path().join("base");
    trak(&[
        "--threads",
        "1",
        "subshift",
        "--seed",
        sphere,
        "--out",
        base.to_str().unwrap(),
    ]);
    let shift_json = base.join("subshift.json");
    let shift_json = shift_json.to_str().unwrap().to_string();
    let tight = closed(&tight_cycles(s, 1)[0]);
    let word: Vec<String> = tight.iter().map(|x| x.to_string()).collect();
    let word = word.join(",");

    let commands: Vec<(&str, Vec<String>)> = vec![
        ("validate", vec!["validate".into(), sphere.into()]),
        ("type", vec!["type".into(), genus2.into()]),
        ("cone", vec!["--json".into(), "cone".into(), sphere.into()]),
        (
            "moves",
            vec![
                "moves".into(),
                sphere.into(),
                script.into(),
                "--out".into(),
                "{out}".into(),
            ],
        ),
        (
            "subshift",
            vec![
                "subshift".into(),
                "--seed".into(),
                sphere.into(),
                "--out".into(),
                "{out}".into(),
            ],
        ),
        (
            "pressure",
            [
                "pressure",
                "--subshift",
                &shift_json,
                "--n",
                "3,5",
                "--s",
                "0,0.5,1",
                "--out",
                "{out}",
            ]
            .map(String::from)
            .to_vec(),
        ),
        (
            "orbits",
            [
                "orbits",
                "--subshift",
                &shift_json,
                "--r",
                "8",
                "--max-length",
                "5",
                "--out",
                "{out}",
            ]
            .map(String::from)
            .to_vec(),
        ),
        (
            "contraction",
            [
                "contraction",
                "--subshift",
                &shift_json,
                "--word",
                &word,
                "--trials",
                "50",
                "--seed",
                "3",
                "--out",
                "{out}",
            ]
            .map(String::from)
            .to_vec(),
        ),
        (
            "random-track",
            [
                "random-track",
                "--switches",
                "8",
                "--seed",
                "11",
                "--recurrent",
                "--out",
                "{out}",
            ]
            .map(String::from)
            .to_vec(),
        ),
        (
            "dyadic zeta",
            ["dyadic", "zeta", "--bits", "0(110.01)1", "--n", "5"]
                .map(String::from)
                .to_vec(),
        ),
        (
            "dyadic pressure",
            ["dyadic", "pressure", "--n", "12", "--csv", "{out}/dyadic.csv"]
                .map(String::from)
                .to_vec(),
        ),
    ];
    let mut differ = Vec::new();
    for (name, args) in &commands {
        let mut runs = Vec::new();
        for threads in ["1", "4"] {
            let dir = tmp.path().join(format!("{}-{threads}", name.replace(' ', "-")));
            std::fs::create_dir_all(&dir).unwrap();
            let mut full = vec!["--threads".to_string(), threads.to_string()];
            full.extend(args.iter().map(|a| a.replace("{out}", dir.to_str().unwrap())));
            let argv: Vec<&str> = full.iter().map(String::as_str).collect();
            runs.push((trak(&argv), outputs(&dir)));
        }
        if runs[0] != runs[1] {
            differ.push(*name);
        }
    }
    Outcome::new(
        differ.is_empty(),
        format!(
            "{} commands, --threads 1 vs 4, stdout and files compared; differing {differ:?}",
            commands.len()
        ),
    )
}

#[test]
fn acceptance() {
    let s = sphere5();
    let mut lines = Vec::new();
    let mut record = |id: &str, o: Outcome| {
        let line = format!("{} {id}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        println!("{line}");
        lines.push((o.pass, line));
    };
    record("C1 dimension formulas", c1_dimensions());
    record("C2 split weight law", c2_split_law());
    record("C3 roof bounds", c3_roof_bounds(&s));
    record("C4 carrying monotonicity", c4_monotonicity());
    record("C5 contraction", c5_contraction(&s));
    record("C6 variation decay", c6_variation(&s));
    record("C7 transitivity", c7_transitivity());
    record("C8 word counts", c8_word_counts(&s));
    let (a, b) = c9_pressure(&s);
    record("C9 pressure at zero", a);
    record("C9 pressure monotone", b);
    let (a, b) = c10_dyadic();
    record("C10 dyadic rate", a);
    record("C10 harmonic bound", b);
    record("C11 dyadic extremes", c11_dyadic_extremes());
    record("C12 determinism", c12_determinism(&s));
    let failed: Vec<&String> = lines.iter().filter(|(p, _)| !p).map(|(_, l)| l).collect();
    assert!(
        failed.is_empty(),
        "failed criteria:\n{}",
        failed.iter().map(|l| l.as_str()).collect::<Vec<_>>().join("\n")
    );
}
