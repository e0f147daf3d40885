//! Subcommand implementations. Text goes to stdout, diagnostics to stderr;
//! every file-producing command writes a manifest next to its outputs.

use crate::manifest::Recorder;
use crate::{Cli, Command, DyadicCommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use std::fmt;
use std::path::{Component, Path, PathBuf};
use trak_core::dyadic::{dyadic_pressure, zeta, zeta_n, BitSequence};
use trak_core::measures::{cone_dimension, is_recurrent, is_transversely_recurrent, vertex_cycle_vectors};
use trak_core::moves::{parse_moves, replay};
use trak_core::symbolic::{build_subshift, BuildOptions, LetterMode, NumberedTrack, Subshift};
use trak_core::thermo::{birkhoff_table, contraction_check, count_orbits, pressure_from_table, PressureEstimate};
use trak_core::track::generate::search;
use trak_core::{parse_track, serialize_track, Execution, TrainTrack, TrakError};

/// A failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit code 1.
    Domain(String),
    /// Exit code 2.
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<TrakError> for CliError {
    fn from(e: TrakError) -> Self {
        CliError::Domain(e.to_string())
    }
}

type Res<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Relative paths starting with `fixtures/` are redirected to
/// `$TRAK_FIXTURES` when it is set.
pub fn resolve(path: &Path) -> PathBuf {
    let Some(dir) = std::env::var_os("TRAK_FIXTURES") else {
        return path.to_path_buf();
    };
    let mut comps = path.components();
    match comps.next() {
        Some(Component::Normal(first)) if first == "fixtures" => Path::new(&dir).join(comps.as_path()),
        _ => path.to_path_buf(),
    }
}

fn read(path: &Path, rec: Option<&mut Recorder>) -> Res<Vec<u8>> {
    let real = resolve(path);
    let bytes = std::fs::read(&real).map_err(|e| io_err(&real, e))?;
    if let Some(r) = rec {
        r.input(path, &bytes);
    }
    Ok(bytes)
}

fn read_text(path: &Path, rec: Option<&mut Recorder>) -> Res<String> {
    String::from_utf8(read(path, rec)?).map_err(|_| CliError::Domain(format!("{}: not UTF-8", path.display())))
}

fn read_track(path: &Path, rec: Option<&mut Recorder>) -> Res<TrainTrack> {
    let text = read_text(path, rec)?;
    parse_track(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn read_subshift(path: &Path, rec: &mut Recorder) -> Res<Subshift> {
    let text = read_text(path, Some(rec))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
    Ok(Subshift::from_json(&v)?)
}

fn out_dir(dir: &Path) -> Res<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn write_file(path: &Path, contents: &[u8]) -> Res<()> {
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

/// RFC 4180 CSV with a header row and LF line endings.
fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("report serializes"));
}

pub fn run(cli: &Cli, exec: Execution) -> Res<()> {
    match &cli.command {
        Command::Validate { path } => validate(cli, path),
        Command::Type { path } => type_cmd(cli, path),
        Command::Cone { path } => cone(cli, path, exec),
        Command::Moves(a) => moves(cli, a),
        Command::Subshift(a) => subshift(cli, a, exec),
        Command::Pressure(a) => pressure(cli, a, exec),
        Command::Orbits(a) => orbits(cli, a),
        Command::Contraction(a) => contraction(cli, a),
        Command::RandomTrack(a) => random_track(cli, a),
        Command::Dyadic(DyadicCommand::Zeta { bits, tol, n }) => dyadic_zeta(cli, bits, *tol, *n),
        Command::Dyadic(DyadicCommand::Pressure { n, csv }) => dyadic_table(cli, *n, csv.as_deref(), exec),
    }
}

fn validate(cli: &Cli, path: &Path) -> Res<()> {
    let t = read_track(path, None)?;
    let regions = t.complementary_regions().len();
    if cli.json {
        print_json(&json!({
            "valid": true,
            "branches": t.branch_count(),
            "switches": t.switch_count(),
            "regions": regions,
        }));
    } else {
        println!(
            "valid: {} branches, {} switches, {} regions",
            t.branch_count(),
            t.switch_count(),
            regions
        );
    }
    Ok(())
}

fn type_cmd(cli: &Cli, path: &Path) -> Res<()> {
    let t = read_track(path, None)?;
    let ty = t.topological_type()?;
    let dim = cone_dimension(&t);
    if cli.json {
        print_json(&json!({
            "type": ty.to_string(),
            "polygon_orders": ty.polygon_orders,
            "punctures": ty.punctures,
            "genus": ty.genus,
            "orientable": t.is_orientable(),
            "dim": dim,
        }));
    } else {
        println!("{ty} g={} dimV={dim}", ty.genus);
    }
    Ok(())
}

fn cone(cli: &Cli, path: &Path, exec: Execution) -> Res<()> {
    let t = read_track(path, None)?;
    let dim = cone_dimension(&t);
    let witness = is_recurrent(&t);
    if cli.json {
        let tangential = is_transversely_recurrent(&t);
        let rays = vertex_cycle_vectors(&t, exec);
        let expected = t
            .topological_type()
            .ok()
            .map(|ty| ty.expected_dimension(t.is_orientable()));
        print_json(&json!({
            "recurrent": witness.is_some(),
            "transversely_recurrent": tangential.is_some(),
            "dim": dim,
            "expected_dim": expected,
            "vertex_cycles": rays,
            "witness": witness.map(|w| w.weights.iter().map(|q| q.to_string()).collect::<Vec<_>>()),
        }));
    } else {
        println!("recurrent={} dim={dim}", witness.is_some());
    }
    Ok(())
}

fn moves(cli: &Cli, a: &crate::MovesArgs) -> Res<()> {
    let mut rec = Recorder::new("moves");
    let t = read_track(&a.track, Some(&mut rec))?;
    let script = read_text(&a.moves, Some(&mut rec))?;
    let mv = parse_moves(&script).map_err(|e| CliError::Domain(format!("{}: {e}", a.moves.display())))?;
    let (end, m) = replay(&t, &mv)?;
    let text = serialize_track(&end);
    let old_ids = t.branch_labels();
    let new_ids = end.branch_labels();
    let mut header = vec!["branch".to_string()];
    header.extend(new_ids.iter().map(|b| b.to_string()));
    let rows: Vec<Vec<String>> = (0..m.rows)
        .map(|i| {
            std::iter::once(old_ids[i].to_string())
                .chain(m.row(i).iter().map(|x| x.to_string()))
                .collect()
        })
        .collect();
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        write_file(&dir.join("track.trk"), text.as_bytes())?;
        let h: Vec<&str> = header.iter().map(String::as_str).collect();
        write_file(&dir.join("matrix.csv"), &csv_bytes(&h, &rows))?;
        rec.write(dir).map_err(|e| io_err(dir, e))?;
    }
    if cli.json {
        print_json(&json!({ "track": text, "matrix": m.to_rows(), "moves": mv.len() }));
    } else {
        print!("{text}");
        println!("# carrying matrix {}x{}", m.rows, m.cols);
        print!("{m}");
    }
    Ok(())
}

fn subshift(cli: &Cli, a: &crate::SubshiftArgs, exec: Execution) -> Res<()> {
    let mut rec = Recorder::new("subshift");
    let t = read_track(&a.seed, Some(&mut rec))?;
    let opts = BuildOptions {
        mode: if a.numbered {
            LetterMode::Numbered
        } else {
            LetterMode::Unnumbered
        },
        budget: a.budget,
        exec,
    };
    let mut s = build_subshift(&[NumberedTrack::identity(t)], opts)?;
    if a.core {
        s = s.recurrent_core();
    }
    let transitive = s.is_transitive().ok();
    let mixing = s.is_mixing().ok();
    let radius = s.spectral_radius()?;
    let summary = json!({
        "letters": s.len(),
        "transitions": s.transitions.len(),
        "closed": s.closed,
        "pruned": s.pruned,
        "transitive": transitive,
        "mixing": mixing,
        "spectral_radius": radius,
    });
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        let body = serde_json::to_string_pretty(&s.to_json()).expect("subshift serializes") + "\n";
        write_file(&dir.join("subshift.json"), body.as_bytes())?;
        write_file(&dir.join("subshift.dot"), s.to_dot().as_bytes())?;
        rec.write(dir).map_err(|e| io_err(dir, e))?;
    }
    if cli.json {
        print_json(&summary);
    } else {
        let flag = |x: Option<bool>| x.map_or("n/a".to_string(), |b| b.to_string());
        println!(
            "letters={} transitions={} closed={} pruned={} transitive={} mixing={} lambda={radius}",
            s.len(),
            s.transitions.len(),
            s.closed,
            s.pruned,
            flag(transitive),
            flag(mixing)
        );
    }
    Ok(())
}

fn pressure_row(p: &PressureEstimate) -> Vec<String> {
    vec![
        p.n.to_string(),
        p.s.to_string(),
        p.z_lower.to_string(),
        p.z_upper.to_string(),
        p.rate_lower.to_string(),
        p.rate_upper.to_string(),
    ]
}

fn pressure(cli: &Cli, a: &crate::PressureArgs, exec: Execution) -> Res<()> {
    let mut rec = Recorder::new("pressure");
    let s = read_subshift(&a.subshift, &mut rec)?;
    let mut rows = Vec::new();
    for &n in &a.n {
        let table = birkhoff_table(&s, n, a.guard, exec)?;
        for &sv in &a.s {
            rows.push(pressure_from_table(&table, sv));
        }
    }
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        let body: Vec<Vec<String>> = rows.iter().map(pressure_row).collect();
        let header = ["n", "s", "Z_lower", "Z_upper", "rate_lower", "rate_upper"];
        write_file(&dir.join("pressure.csv"), &csv_bytes(&header, &body))?;
        rec.write(dir).map_err(|e| io_err(dir, e))?;
    }
    if cli.json {
        print_json(&rows);
    } else {
        for p in &rows {
            println!(
                "n={} s={} Z=[{}, {}] rate=[{}, {}]",
                p.n, p.s, p.z_lower, p.z_upper, p.rate_lower, p.rate_upper
            );
        }
    }
    Ok(())
}

fn orbits(cli: &Cli, a: &crate::OrbitsArgs) -> Res<()> {
    let mut rec = Recorder::new("orbits");
    let s = read_subshift(&a.subshift, &mut rec)?;
    let table = count_orbits(&s, a.r, a.step, a.max_length, a.budget)?;
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        let body: Vec<Vec<String>> = table
            .rows
            .iter()
            .map(|(r, c)| vec![r.to_string(), c.to_string()])
            .collect();
        write_file(&dir.join("orbits.csv"), &csv_bytes(&["R", "count"], &body))?;
        rec.write(dir).map_err(|e| io_err(dir, e))?;
    }
    if cli.json {
        print_json(&table);
    } else {
        for (r, c) in &table.rows {
            println!("R={r} count={c}");
        }
        println!(
            "cycles={} non_primitive={} complete_below={} exponent={} truncated={}",
            table.cycles, table.non_primitive, table.complete_below, table.exponent, table.truncated
        );
    }
    Ok(())
}

fn contraction(cli: &Cli, a: &crate::ContractionArgs) -> Res<()> {
    let mut rec = Recorder::new("contraction");
    rec.seed(a.seed);
    let s = read_subshift(&a.subshift, &mut rec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let r = contraction_check(&s, &a.word, a.trials, &mut rng)?;
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        let body =
            serde_json::to_string_pretty(&json!({ "word": a.word, "report": r })).expect("report serializes") + "\n";
        write_file(&dir.join("contraction.json"), body.as_bytes())?;
        rec.write(dir).map_err(|e| io_err(dir, e))?;
    }
    if cli.json {
        print_json(&json!({ "seed": a.seed, "report": r }));
    } else {
        println!(
            "trials={} violations={} fixed_points={} delta_hat={} kappa_hat={} kappa_above_one={}",
            r.trials, r.violations, r.fixed_points, r.delta_hat, r.kappa_hat, r.kappa_above_one
        );
    }
    if r.violations > 0 {
        return Err(CliError::Domain(format!(
            "{} trials violate strict contraction",
            r.violations
        )));
    }
    Ok(())
}

fn random_track(cli: &Cli, a: &crate::RandomTrackArgs) -> Res<()> {
    let mut rec = Recorder::new("random-track");
    rec.seed(a.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let t = search(&mut rng, a.switches, a.oriented, a.tries, |t| {
        !a.recurrent || (t.is_connected() && is_recurrent(t).is_some())
    })
    .ok_or_else(|| CliError::Domain(format!("no acceptable track in {} samples", a.tries)))?;
    let text = serialize_track(&t);
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        write_file(&dir.join("track.trk"), text.as_bytes())?;
        rec.write(dir).map_err(|e| io_err(dir, e))?;
    }
    if cli.json {
        print_json(&json!({ "seed": a.seed, "track": text }));
    } else {
        print!("{text}");
    }
    Ok(())
}

fn dyadic_zeta(cli: &Cli, bits: &str, tol: f64, n: Option<u64>) -> Res<()> {
    if !(tol > 0.0) {
        return Err(CliError::Domain("--tol must be positive".into()));
    }
    let x: BitSequence = bits.parse()?;
    let z = zeta(&x, tol);
    let sum = n.map(|n| zeta_n(&x, n));
    if cli.json {
        print_json(&json!({ "bits": x.to_string(), "zeta": z, "zeta_n": sum }));
    } else {
        println!("zeta={} error<={:e}", z.value, z.error_bound);
        if let (Some(n), Some(v)) = (n, sum) {
            println!("zeta_{n}={v}");
        }
    }
    Ok(())
}

fn dyadic_table(cli: &Cli, n: u32, csv_path: Option<&Path>, exec: Execution) -> Res<()> {
    let rec = Recorder::new("dyadic pressure");
    let rows = (1..=n)
        .map(|k| dyadic_pressure(k, exec))
        .collect::<trak_core::Result<Vec<_>>>()?;
    if let Some(path) = csv_path {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        out_dir(&dir)?;
        let body: Vec<Vec<String>> = rows
            .iter()
            .map(|d| {
                vec![
                    d.n.to_string(),
                    d.z_lower.to_string(),
                    d.z_upper.to_string(),
                    d.rate_lower.to_string(),
                    d.rate_upper.to_string(),
                    d.harmonic_bound.to_string(),
                ]
            })
            .collect();
        let header = ["n", "Z_lower", "Z_upper", "rate_lower", "rate_upper", "harmonic_bound"];
        write_file(path, &csv_bytes(&header, &body))?;
        rec.write(&dir).map_err(|e| io_err(&dir, e))?;
    }
    if cli.json {
        print_json(&rows);
    } else {
        for d in &rows {
            println!(
                "n={} Z=[{}, {}] rate=[{}, {}] harmonic_bound={}",
                d.n, d.z_lower, d.z_upper, d.rate_lower, d.rate_upper, d.harmonic_bound
            );
        }
    }
    Ok(())
}
