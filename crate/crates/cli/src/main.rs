//! `trak`: command-line front end for train tracks, subshifts and roof
//! functions.
//!
//! Exit codes: 0 success, 1 domain failure (invalid track, failed check,
//! unsatisfied precondition), 2 I/O or usage error.

mod commands;
mod manifest;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use trak_core::Execution;

#[derive(Parser, Debug)]
#[command(
    name = "trak",
    version,
    about = "Train tracks, carrying matrices, subshifts and roof functions"
)]
pub struct Cli {
    /// Machine-readable JSON on stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads; 1 runs every loop sequentially.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a track file.
    Validate { path: PathBuf },
    /// Topological type, genus and cone dimension.
    Type { path: PathBuf },
    /// Recurrence and cone dimension.
    Cone { path: PathBuf },
    /// Replay a move script and report the composite carrying matrix.
    Moves(MovesArgs),
    /// Build the subshift reachable from a seed track by full splits.
    Subshift(SubshiftArgs),
    /// Two-sided pressure sums over cylinders.
    Pressure(PressureArgs),
    /// Primitive periodic words binned by translation length.
    Orbits(OrbitsArgs),
    /// Min-ratio contraction and sup-norm expansion along a word.
    Contraction(ContractionArgs),
    /// Random valid track from a uniform slot matching.
    RandomTrack(RandomTrackArgs),
    /// The dyadic roof function.
    #[command(subcommand)]
    Dyadic(DyadicCommand),
}

#[derive(Args, Debug)]
pub struct MovesArgs {
    pub track: PathBuf,
    /// A `moves v1` script.
    pub moves: PathBuf,
    /// Directory for `track.trk`, `matrix.csv` and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SubshiftArgs {
    /// Seed track file.
    #[arg(long)]
    pub seed: PathBuf,
    /// Maximum number of letters.
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    /// Letters remember branch numberings.
    #[arg(long)]
    pub numbered: bool,
    /// Keep only the terminal strong component reached from the seed.
    #[arg(long)]
    pub core: bool,
    /// Directory for `subshift.json`, `subshift.dot` and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PressureArgs {
    /// A `subshift.json` written by `trak subshift`.
    #[arg(long)]
    pub subshift: PathBuf,
    /// Cylinder lengths (letters minus one), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Multipliers of the roof, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub s: Vec<f64>,
    /// Maximum number of cylinders per length.
    #[arg(long, default_value_t = trak_core::thermo::CYLINDER_GUARD)]
    pub guard: u64,
    /// Directory for `pressure.csv` and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OrbitsArgs {
    #[arg(long)]
    pub subshift: PathBuf,
    /// Largest translation length.
    #[arg(long)]
    pub r: f64,
    /// Bin width.
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
    /// Longest periodic word enumerated.
    #[arg(long, default_value_t = 8)]
    pub max_length: usize,
    /// Maximum number of cycles per word length.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
    /// Directory for `orbits.csv` and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ContractionArgs {
    #[arg(long)]
    pub subshift: PathBuf,
    /// Letters of a tight word, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub word: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// RNG seed; required so that runs are reproducible.
    #[arg(long)]
    pub seed: u64,
    /// Directory for `contraction.json` and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RandomTrackArgs {
    /// Number of switches (even).
    #[arg(long)]
    pub switches: usize,
    /// RNG seed; required so that runs are reproducible.
    #[arg(long)]
    pub seed: u64,
    /// Sample orientable tracks.
    #[arg(long)]
    pub oriented: bool,
    /// Only accept recurrent connected tracks.
    #[arg(long)]
    pub recurrent: bool,
    #[arg(long, default_value_t = 100_000)]
    pub tries: usize,
    /// Directory for `track.trk` and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum DyadicCommand {
    /// `zeta` of a bit sequence written `L(b_{-k}...b_{-1}.b_0...b_r)R`.
    Zeta {
        #[arg(long)]
        bits: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Also print the Birkhoff sum over this many shifts.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Bounds on the pressure sums `Z_1, ..., Z_n`.
    Pressure {
        #[arg(long)]
        n: u32,
        /// CSV output; the manifest goes next to it.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let exec = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        Some(1) => Execution::Sequential,
        Some(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: thread pool: {e}");
                return ExitCode::from(2);
            }
            Execution::Parallel
        }
        None => Execution::default(),
    };
    match commands::run(&cli, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
