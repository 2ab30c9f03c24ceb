mod commands;
mod error;

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use negsp::graph::WeightBound;
use negsp::{DirectedGraph, SolverConfig};

use crate::error::CliError;

/// Negative-weight single-source shortest paths through a metered
/// non-negative oracle.
///
/// Graphs are read in DIMACS shortest-path format (`p sp n m`, `a u v w`).
/// Vertex and arc ids in every report are 1-based, as in the file.
///
/// Exit status: 0 success, 1 usage or I/O error, 2 algorithmic ERROR,
/// 3 verification mismatch.
#[derive(Parser, Debug)]
#[command(name = "negsp", version)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every random choice; echoed in the report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output format. `tsv` prints one `vertex<TAB>value` line per vertex.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for the iterations of the top-level scaling step.
    /// Results do not depend on it.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=256))]
    pub threads: u32,

    /// Largest accepted |weight|: an integer, or `none` to keep only the
    /// overflow guard. Defaults to n^4.
    #[arg(long, global = true, value_name = "N|none", value_parser = parse_bound)]
    pub weight_bound: Option<WeightBound>,

    /// Count every oracle query instead of batching disjoint calls.
    #[arg(long, global = true)]
    pub raw_calls: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

fn parse_bound(s: &str) -> Result<WeightBound, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(WeightBound::Unbounded);
    }
    match s.parse::<i64>() {
        Ok(b) if b >= 0 => Ok(WeightBound::Explicit(b as i128)),
        _ => Err(format!("expected a non-negative integer or `none`, got {s:?}")),
    }
}

#[derive(Args, Debug, Clone)]
pub struct Tuning {
    /// Branching factor of the scaling recursion.
    #[arg(long)]
    pub k: Option<usize>,

    /// Iterations per scaling step.
    #[arg(long)]
    pub iters: Option<usize>,

    /// Hop budget of the final estimate in each iteration.
    #[arg(long)]
    pub h3: Option<usize>,

    /// Constant in the default hop budget c_h * ceil(log2 n)^2 * k.
    #[arg(long, default_value_t = 3)]
    pub c_h: usize,

    /// Sample constant of the low-diameter decomposition.
    #[arg(long, default_value_t = 8)]
    pub ldd_c: u32,

    /// Disable early exits. Results are the same, call counts are not.
    #[arg(long)]
    pub no_shortcuts: bool,

    /// Reruns allowed on ERROR when a run is known to be cycle-free.
    #[arg(long, default_value_t = 20)]
    pub max_retries: usize,
}

impl Tuning {
    pub fn config(&self, common: &Common) -> SolverConfig {
        SolverConfig {
            k: self.k,
            iters: self.iters,
            h3: self.h3,
            c_h: self.c_h,
            ldd_c: self.ldd_c,
            shortcuts: !self.no_shortcuts,
            threads: common.threads as usize,
            max_retries: self.max_retries,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shortest-path distances from a source, or ERROR.
    Sssp {
        /// Input graph, or `-` for stdin.
        input: PathBuf,

        /// Source vertex (1-based).
        #[arg(long, default_value_t = 1)]
        source: usize,

        /// Assert the graph has no negative cycle: rerun with fresh seeds on ERROR.
        #[arg(long)]
        expect_no_cycle: bool,

        /// Compare against Bellman-Ford and report agreement.
        #[arg(long)]
        check: bool,

        #[command(flatten)]
        tuning: Tuning,
    },

    /// Distances, or a verified negative-weight cycle.
    Solve {
        input: PathBuf,

        #[arg(long, default_value_t = 1)]
        source: usize,

        /// Restarts before giving up.
        #[arg(long, default_value_t = negsp::negcycle::DEFAULT_MAX_RESTARTS)]
        max_restarts: usize,

        #[command(flatten)]
        tuning: Tuning,
    },

    /// Low-diameter decomposition of a graph with non-negative weights.
    Ldd {
        input: PathBuf,

        /// Target weak diameter D.
        #[arg(long)]
        diameter: i64,

        /// Sample constant c.
        #[arg(long, default_value_t = negsp::ldd::DEFAULT_C)]
        c: u32,
    },

    /// Strongly connected components with topologically ordered labels.
    Scc { input: PathBuf },

    /// Cross-check every algorithm against the reference implementations.
    Check {
        input: PathBuf,

        #[arg(long, default_value_t = 1)]
        source: usize,

        #[arg(long, default_value_t = negsp::negcycle::DEFAULT_MAX_RESTARTS)]
        max_restarts: usize,

        #[command(flatten)]
        tuning: Tuning,
    },

    /// Write a random Erdős–Rényi instance in DIMACS format.
    Gen(GenArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    /// Number of vertices.
    #[arg(long)]
    pub n: usize,

    /// Probability of each ordered pair.
    #[arg(long, conflicts_with = "degree")]
    pub p: Option<f64>,

    /// Expected out-degree; sets p = degree / (n - 1). Default 3.
    #[arg(long)]
    pub degree: Option<f64>,

    #[arg(long, default_value_t = -10, allow_negative_numbers = true)]
    pub min_weight: i64,

    #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
    pub max_weight: i64,

    /// Add a cycle of weight between -10 and -1.
    #[arg(long, conflicts_with = "no_negative_cycle")]
    pub plant_negative_cycle: bool,

    /// Guarantee the instance has no negative cycle.
    #[arg(long)]
    pub no_negative_cycle: bool,

    /// Write here instead of stdout; a JSON summary then goes to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// What a command prints and how the process exits.
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

impl Outcome {
    pub fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

pub fn load(path: &Path, common: &Common) -> Result<DirectedGraph, CliError> {
    let bound = common.weight_bound.unwrap_or(WeightBound::PolyDefault);
    let g = if path.as_os_str() == "-" {
        negsp::dimacs::read(io::stdin().lock(), bound)?
    } else {
        let file = File::open(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        negsp::dimacs::read(BufReader::new(file), bound)?
    };
    Ok(g)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let common = &cli.common;
    match cli.command {
        Command::Sssp { input, source, expect_no_cycle, check, tuning } => {
            let g = load(&input, common)?;
            commands::sssp(&g, source, expect_no_cycle, check, &tuning.config(common), common)
        }
        Command::Solve { input, source, max_restarts, tuning } => {
            let g = load(&input, common)?;
            commands::solve(&g, source, max_restarts, &tuning.config(common), common)
        }
        Command::Ldd { input, diameter, c } => commands::ldd(&load(&input, common)?, diameter, c, common),
        Command::Scc { input } => commands::scc(&load(&input, common)?, common),
        Command::Check { input, source, max_restarts, tuning } => {
            let g = load(&input, common)?;
            commands::check(&g, source, max_restarts, &tuning.config(common), common)
        }
        Command::Gen(args) => commands::gen(&args, common),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("negsp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
