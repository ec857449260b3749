mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::{Ctx, VERSION};

#[derive(Parser)]
#[command(name = "tcl", version = VERSION, about = "Uniform Turán density of tight cycles: constructions, certificates and verification")]
struct Cli {
    /// Seed for every randomized path.
    #[arg(long, env = "TCL_SEED", default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads for parallel subcommands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Omit the `meta` block (timestamps, timings) from JSON output.
    #[arg(long, global = true)]
    no_meta: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hosts built from pair colourings and a palette.
    #[command(subcommand)]
    Palette(PaletteCmd),
    /// Ordered red/green/blue certificates.
    #[command(subcommand)]
    Cert(CertCmd),
    /// Partitioned hypergraphs.
    #[command(subcommand)]
    Ph(PhCmd),
    /// Common-representative searches.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// The 27-variable optimization problem.
    #[command(subcommand)]
    Opt(OptCmd),
    /// Tight-cycle embedding schedules.
    #[command(subcommand)]
    Schedule(ScheduleCmd),
}

/// The forbidden or pattern hypergraph: a tight cycle or a JSON file.
#[derive(Args)]
struct Target {
    /// Tight cycle on this many vertices.
    #[arg(long, conflicts_with = "forbidden")]
    cycle: Option<usize>,
    /// Hypergraph JSON file.
    #[arg(long)]
    forbidden: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum PaletteCmd {
    /// Checks that every host on [n] avoids the forbidden hypergraph.
    Verify {
        /// Palette JSON (default: the 4/27 palette on three colours).
        #[arg(long)]
        palette: Option<PathBuf>,
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        /// Colourings drawn in sampled mode.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Prints |P|/k³ exactly.
    Density {
        #[arg(long)]
        palette: Option<PathBuf>,
    },
    /// Builds the host of a colouring.
    Host {
        #[arg(long)]
        palette: Option<PathBuf>,
        #[arg(long)]
        coloring: PathBuf,
    },
}

#[derive(Subcommand)]
enum CertCmd {
    /// Searches all orderings for a consistent colouring.
    Search {
        /// Hypergraph JSON file.
        #[arg(long, required_unless_present = "cycle")]
        input: Option<PathBuf>,
        /// Use the tight cycle on this many vertices instead.
        #[arg(long, conflicts_with = "input")]
        cycle: Option<usize>,
        #[arg(long, default_value_t = tcl_core::certificate::DEFAULT_MAX_VERTICES)]
        max_vertices: usize,
    },
    /// Checks a certificate against a hypergraph.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// The explicit certificate for the tight cycle on 3m vertices.
    Cycle {
        #[arg(long)]
        m: usize,
    },
}

#[derive(Subcommand)]
enum PhCmd {
    /// Triad densities and their minimum.
    Density {
        #[arg(long)]
        input: PathBuf,
    },
    /// Searches for an embedding of a 3-graph.
    Embed {
        #[arg(long)]
        host: PathBuf,
        /// Pattern hypergraph JSON file.
        #[arg(long, required_unless_present = "cycle")]
        pattern: Option<PathBuf>,
        #[arg(long, conflicts_with = "pattern")]
        cycle: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Reverses the index order.
    Reverse {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// Solves a selection, tripartite or chained instance.
    Find {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        budget: Option<u128>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MinimumArg {
    First,
    Second,
    Repair,
}

#[derive(Subcommand)]
enum OptCmd {
    /// Multistart maximization.
    Solve {
        #[arg(long, default_value = "opt")]
        problem: String,
        /// pgd, nelder-mead or anneal.
        #[arg(long, default_value = "pgd")]
        method: String,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long, default_value_t = 5000)]
        max_iters: usize,
        /// Add a start at the known optimum.
        #[arg(long)]
        witness_start: bool,
        /// Per-start trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Objective values and derived quantities of a point.
    Eval {
        /// OptPoint JSON (default: the optimal point).
        #[arg(long)]
        point: Option<PathBuf>,
    },
    /// Exhaustive evaluation on the grid with denominator d.
    Grid {
        #[arg(long, default_value = "opt")]
        problem: String,
        #[arg(long, default_value_t = 6)]
        denominator: u32,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// The bounding inequalities, on one point or a seeded sweep.
    CheckChain {
        #[arg(long)]
        point: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Draws for the six-term inequality (default: same as --samples).
        #[arg(long)]
        strange_samples: Option<u64>,
        #[arg(long, default_value_t = 1e-3)]
        grid_step: f64,
        /// Per-inequality summary as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// The relation on types.
    Arrow {
        /// Only print the counts.
        #[arg(long)]
        count: bool,
    },
    /// Removes a minimum by moving mass to X types.
    Rescale {
        #[arg(long)]
        point: PathBuf,
        #[arg(long, value_enum, default_value = "repair")]
        which: MinimumArg,
        #[arg(long, default_value_t = 64)]
        rounds: usize,
    },
}

#[derive(Subcommand)]
enum ScheduleCmd {
    /// Verifies one schedule.
    Verify {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        case: u8,
        #[arg(long)]
        m: i64,
        /// Index range [4n] to check against (default 3m).
        #[arg(long)]
        n: Option<i64>,
        /// JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Verifies all eight schedules for m = 1..=m-max.
    VerifyAll {
        #[arg(long, default_value_t = 50)]
        m_max: i64,
    },
    /// Prints a schedule.
    Show {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        case: u8,
        #[arg(long)]
        m: i64,
    },
    /// Lists the guaranteed facts of a case.
    Facts {
        /// base or base-swap.
        #[arg(long)]
        hypothesis: String,
        #[arg(long)]
        case: u8,
    },
}

/// Answer of a subcommand that completed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Affirmative,
    Negative,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Affirmative
        } else {
            Outcome::Negative
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<tcl_core::Error>() {
            return match e {
                tcl_core::Error::Budget { .. } => 3,
                tcl_core::Error::Infeasible(_) => 1,
                tcl_core::Error::InvalidParameter(_) => 2,
            };
        }
    }
    2
}

fn run(cli: Cli, command: String) -> Result<Outcome> {
    let ctx = Ctx {
        seed: cli.seed,
        jobs: cli.jobs,
        no_meta: cli.no_meta,
        output: cli.output,
        command,
        started: Instant::now(),
    };
    let work = move || commands::dispatch(&ctx, cli.command);
    match cli.jobs {
        Some(0) => anyhow::bail!(tcl_core::Error::InvalidParameter("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(work),
        None => work(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    match run(cli, command) {
        Ok(Outcome::Affirmative) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
