//! Command-line front end for the lcspanner toolkit.
//!
//! Exit status: 0 on success, 1 when a verification fails (a witness is
//! printed), 2 for input errors, 3 when a budget or time limit is exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lcspanner::spanner::CopyCount;

#[derive(Parser)]
#[command(name = "lcspanner", version, about = "Label Cover and basic k-spanner reduction toolkit")]
struct Cli {
    /// Log progress (-v) or everything (-vv) to stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

/// Where to write the primary artifact; standard output when omitted.
#[derive(Args, Clone)]
pub struct Output {
    #[arg(short, long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Budget for the exhaustive solvers.
#[derive(Args, Clone)]
pub struct Budget {
    /// Largest candidate search space an exact solver may enumerate.
    #[arg(long, env = "LCSPAN_BUDGET", default_value_t = lcspanner::oracles::DEFAULT_SEARCH_SPACE)]
    pub budget: u128,

    /// Wall-clock cap in seconds.
    #[arg(long, value_name = "SECONDS")]
    pub time_limit: Option<f64>,
}

/// Parameters that determine a spanner gadget.
#[derive(Args, Clone)]
pub struct Gadget {
    /// Stretch; the source instance must have supergirth at least k + 2.
    #[arg(long)]
    pub k: usize,

    /// Copy count: `default` (⌈n²/ñ⌉), `floor`, or a number.
    #[arg(long, default_value = "default")]
    pub copies: CopyCount,

    /// Build the gadget even if the supergirth is below k + 2, with a warning.
    #[arg(long)]
    pub unsafe_supergirth: bool,

    /// Largest gadget (vertices or edges) to build.
    #[arg(long, env = "LCSPAN_EDGE_BUDGET", default_value_t = lcspanner::spanner::DEFAULT_EDGE_BUDGET)]
    pub edge_budget: u128,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a random 3SAT(5) formula (DIMACS).
    #[command(name = "gen-3sat5")]
    Gen3Sat5 {
        /// Number of variables, a positive multiple of 3.
        #[arg(long)]
        vars: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Plant a satisfying assignment derived from the seed.
        #[arg(long)]
        planted: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Label Cover instance of a 3SAT(5) formula.
    #[command(name = "lc-from-3sat")]
    LcFrom3Sat {
        formula: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Make a biregular instance regular by copying both sides.
    Regularize {
        instance: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Parallel repetition.
    Parrep {
        instance: PathBuf,
        #[arg(long)]
        ell: usize,
        /// Largest number of superedges or relation pairs to build.
        #[arg(long, env = "LCSPAN_REPETITION_BUDGET", default_value_t = lcspanner::constructions::DEFAULT_REPETITION_BUDGET)]
        budget: u128,
        #[command(flatten)]
        output: Output,
    },
    /// Keep each superedge independently with probability α·log2|Σ_A|/d.
    Subsample {
        instance: PathBuf,
        #[command(flatten)]
        sample: Sample,
        #[command(flatten)]
        output: Output,
    },
    /// Remove every superedge on a cycle of length at most k.
    #[command(name = "strip-cycles")]
    StripCycles {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Print the girth of a GRAPH file or the supergirth of an LC file.
    Girth { input: PathBuf },
    /// Min-Rep graph of a Label Cover instance (GRAPH v1).
    #[command(name = "minrep-expand")]
    MinrepExpand {
        instance: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Build the spanner gadget graph of a Label Cover instance.
    #[command(name = "spanner-reduce")]
    SpannerReduce {
        instance: PathBuf,
        #[command(flatten)]
        gadget: Gadget,
        /// Write the role, family and parameter metadata as JSON.
        #[arg(long, value_name = "FILE")]
        meta: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Check that an edge subset is a k-spanner of its host graph.
    #[command(name = "spanner-verify")]
    SpannerVerify {
        graph: PathBuf,
        subset: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Greedy k-spanner.
    #[command(name = "spanner-greedy")]
    SpannerGreedy {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Spanner of the gadget graph built from a REP-cover.
    #[command(name = "spanner-from-cover")]
    SpannerFromCover {
        instance: PathBuf,
        cover: PathBuf,
        #[command(flatten)]
        gadget: Gadget,
        #[command(flatten)]
        output: Output,
    },
    /// REP-cover extracted from a spanner of the gadget graph.
    #[command(name = "cover-from-spanner")]
    CoverFromSpanner {
        instance: PathBuf,
        subset: PathBuf,
        #[command(flatten)]
        gadget: Gadget,
        #[command(flatten)]
        output: Output,
    },
    /// Replace gadget-copy edges of a spanner by canonical paths.
    #[command(name = "make-proper")]
    MakeProper {
        instance: PathBuf,
        subset: PathBuf,
        #[command(flatten)]
        gadget: Gadget,
        #[command(flatten)]
        output: Output,
    },
    /// Exact Label Cover value by enumeration.
    #[command(name = "solve-lc-exact")]
    SolveLcExact {
        instance: PathBuf,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        output: Output,
    },
    /// Minimum REP-cover by enumeration.
    #[command(name = "solve-cover-exact")]
    SolveCoverExact {
        instance: PathBuf,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        output: Output,
    },
    /// Minimum k-spanner by enumeration.
    #[command(name = "solve-spanner-exact")]
    SolveSpannerExact {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        output: Output,
    },
    /// Run every stage from formula to extracted cover, writing each artifact.
    Pipeline(PipelineArgs),
    /// Sampling statistics as a stats_v1 JSON document.
    Stats {
        instance: PathBuf,
        #[command(flatten)]
        sample: Sample,
        /// Number of Monte Carlo trials.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Also track the satisfied-edge count of this labeling.
        #[arg(long)]
        labeling: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Clone)]
pub struct Sample {
    #[arg(long)]
    pub alpha: f64,
    /// Girth target the sample is meant for (at least 3).
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Master seed; the sampling stream is derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Degree d to use instead of the maximum degree.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Reject probabilities above 1 instead of clamping them.
    #[arg(long)]
    pub no_clamp: bool,
}

#[derive(Args, Clone)]
pub struct PipelineArgs {
    #[arg(long)]
    pub vars: usize,
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Plant a satisfying assignment and reduce its cover; otherwise use the
    /// greedy spanner.
    #[arg(long)]
    pub planted: bool,
    #[arg(long, default_value = "default")]
    pub copies: CopyCount,
    #[arg(long)]
    pub no_clamp: bool,
    #[arg(long, env = "LCSPAN_REPETITION_BUDGET", default_value_t = lcspanner::constructions::DEFAULT_REPETITION_BUDGET)]
    pub repetition_budget: u128,
    #[arg(long, env = "LCSPAN_EDGE_BUDGET", default_value_t = lcspanner::spanner::DEFAULT_EDGE_BUDGET)]
    pub edge_budget: u128,
    /// Directory for the stage artifacts.
    #[arg(long, default_value = "pipeline-out")]
    pub out_dir: PathBuf,
    /// Also write the gadget role and family tables.
    #[arg(long)]
    pub meta: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::run(cli.command) {
        Ok(status) => status.into(),
        Err(err) => {
            let code = commands::exit_code(&err);
            if code == 1 {
                println!("FAILED: {err:#}");
            } else {
                eprintln!("error: {err:#}");
            }
            code.into()
        }
    }
}
