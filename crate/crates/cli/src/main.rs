//! `dmshift`: batch command line for Dyck-Motzkin shift computations.
//!
//! Exit codes: 0 success, 1 failed check or internal error, 2 parse or
//! schema error, 3 length limit exceeded, 4 transport condition violated,
//! 5 resource cap hit (partial results are still printed).

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dyckmotzkin::{AlphabetParams, Gamma};

#[derive(Parser, Debug)]
#[command(name = "dmshift", version, about = "Dyck-Motzkin shifts: words, embeddings, measures, paths, optimization")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Number of bracket pairs.
    #[arg(long = "M", id = "brackets", global = true, default_value_t = 2)]
    pub m: u16,

    /// Number of neutral symbols.
    #[arg(long = "N", id = "units", global = true, default_value_t = 1)]
    pub n: u16,

    /// Seed for the stochastic subcommands (approx, path).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output format; each subcommand has a natural default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Decimal digits in human-readable output.
    #[arg(long, global = true, default_value_t = 6)]
    pub precision: usize,
}

impl RunConfig {
    pub fn params(&self) -> anyhow::Result<AlphabetParams> {
        if self.m < 2 {
            return Err(commands::usage(format!("--M must be at least 2, got {}", self.m)));
        }
        Ok(AlphabetParams::new(self.m, self.n)?)
    }

    pub fn seed(&self) -> anyhow::Result<u64> {
        self.seed.ok_or_else(|| commands::usage("this subcommand needs --seed"))
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Alpha,
    Beta,
}

impl From<Side> for Gamma {
    fn from(s: Side) -> Gamma {
        match s {
            Side::Alpha => Gamma::Alpha,
            Side::Beta => Gamma::Beta,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normal form of a word in the bracket monoid.
    Reduce { word: String },
    /// Word class (neutral, negative, positive, mixed, inadmissible).
    Classify { word: String },
    /// Number of admissible words of length n.
    Count { n: usize },
    /// List the admissible words of length n.
    Enumerate {
        n: usize,
        #[arg(long, default_value_t = dyckmotzkin::language::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Word counts and entropy estimates for n = 1..n-max.
    Entropy {
        #[arg(long = "n-max")]
        n_max: usize,
    },
    /// Collapse and reconstruction maps on periodic points.
    Embed {
        #[command(subcommand)]
        action: EmbedAction,
    },
    /// Queries on measure specifications.
    Measure {
        #[command(subcommand)]
        action: MeasureAction,
    },
    /// Periodic-orbit approximation of a measure.
    Approx {
        /// Measure JSON (file path or inline JSON).
        #[arg(long)]
        spec: String,
        /// Period budget.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Side::Alpha)]
        neutral_side: Side,
    },
    /// Build and verify a measure path.
    Path(PathArgs),
    /// Maximal periodic mean of a locally constant function.
    Optimize {
        /// Function JSON (file path or inline JSON).
        #[arg(long = "fn")]
        function: String,
        /// Period budget.
        #[arg(long)]
        p: usize,
        /// Report every orbit within this tolerance of the optimum.
        #[arg(long)]
        tol: Option<String>,
        #[arg(long)]
        node_cap: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum EmbedAction {
    /// Periodic point of the Dyck shift to its collapsed image.
    Collapse {
        #[arg(long, value_enum)]
        gamma: Side,
        cycle: String,
    },
    /// Periodic point of a collapsed shift back to the Dyck shift.
    Reconstruct {
        #[arg(long, value_enum)]
        gamma: Side,
        cycle: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum MeasureAction {
    /// Mass of a cylinder.
    Cylinder {
        #[arg(long)]
        spec: String,
        word: String,
    },
    /// Integral of a locally constant function.
    Integral {
        #[arg(long)]
        spec: String,
        #[arg(long = "fn")]
        function: String,
    },
    Entropy {
        #[arg(long)]
        spec: String,
    },
    Classify {
        #[arg(long)]
        spec: String,
    },
    /// Truncated weak* distance between two measures.
    Distance {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        other: String,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
    },
    /// Transport of a measure on a collapsed shift to the Dyck shift.
    Transport {
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum)]
        gamma: Side,
    },
}

#[derive(Args, Debug)]
pub struct PathArgs {
    /// Measure JSON for the start of the path.
    #[arg(long, required_unless_present = "replay")]
    pub plus: Option<String>,
    /// Measure JSON for the end of the path.
    #[arg(long, required_unless_present = "replay")]
    pub minus: Option<String>,
    #[arg(long, value_enum, default_value_t = Side::Alpha)]
    pub gamma: Side,
    /// Number of grid points of the verification report.
    #[arg(long, default_value_t = 65)]
    pub grid: usize,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, default_value_t = 4)]
    pub central_segments: usize,
    /// Evaluate a stored path JSON instead of building one.
    #[arg(long, conflicts_with_all = ["plus", "minus"])]
    pub replay: Option<String>,
    /// Write the built path JSON to this file.
    #[arg(long)]
    pub save: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_errors = cli.run.format == Some(Format::Json);
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (code, kind) = commands::classify_error(&e);
            if json_errors {
                let obj = serde_json::json!({"error": kind, "message": format!("{e:#}"), "exit_code": code});
                eprintln!("{obj}");
            } else {
                eprintln!("dmshift: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}
