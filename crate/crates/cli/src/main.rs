mod commands;
mod plot;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use report::{Failure, OutputFormat};

/// Count, certify and construct convex-hull peeling configurations.
#[derive(Debug, Parser)]
#[command(name = "peelkit", version, about)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    Gale,
    BaseSet,
    Construction,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count the peeling sequences of a point-set file.
    Count {
        input: PathBuf,
        /// Cross-check against plain enumeration.
        #[arg(long)]
        naive: bool,
        /// Also list the first K sequences.
        #[arg(long, value_name = "K")]
        enumerate: Option<usize>,
    },
    /// Open-halfspace depth of a point relative to a point-set file.
    Depth {
        input: PathBuf,
        /// Comma-separated coordinates; the origin when omitted.
        #[arg(long, allow_hyphen_values = true)]
        origin: Option<String>,
        /// Cross-check against the subset oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Generate and certify a point set, then write it as JSON.
    Generate {
        #[arg(value_enum)]
        kind: GenerateKind,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the growth-rate formulas.
    Bounds {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Enclosure width target, in bits.
        #[arg(long, default_value_t = 64)]
        precision: u32,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Draw a point-set file as SVG.
    Plot {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Coordinate pair to project onto, e.g. `0,1`.
        #[arg(long, default_value = "0,1")]
        axes: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let started = std::time::Instant::now();
    let result = match commands::peel_config() {
        Ok(cfg) => match cli.command {
            Command::Count { input, naive, enumerate } => commands::count(&input, naive, enumerate, &cfg),
            Command::Depth { input, origin, oracle } => commands::depth(&input, origin.as_deref(), oracle),
            Command::Generate { kind, d, m, n, out } => commands::generate(kind, d, m, n, cli.seed, &out, &cfg),
            Command::Bounds { d, m, n, precision } => commands::bounds(d, m, n, precision),
            Command::Verify { suite } => commands::verify(&suite, cli.seed, &cfg),
            Command::Plot { input, out, axes } => commands::plot(&input, &out, &axes),
        },
        Err(e) => Err(Failure::from(e)),
    };
    report::emit(cli.format, &argv, started.elapsed(), result)
}
