use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use margulis::bounds::{self, Precision};
use margulis::packing::DEFAULT_RELATION_TOL;
use margulis_cli::verify::Suite;
use margulis_cli::{Failure, Format, Options};

/// Explicit volume, index and rank bounds for hyperbolic 3-manifolds with a
/// small Margulis number.
#[derive(Parser)]
#[command(name = "margulis", version)]
struct Cli {
    /// µ in the defining inequality for N(λ).
    #[arg(long, global = true, default_value_t = bounds::DEFAULT_MU)]
    mu: f64,
    /// Volume V₀ used by the index and rank bounds.
    #[arg(long, global = true, default_value_t = bounds::DEFAULT_WEEKS_VOLUME)]
    v0: f64,
    /// Packing constant C in the defining inequality for N(λ).
    #[arg(long, global = true, default_value_t = bounds::DEFAULT_PACKING_CONSTANT)]
    packing_constant: f64,
    /// Arithmetic used to locate N(λ).
    #[arg(long, global = true, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

#[derive(Subcommand)]
enum Command {
    /// N(λ), β and the estimate 1 + 110 β ln β.
    N {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// Every bound for one λ.
    Bounds {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// Bounds over the grid λ = min + i·step as CSV (or a JSON array).
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, allow_negative_numbers = true)]
        max: f64,
        #[arg(long, allow_negative_numbers = true)]
        step: f64,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run property suites; exit 1 if any property fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Shortest relation among two generators read from a JSON file.
    ///
    /// The theorem guarantees a relation of length at most 8N(λ), which is
    /// usually far beyond what can be enumerated; max-len is capped at 14.
    Relations {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_len: u32,
        #[arg(long, default_value_t = DEFAULT_RELATION_TOL)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        mu: cli.mu,
        weeks_volume: cli.v0,
        packing_constant: cli.packing_constant,
        precision: match cli.precision {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        },
        format: cli.format,
    };

    let result = match cli.command {
        Command::N { lambda } => margulis_cli::cmd_n(lambda, &opts),
        Command::Bounds { lambda } => margulis_cli::cmd_bounds(lambda, &opts),
        Command::Verify { suite } => margulis_cli::cmd_verify(suite, &opts),
        Command::Relations { input, max_len, tol } => {
            margulis_cli::cmd_relations(&input, max_len, tol, &opts)
        }
        Command::Sweep { min, max, step, out } => {
            margulis_cli::cmd_sweep(min, max, step, &opts).and_then(|sweep| {
                for w in &sweep.warnings {
                    eprintln!("{w}");
                }
                match out {
                    Some(path) => std::fs::write(&path, &sweep.text)
                        .map(|_| String::new())
                        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
                    None => Ok(sweep.text),
                }
            })
        }
    };

    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(text)) => {
            print!("{text}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
