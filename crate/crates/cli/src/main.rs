use std::path::PathBuf;
use std::process::ExitCode;

use aberrant_cli::{load_spec, run_command, Command, CriterionName, Method, Options};
use clap::Parser;

/// Evaluate, verify and search regular two-level fractional factorial designs.
#[derive(Debug, Parser)]
#[command(name = "aberrant", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Design description file.
    #[arg(long)]
    spec: PathBuf,

    /// Effect grouping to evaluate or optimize.
    #[arg(long, value_enum)]
    criterion: Option<CriterionName>,

    /// Print a JSON document instead of tables.
    #[arg(long)]
    json: bool,

    /// Stop a search after this many candidate designs.
    #[arg(long)]
    budget_nodes: Option<u64>,

    /// Stop a search after this many seconds.
    #[arg(long)]
    budget_seconds: Option<f64>,

    /// Dimension of the column subspace used by construct-weak.
    #[arg(long)]
    r: Option<u32>,

    /// Search strategy.
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    method: Method,

    /// Number of additional columns for a general-criterion search.
    #[arg(long)]
    extra: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        criterion: cli.criterion,
        budget_nodes: cli.budget_nodes,
        budget_seconds: cli.budget_seconds,
        r: cli.r,
        method: cli.method,
        extra: cli.extra,
    };
    let outcome = load_spec(&cli.spec).and_then(|spec| run_command(cli.command, &spec, &opts));
    match outcome {
        Ok(report) => {
            if cli.json {
                print!("{}", report.to_json());
            } else {
                print!("{report}");
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("aberrant {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
