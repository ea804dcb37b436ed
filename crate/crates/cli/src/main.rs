use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fedosov_core::cli::{cmd_check, cmd_quantize, cmd_star, cmd_validate, Options, Report, Suite};

/// Exact star products of Poisson brackets from a JSON job description.
///
/// Every command prints a JSON report on stdout. Exit codes: 0 pass,
/// 1 validation or check failure, 2 parse or I/O error, 3 identity violation
/// or a result the jet truncation cannot determine. FEDOSOV_WORKERS sets the
/// number of threads used for sampled checks.
#[derive(Parser, Debug)]
#[command(name = "fedosov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Include an intermediate element: r, alpha, beta, b, psi or tau:<expr>.
    #[arg(long, global = true, value_name = "WHAT")]
    dump: Vec<String>,
    /// Record wall-clock time per phase (makes reports non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse the config and validate the Poisson structure.
    Validate { config: PathBuf },
    /// Build the flat connection and verify its identities.
    Quantize {
        config: PathBuf,
        /// Write r, alpha, beta and the diagnostics here.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Expand a ∗ b in powers of ħ.
    Star {
        config: PathBuf,
        #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
        a: String,
        #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
        b: String,
        /// Overrides hbar_order.
        #[arg(long)]
        order: Option<u32>,
    },
    /// Run verification suites against the computed star product.
    Check {
        config: PathBuf,
        /// all, assoc, identities or moyal.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Overrides hbar_order.
        #[arg(long)]
        order: Option<u32>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Perturb the star product at this ħ order.
        #[arg(long, value_name = "K")]
        inject_fault: Option<u32>,
    },
}

fn emit(code: i32, report: &Report) -> ExitCode {
    println!("{}", report.to_json());
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut opts = Options {
        dump: cli.common.dump,
        timing: cli.common.timing,
        ..Options::default()
    };
    let (code, report) = match cli.command {
        Command::Validate { config } => cmd_validate(&config, &opts),
        Command::Quantize { config, out } => cmd_quantize(&config, out.as_deref(), &opts),
        Command::Star {
            config,
            a,
            b,
            order,
        } => {
            opts.order = order;
            cmd_star(&config, &a, &b, &opts)
        }
        Command::Check {
            config,
            suite,
            order,
            seed,
            inject_fault,
        } => {
            let suite: Suite = match suite.parse() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            opts.order = order;
            opts.seed = seed;
            opts.inject_fault = inject_fault;
            cmd_check(&config, suite, &opts)
        }
    };
    emit(code, &report)
}
