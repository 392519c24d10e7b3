use clap::{Parser, Subcommand};
use std::path::PathBuf;
use vip_cli::config::{load_experiment, Mode};
use vip_cli::runner::{compare_runs, print_comparison, run_experiment};
use vip_cli::{EXIT_CONFIG, EXIT_INTERNAL};

/// Solver front-end for variational inequalities over fixed-point sets:
/// perturbed explicit runs, implicit sweeps, regularization paths, schedule
/// validation, and trace comparison.
#[derive(Parser)]
#[command(name = "vip", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment config (JSON; one experiment per file).
    config: PathBuf,
    /// Refuse to iterate when the schedule conditions are not satisfied.
    #[arg(long)]
    strict: bool,
    /// Output directory (overrides the config; VIP_OUT_DIR also applies).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override for the deterministic perturbation directions.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a config in its mode (hpa, oracle, or validate).
    Run(RunArgs),
    /// Validate a config and report whether the schedules satisfy the
    /// convergence conditions (exit 0 applicable, 5 not applicable).
    Validate(RunArgs),
    /// Execute a sweep config (implicit-sweep or regularization-sweep).
    Sweep(RunArgs),
    /// Tabulate distance-to-reference across trace files.
    Compare {
        /// Trace CSV files (with their .meta.json sidecars).
        traces: Vec<PathBuf>,
        /// Number of iteration blocks in the table.
        #[arg(long, default_value_t = 20)]
        blocks: usize,
    },
}

fn resolve_out(cli_out: Option<PathBuf>) -> Option<PathBuf> {
    cli_out.or_else(|| std::env::var_os("VIP_OUT_DIR").map(PathBuf::from))
}

fn execute(args: &RunArgs, allowed: &[Mode], force_validate: bool) -> i32 {
    let exp = match load_experiment(&args.config, args.seed, resolve_out(args.out.clone())) {
        Ok(exp) => exp,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let mode = if force_validate { Mode::Validate } else { exp.mode.clone() };
    if !allowed.contains(&mode) {
        eprintln!(
            "config mode {:?} is not handled by this subcommand (use `vip sweep` for sweeps, \
             `vip run` otherwise)",
            exp.mode
        );
        return EXIT_CONFIG;
    }
    let exp = if force_validate {
        let mut e = exp;
        e.mode = Mode::Validate;
        e
    } else {
        exp
    };
    match run_experiment(&exp, args.strict) {
        Ok(outcome) => {
            println!("{}", outcome.summary.to_json());
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => execute(
            &args,
            &[Mode::Hpa, Mode::Oracle, Mode::Validate],
            false,
        ),
        Command::Validate(args) => execute(&args, &[Mode::Validate], true),
        Command::Sweep(args) => execute(
            &args,
            &[Mode::ImplicitSweep, Mode::RegularizationSweep],
            false,
        ),
        Command::Compare { traces, blocks } => match compare_runs(&traces, blocks) {
            Ok(cmp) => {
                if print_comparison(&cmp, std::io::stdout().lock()).is_err() {
                    EXIT_INTERNAL
                } else {
                    0
                }
            }
            Err(e) => {
                eprintln!("{e}");
                e.exit_code()
            }
        },
    };
    std::process::exit(code);
}
