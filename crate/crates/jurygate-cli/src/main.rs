use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use jurygate_cli::config::{load_file, resolve, Overrides};
use jurygate_cli::run::{cmd_bound, cmd_simulate, cmd_sweep, cmd_trace};
use jurygate_cli::CliError;

/// Confidence-gated voting experiments: analytic bounds, Monte Carlo
/// simulations, parameter sweeps, and confidence traces.
#[derive(Parser)]
#[command(name = "jurygate", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic bound table over the configured sweep
    Bound(RunArgs),
    /// Monte Carlo table with the matching bounds alongside
    Simulate(RunArgs),
    /// Combined bound + simulation table
    Sweep(RunArgs),
    /// Per-agent confidence trajectory of a single seeded run
    Trace(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment config; flags below override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenarios to run: homogeneous, heterogeneous, never-abstain,
    /// contrary-priors (comma separated)
    #[arg(long, value_delimiter = ',')]
    scenario: Option<Vec<String>>,
    /// Sweep axis and grid, e.g. `N=10,20,50`, `tau=0,0.25,0.5`, or a bare
    /// axis name to use its default grid
    #[arg(long)]
    sweep: Option<String>,
    /// Master seed for all random draws
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo runs per grid point
    #[arg(long)]
    runs: Option<u64>,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pool size when N is not swept
    #[arg(long)]
    n_agents: Option<usize>,
    /// Horizon T (T-1 learning rounds plus the decision round)
    #[arg(long)]
    horizon_t: Option<u32>,
    /// Abstention threshold when tau is not swept
    #[arg(long)]
    tau: Option<f64>,
    /// Critical reliability level the gate certifies against
    #[arg(long)]
    p_critical: Option<f64>,
    /// Contrary-prior strength
    #[arg(long)]
    kappa: Option<f64>,
    /// Contrary-prior pseudo-count floor
    #[arg(long)]
    epsilon: Option<f64>,
}

fn execute(command: Command) -> Result<(), CliError> {
    let (args, render): (&RunArgs, fn(&_) -> Result<String, CliError>) = match &command {
        Command::Bound(a) => (a, cmd_bound),
        Command::Simulate(a) => (a, cmd_simulate),
        Command::Sweep(a) => (a, cmd_sweep),
        Command::Trace(a) => (a, cmd_trace),
    };
    let file = args.config.as_deref().map(load_file).transpose()?;
    let flags = Overrides {
        scenarios: args.scenario.clone(),
        sweep: args.sweep.clone(),
        n_agents: args.n_agents,
        horizon_t: args.horizon_t,
        tau: args.tau,
        p_critical: args.p_critical,
        kappa: args.kappa,
        epsilon: args.epsilon,
        runs: args.runs,
        seed: args.seed,
        out: args.out.clone(),
    };
    let cfg = resolve(file.as_ref(), &flags)?;
    let csv = render(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = execute(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
