use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use maxbid_cli::config::parse_tolerance;
use maxbid_cli::{cmd_reproduce, cmd_run, cmd_sweep, cmd_verify, load_config, set_jobs, CliError, Overrides};
use maxbid_core::stage::Payoff;

#[global_allocator]
static ALLOC: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[derive(Parser, Debug)]
#[command(name = "maxbid", version, about = "Repeated first-price auctions with MaxBid learners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Play one scenario; write trace.csv and summary.json
    Run(Common),
    /// Run the configured equilibrium check; write verdict.json
    Verify(Common),
    /// Play the profile at every configured state; write sweep.csv
    Sweep(Common),
    /// Re-run a pinned example and compare with its stored expectations
    Reproduce {
        /// 2.1, 3.5, 3.6, 3.7, eq2-sweep, thm-3.1, thm-3.2, thm-3.3 or thm-3.9
        id: String,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Debug)]
struct Flags {
    /// Rounds to record
    #[arg(long)]
    horizon: Option<u32>,
    /// Floor of every MaxBid strategy
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
    floor: Option<u32>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allowed gain for estimated payoffs, as P/Q
    #[arg(long, value_parser = tolerance)]
    tolerance: Option<Payoff>,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
}

fn tolerance(text: &str) -> Result<Payoff, String> {
    parse_tolerance(text).ok_or_else(|| format!("expected P/Q, got `{text}`"))
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            horizon: self.horizon,
            floor: self.floor,
            out: self.out.clone(),
            tolerance: self.tolerance,
            jobs: self.jobs,
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Reproduce { id, flags } => {
            set_jobs(flags.jobs);
            cmd_reproduce(&id, &flags.overrides(), &mut stdout)
        }
        Command::Run(c) | Command::Verify(c) | Command::Sweep(c) if c.flags.horizon == Some(0) => {
            let _ = c;
            Err(CliError::Usage("--horizon must be at least 1".into()))
        }
        Command::Run(c) => {
            let config = load_config(&c.config, &c.flags.overrides())?;
            set_jobs(config.jobs);
            cmd_run(&config, &mut stdout)
        }
        Command::Verify(c) => {
            let config = load_config(&c.config, &c.flags.overrides())?;
            set_jobs(config.jobs);
            cmd_verify(&config, &mut stdout)
        }
        Command::Sweep(c) => {
            let config = load_config(&c.config, &c.flags.overrides())?;
            set_jobs(config.jobs);
            cmd_sweep(&config, &mut stdout)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("maxbid: check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("maxbid: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
