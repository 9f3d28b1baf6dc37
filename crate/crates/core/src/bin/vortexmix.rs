use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vortexmix::cli::{run, Command, Failure, Settings, Status};

#[derive(Parser)]
#[command(name = "vortexmix", version, about = "Enhanced dissipation around a radial vortex, mode by mode")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the hypocoercivity constants and constraint margins
    Constants(Common),
    /// Run one trajectory and write ledger.csv
    Simulate(Common),
    /// Run a (p, nu, k) plan and write sweep.csv
    Sweep(Common),
    /// Check the weighted inequalities on seeded profiles
    VerifyLemmas(Common),
    /// Check the energy balances and the weighted-norm bound on one trajectory
    VerifyBalances(Common),
    /// Write 2D field matrices for a set of modes
    Snapshot(Common),
}

/// Every flag is optional; unset flags fall back to the config file, then to
/// the subcommand defaults. Lists are comma separated.
#[derive(Args)]
struct Common {
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    ell: Option<String>,
    #[arg(long)]
    rmax: Option<String>,
    #[arg(long)]
    cells: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    tmax: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Initial profile width
    #[arg(long)]
    width: Option<String>,
    /// monomial or polynomial
    #[arg(long)]
    profile: Option<String>,
    /// Approximate ledger rows
    #[arg(long)]
    rows: Option<String>,
    /// Sweep plan `p:nu:k,...`
    #[arg(long)]
    plan: Option<String>,
    /// Lemma samples per wavenumber
    #[arg(long)]
    samples: Option<String>,
    /// Number of log-spaced sigma values
    #[arg(long)]
    sigmas: Option<String>,
    /// Balance residual tolerance
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    n_theta: Option<String>,
    #[arg(long)]
    frames: Option<String>,
    /// Fit window `upper,lower` as fractions of the initial X-norm squared
    #[arg(long)]
    window: Option<String>,
}

impl Common {
    fn settings(&self) -> Result<Settings, Failure> {
        let base = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        let pairs = [
            ("p", &self.p),
            ("nu", &self.nu),
            ("ell", &self.ell),
            ("rmax", &self.rmax),
            ("cells", &self.cells),
            ("dt", &self.dt),
            ("tmax", &self.tmax),
            ("seed", &self.seed),
            ("width", &self.width),
            ("profile", &self.profile),
            ("rows", &self.rows),
            ("plan", &self.plan),
            ("samples", &self.samples),
            ("sigmas", &self.sigmas),
            ("tol", &self.tol),
            ("n_theta", &self.n_theta),
            ("frames", &self.frames),
            ("window", &self.window),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v.clone());
            }
        }
        if let Some(out) = &self.out {
            flags.set("out", out.to_string_lossy());
        }
        Ok(base.overridden_by(&flags))
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let (command, common) = match &cli.command {
        Cmd::Constants(c) => (Command::Constants, c),
        Cmd::Simulate(c) => (Command::Simulate, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::VerifyLemmas(c) => (Command::VerifyLemmas, c),
        Cmd::VerifyBalances(c) => (Command::VerifyBalances, c),
        Cmd::Snapshot(c) => (Command::Snapshot, c),
    };
    let settings = common.settings()?;
    let outcome = run(command, &settings)?;
    print!("{}", outcome.stdout);
    outcome.commit()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let first = e.to_string();
                let first = first.lines().next().unwrap_or("invalid arguments");
                eprintln!("{}", Failure::usage(first.trim_start_matches("error: ")).diagnostic_line());
                return ExitCode::from(Status::Usage as u8);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.diagnostic_line());
            ExitCode::from(f.status as u8)
        }
    }
}
