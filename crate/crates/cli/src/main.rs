mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use cycsieve_core::report::to_sorted_json;
use serde_json::json;

use commands::{Outcome, Table};
use config::{ExperimentConfig, Overrides, Setup};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "cycsieve", version, about = "Character sums and power-residue sieves over F_q(T)")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    q: Option<u64>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    ell: Option<u32>,
    #[arg(long, global = true)]
    b: Option<usize>,
    /// `auto` or an integer.
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Maximum number of innermost evaluations, e.g. `1e8`.
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for JSON and CSV artifacts; without it the JSON goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// The form as text, e.g. `X0^2+X1^2+X2^2`.
    #[arg(long, global = true)]
    form: Option<String>,
    /// A prime of F_q[T]; repeat for several.
    #[arg(long = "pi", global = true)]
    pis: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Monic irreducibles of degree Δ and the prime-count check.
    Primes,
    /// One mixed character sum S_F(w, χ).
    Charsum {
        /// Entries of w as field-element encodings, comma separated.
        #[arg(long)]
        w: Option<String>,
        #[arg(long, default_value_t = 1)]
        chi: u32,
    },
    /// |τ(χ)|² = q^deg π for every order-ℓ character.
    Gauss,
    /// Exact checks of the Fourier identities.
    IdentityCheck,
    /// Bound audit of every S_F(w, χ) mod each prime.
    WdAudit,
    /// Dual membership by equation against tangency search.
    DualCheck,
    /// Primes of bad reduction up to the scan degree.
    ExcPrimes,
    /// All sieve terms and inequalities.
    SieveRun,
    /// Brute-force count of tuples with F(x) an ℓ-th power.
    Count,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Primes => "primes",
            Command::Charsum { .. } => "charsum",
            Command::Gauss => "gauss",
            Command::IdentityCheck => "identity-check",
            Command::WdAudit => "wd-audit",
            Command::DualCheck => "dual-check",
            Command::ExcPrimes => "exc-primes",
            Command::SieveRun => "sieve-run",
            Command::Count => "count",
        }
    }
}

fn setup(cli: &Cli) -> Result<Setup> {
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let ov = Overrides {
        q: cli.q,
        n: cli.n,
        ell: cli.ell,
        b: cli.b,
        delta: cli.delta.clone(),
        budget: cli.budget,
        form: cli.form.clone(),
        primes: cli.pis.clone(),
    };
    config::resolve(&cfg, &ov)
}

fn dispatch(cli: &Cli, setup: &Setup) -> Result<Outcome> {
    match &cli.command {
        Command::Primes => commands::primes(setup),
        Command::Charsum { w, chi } => commands::charsum(setup, w.as_deref(), *chi),
        Command::Gauss => commands::gauss(setup),
        Command::IdentityCheck => commands::identity_check(setup),
        Command::WdAudit => commands::wd(setup),
        Command::DualCheck => commands::dual_check(setup),
        Command::ExcPrimes => commands::exc_primes(setup),
        Command::SieveRun => commands::sieve_run(setup),
        Command::Count => commands::count(setup),
    }
}

fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn emit(cli: &Cli, setup: &Setup, outcome: &Outcome) -> Result<()> {
    let name = cli.command.name();
    let doc = json!({
        "command": name,
        "config": serde_json::to_value(&setup.resolved)?,
        "pass": outcome.pass,
        "report": outcome.report,
    });
    let text = to_sorted_json(&doc)? + "\n";
    match &cli.out {
        None => print!("{text}"),
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let json_path = dir.join(format!("{name}.json"));
            std::fs::write(&json_path, text).with_context(|| format!("writing {}", json_path.display()))?;
            if let Some(table) = &outcome.csv {
                write_csv(&dir.join(format!("{name}.csv")), table)?;
            }
            println!("{name}: {} ({})", if outcome.pass { "pass" } else { "FAIL" }, dir.display());
        }
    }
    Ok(())
}

fn is_budget(e: &anyhow::Error) -> bool {
    matches!(e.downcast_ref::<cycsieve_core::Error>(), Some(cycsieve_core::Error::BudgetExceeded { .. }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let setup = match setup(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        pool = pool.num_threads(w.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = match pool.install(|| dispatch(&cli, &setup)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(if is_budget(&e) { EXIT_BUDGET } else { EXIT_USAGE });
        }
    };
    if let Err(e) = emit(&cli, &setup, &outcome) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
