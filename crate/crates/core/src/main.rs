use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lieco::cache::Cache;
use lieco::job::parse_job;
use lieco::runner::{check_command, run_job};

#[derive(Parser)]
#[command(name = "lieco", version, about = "Exact Lie algebra cohomology from JSON job files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check Jacobi and grading of an algebra.
    Validate(Common),
    /// Dimensions and representatives of H^q by weight.
    Cohomology(Common),
    /// Cocycle and coboundary checks for named classes.
    Verify(Common),
    /// Spectral sequence pages (spectral_ff or spectral_hs jobs).
    Spectral(Common),
    /// Stability of H^q over a grid of truncations.
    Sweep(Common),
    /// Infinitesimal deformation with a residual check.
    Deform(Common),
}

#[derive(Args)]
struct Common {
    /// Job file (JSON).
    #[arg(long)]
    job: PathBuf,
    /// Report file; defaults to the job's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cache directory; defaults to the job's `cache_dir`.
    #[arg(long, env = "LIECO_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Command {
    fn split(&self) -> (&'static str, &Common) {
        match self {
            Command::Validate(c) => ("validate", c),
            Command::Cohomology(c) => ("cohomology", c),
            Command::Verify(c) => ("verify", c),
            Command::Spectral(c) => ("spectral", c),
            Command::Sweep(c) => ("sweep", c),
            Command::Deform(c) => ("deform", c),
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let (name, args) = cli.command.split();
    let job = parse_job(&args.job).map_err(|e| e.to_string())?;
    check_command(&job, name).map_err(|e| e.to_string())?;
    let cache = Cache::new(args.cache_dir.clone().or_else(|| job.cache_dir.clone()));
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.jobs {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| e.to_string())?;
    let report = pool.install(|| run_job(&job, &cache)).map_err(|e| e.to_string())?;
    if let Some(out) = args.out.clone().or_else(|| job.output.clone()) {
        std::fs::write(&out, report.to_json() + "\n").map_err(|e| format!("cannot write {}: {e}", out.display()))?;
    }
    print!("{}", report.render());
    Ok(report.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
