//! Command-line front end: torsion counts on theta divisors, multiplication
//! map coranks and the Chow identity report.

mod job;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use theta_torsion::Config;

use job::{BoundArgs, ChowArgs, CountArgs, Job, JobConfig, KempfArgs, ScanArgs, SweepArgs};
use run::{execute, write_atomic, Failure, Status};

const WORKERS_ENV: &str = "THETA_TORSION_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "theta-torsion", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
    /// Write the fully resolved job as JSON, replayable with `run --config`.
    #[arg(long, global = true)]
    save_job: Option<PathBuf>,
}

/// Numeric settings that override the job's configuration.
#[derive(Debug, Args)]
struct Overrides {
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    eval_tol: Option<f64>,
    #[arg(long, global = true)]
    rank_threshold: Option<f64>,
    #[arg(long, global = true)]
    enumeration_cap: Option<u64>,
}

impl Overrides {
    fn apply(&self, config: &mut Config) {
        if let Some(v) = self.rel_tol {
            config.rel_tol = v;
        }
        if let Some(v) = self.eval_tol {
            config.eval_tol = v;
        }
        if let Some(v) = self.rank_threshold {
            config.rank_threshold = v;
        }
        if let Some(v) = self.enumeration_cap {
            config.enumeration_cap = v;
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count n-torsion translates of x lying on the theta divisor.
    CountTorsion(CountArgs),
    /// Check a torsion count against the bound, or its equality case.
    VerifyBound(BoundArgs),
    /// Corank of the multiplication map of two semi-homogeneous bundles.
    KempfCorank(KempfArgs),
    /// Scan translates on an elliptic curve for a drop in rank.
    ScanSingular(ScanArgs),
    /// Check the Chern character identities over parameter ranges.
    ChowReport(ChowArgs),
    /// Torsion counts over many random period matrices.
    Sweep(SweepArgs),
    /// Replay a saved job file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_job(command: Command) -> Result<JobConfig, Failure> {
    let job = match command {
        Command::CountTorsion(a) => Job::CountTorsion(a),
        Command::VerifyBound(a) => Job::VerifyBound(a),
        Command::KempfCorank(a) => Job::KempfCorank(a),
        Command::ScanSingular(a) => Job::ScanSingular(a),
        Command::ChowReport(a) => Job::ChowReport(a),
        Command::Sweep(a) => Job::Sweep(a),
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Failure::config(format!("{}: {e}", config.display())))?;
            return serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", config.display())));
        }
    };
    Ok(JobConfig {
        job,
        config: Config::default(),
    })
}

fn configure_workers() -> Result<(), Failure> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::config(format!("{WORKERS_ENV} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::config(e.to_string()))
}

fn main_inner(cli: Cli) -> Result<Status, Failure> {
    configure_workers()?;
    let mut job = load_job(cli.command)?;
    cli.overrides.apply(&mut job.config);
    job.config.validate()?;
    if let Some(path) = &cli.save_job {
        let mut bytes = serde_json::to_vec_pretty(&job).map_err(|e| Failure::config(e.to_string()))?;
        bytes.push(b'\n');
        write_atomic(path, &bytes).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    }
    let out = execute(&job)?;
    for (path, bytes) in &out.artifacts {
        write_atomic(path, bytes).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    }
    for m in &out.messages {
        eprintln!("{m}");
    }
    let summary = serde_json::json!({
        "status": out.status.code(),
        "summary": out.summary,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary is valid JSON"));
    Ok(out.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { Status::ConfigError.code() } else { 0 };
            return ExitCode::from(code);
        }
    };
    match main_inner(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status.code())
        }
    }
}
