use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use theta_torsion::chow::{identity_report, ReportRanges};
use theta_torsion::kempf::{run_batch, singular_locus_scan, CorankReport, CorankSummary, KempfJob};
use theta_torsion::ppav::{count_torsion_on_theta, equality_translate, random_siegel, AbelianPoint, CountReport};
use theta_torsion::ser::parse_complex;
use theta_torsion::{Config, Error};

use crate::job::{parse_point, BoundArgs, ChowArgs, CountArgs, Job, JobConfig, KempfArgs, ScanArgs, SweepArgs};

/// Process exit status. Each failure class has its own code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Mismatch = 1,
    ConfigError = 2,
    Ambiguity = 3,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }

    /// Combines two outcomes: configuration errors dominate ambiguity, which
    /// dominates mismatches.
    fn worst(self, other: Status) -> Status {
        let severity = |s: Status| match s {
            Status::Success => 0,
            Status::Mismatch => 1,
            Status::Ambiguity => 2,
            Status::ConfigError => 3,
        };
        if severity(other) > severity(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

fn classify(e: &Error) -> Status {
    if e.is_numerical_ambiguity() {
        Status::Ambiguity
    } else if matches!(e, Error::IdentityFailed(_)) {
        Status::Mismatch
    } else {
        Status::ConfigError
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            status: classify(&e),
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure {
            status: Status::ConfigError,
            message: message.into(),
        }
    }
}

pub struct RunOutput {
    pub status: Status,
    pub summary: Value,
    pub artifacts: Vec<(PathBuf, Vec<u8>)>,
    pub messages: Vec<String>,
}

impl RunOutput {
    fn new(summary: Value) -> Self {
        RunOutput {
            status: Status::Success,
            summary,
            artifacts: Vec::new(),
            messages: Vec::new(),
        }
    }

    fn flag(&mut self, status: Status, message: String) {
        self.status = self.status.worst(status);
        self.messages.push(message);
    }

    fn json_artifact<T: Serialize>(&mut self, path: &Option<PathBuf>, value: &T) -> Result<(), Failure> {
        if let Some(path) = path {
            let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::config(e.to_string()))?;
            bytes.push(b'\n');
            self.artifacts.push((path.clone(), bytes));
        }
        Ok(())
    }

    fn csv_artifact<T: Serialize>(&mut self, path: &Option<PathBuf>, rows: &[T]) -> Result<(), Failure> {
        if let Some(path) = path {
            self.artifacts.push((path.clone(), csv_bytes(rows)?));
        }
        Ok(())
    }
}

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::config(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| Failure::config(format!("csv: {e}")))
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partially written artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn execute(job: &JobConfig) -> Result<RunOutput, Failure> {
    let config = &job.config;
    match &job.job {
        Job::CountTorsion(args) => count(args, config),
        Job::VerifyBound(args) => verify_bound(args, config),
        Job::KempfCorank(args) => kempf(args, config),
        Job::ScanSingular(args) => scan(args, config),
        Job::ChowReport(args) => chow_report(args),
        Job::Sweep(args) => sweep(args, config),
    }
}

#[derive(Serialize)]
struct CountRow {
    p: String,
    q: String,
    magnitude: f64,
    margin: f64,
    hit: bool,
    indeterminate: bool,
}

fn join(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn count_rows(r: &CountReport) -> Vec<CountRow> {
    r.records
        .iter()
        .map(|rec| CountRow {
            p: join(&rec.index.p),
            q: join(&rec.index.q),
            magnitude: rec.magnitude,
            margin: rec.verdict.margin,
            hit: rec.verdict.is_on(),
            indeterminate: rec.verdict.indeterminate,
        })
        .collect()
}

fn count_summary(r: &CountReport) -> Value {
    json!({
        "g": r.g,
        "n": r.n,
        "count": r.count,
        "bound": r.bound,
        "reference": r.reference,
        "indeterminate": r.indeterminate.len(),
        "hits": r.hits.iter().map(|h| json!({"p": join(&h.p), "q": join(&h.q)})).collect::<Vec<_>>(),
    })
}

fn check_count_report(out: &mut RunOutput, r: &CountReport) {
    if !r.within_bound() {
        out.flag(Status::Mismatch, format!("count {} exceeds the bound {}", r.count, r.bound));
    }
    if !r.indeterminate.is_empty() {
        out.flag(
            Status::Ambiguity,
            format!("{} torsion points have indeterminate vanishing margins", r.indeterminate.len()),
        );
    }
}

fn count(args: &CountArgs, config: &Config) -> Result<RunOutput, Failure> {
    let omega = args.ambient.resolve()?;
    let x = parse_point(args.x.as_deref(), omega.genus())?;
    let report = count_torsion_on_theta(&omega, args.n, &x, config)?;
    let mut out = RunOutput::new(count_summary(&report));
    check_count_report(&mut out, &report);
    if let Some(expected) = args.expect {
        if report.count != expected {
            out.flag(Status::Mismatch, format!("count {} differs from expected {expected}", report.count));
        }
    }
    out.csv_artifact(&args.csv, &count_rows(&report))?;
    out.json_artifact(&args.json, &report)?;
    Ok(out)
}

fn verify_bound(args: &BoundArgs, config: &Config) -> Result<RunOutput, Failure> {
    let omega = args.ambient.resolve()?;
    let g = omega.genus();
    let x = if args.equality {
        if args.ambient.product.is_none() && args.ambient.tau.is_none() {
            return Err(Failure::config("--equality needs a product of elliptic curves (--product or --tau)"));
        }
        equality_translate(g)
    } else {
        parse_point(args.x.as_deref(), g)?
    };
    let report = count_torsion_on_theta(&omega, args.n, &x, config)?;
    let mut summary = count_summary(&report);
    summary["equality"] = json!(args.equality);
    let mut out = RunOutput::new(summary);
    check_count_report(&mut out, &report);
    if args.equality && report.count as u128 != report.bound {
        out.flag(
            Status::Mismatch,
            format!("equality translate gives {} rather than the bound {}", report.count, report.bound),
        );
    }
    out.csv_artifact(&args.csv, &count_rows(&report))?;
    out.json_artifact(&args.json, &report)?;
    Ok(out)
}

fn check_corank(out: &mut RunOutput, i: usize, r: &CorankReport) {
    if !r.matches {
        out.flag(
            Status::Mismatch,
            format!("job {i}: corank {} differs from torsion count {}", r.corank, r.torsion_count),
        );
    }
    if !r.lower_bound_holds {
        out.flag(
            Status::Mismatch,
            format!("job {i}: rank {} below the lower bound {}", r.numerical_rank, r.rank_lower_bound),
        );
    }
    if r.torsion_indeterminate > 0 {
        out.flag(Status::Ambiguity, format!("job {i}: indeterminate torsion margins"));
    }
}

fn kempf(args: &KempfArgs, config: &Config) -> Result<RunOutput, Failure> {
    let jobs: Vec<KempfJob> = match &args.batch {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?
        }
        None => {
            let omega = args.ambient.resolve()?;
            let g = omega.genus();
            vec![KempfJob {
                a: args.a,
                b: args.b,
                x: parse_point(args.x.as_deref(), g)?,
                y: parse_point(args.y.as_deref(), g)?,
                omega,
            }]
        }
    };
    if jobs.is_empty() {
        return Err(Failure::config("batch contains no jobs"));
    }
    let mut results = run_batch(&jobs, config);
    if args.batch.is_none() {
        // A single job has nothing to salvage: fail without artifacts.
        if let Some(Err(_)) = results.first() {
            return Err(results.remove(0).unwrap_err().into());
        }
    }
    let summaries: Vec<CorankSummary> = results
        .iter()
        .enumerate()
        .map(|(i, r)| CorankSummary::from_result(i, &jobs[i], r))
        .collect();
    let mut out = RunOutput::new(json!({ "jobs": summaries }));
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(report) => check_corank(&mut out, i, report),
            Err(e) => out.flag(classify(e), format!("job {i}: {e}")),
        }
    }
    out.csv_artifact(&args.csv, &summaries)?;
    let reports: Vec<Value> = results
        .iter()
        .map(|r| match r {
            Ok(rep) => serde_json::to_value(rep).unwrap_or(Value::Null),
            Err(e) => json!({ "error": e.to_string() }),
        })
        .collect();
    out.json_artifact(&args.json, &reports)?;
    Ok(out)
}

#[derive(Serialize)]
struct ScanRow {
    y_re: f64,
    y_im: f64,
    predicted: bool,
    corank: usize,
    torsion_count: u64,
}

fn scan(args: &ScanArgs, config: &Config) -> Result<RunOutput, Failure> {
    let tau = parse_complex(&args.tau)?;
    let x: Complex64 = parse_complex(&args.x)?;
    let points = singular_locus_scan(args.a, args.b, x, tau, args.grid, config)?;
    let rows: Vec<ScanRow> = points
        .iter()
        .map(|p| ScanRow {
            y_re: p.y.re,
            y_im: p.y.im,
            predicted: p.predicted,
            corank: p.corank,
            torsion_count: p.torsion_count,
        })
        .collect();
    let singular = points.iter().filter(|p| p.corank > 0).count();
    let predicted = points.iter().filter(|p| p.predicted).count();
    let mut out = RunOutput::new(json!({
        "a": args.a,
        "b": args.b,
        "points": points.len(),
        "singular": singular,
        "predicted": predicted,
    }));
    for p in &points {
        if (p.corank > 0) != p.predicted || p.corank as u64 != p.torsion_count {
            out.flag(
                Status::Mismatch,
                format!("y = {}: corank {} torsion count {} predicted {}", p.y, p.corank, p.torsion_count, p.predicted),
            );
        }
    }
    out.csv_artifact(&args.csv, &rows)?;
    out.json_artifact(&args.json, &points)?;
    Ok(out)
}

fn chow_report(args: &ChowArgs) -> Result<RunOutput, Failure> {
    if args.amax == 0 || args.gmax == 0 {
        return Err(Failure::config("--amax and --gmax must be positive"));
    }
    let rows = identity_report(&ReportRanges {
        a_max: args.amax,
        g_max: args.gmax,
        n_max: args.nmax,
        arithmetic_max: args.arithmetic_max,
        random_pairs: args.pairs,
        seed: args.seed,
    });
    let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
    let mut out = RunOutput::new(json!({
        "identities": rows.len(),
        "failed": failed.len(),
    }));
    for r in &failed {
        out.flag(
            Status::Mismatch,
            format!("{} [{}]: expected {}, computed {}", r.identity, r.params, r.expected, r.computed),
        );
    }
    out.csv_artifact(&args.csv, &rows)?;
    out.json_artifact(&args.json, &rows)?;
    Ok(out)
}

#[derive(Serialize)]
struct SweepRow {
    g: usize,
    seed: u64,
    n: u32,
    count: u64,
    bound: u128,
    within_bound: bool,
    indeterminate: usize,
}

fn sweep(args: &SweepArgs, config: &Config) -> Result<RunOutput, Failure> {
    if args.n.is_empty() || args.seeds == 0 {
        return Err(Failure::config("sweep needs at least one order and one seed"));
    }
    let cases: Vec<(u64, u32)> = (args.seed_start..args.seed_start + args.seeds)
        .flat_map(|s| args.n.iter().map(move |&n| (s, n)))
        .collect();
    let rows = cases
        .par_iter()
        .map(|&(seed, n)| {
            let omega = random_siegel(args.g, seed)?;
            let r = count_torsion_on_theta(&omega, n, &AbelianPoint::zero(args.g), config)?;
            Ok(SweepRow {
                g: args.g,
                seed,
                n,
                count: r.count,
                bound: r.bound,
                within_bound: r.within_bound(),
                indeterminate: r.indeterminate.len(),
            })
        })
        .collect::<theta_torsion::Result<Vec<_>>>()?;
    let max_count = rows.iter().map(|r| r.count).max().unwrap_or(0);
    let mut out = RunOutput::new(json!({
        "g": args.g,
        "instances": rows.len(),
        "max_count": max_count,
        "all_within_bound": rows.iter().all(|r| r.within_bound),
    }));
    for r in &rows {
        if !r.within_bound {
            out.flag(Status::Mismatch, format!("seed {} n {}: count {} exceeds {}", r.seed, r.n, r.count, r.bound));
        }
        if r.indeterminate > 0 {
            out.flag(Status::Ambiguity, format!("seed {} n {}: indeterminate margins", r.seed, r.n));
        }
    }
    out.csv_artifact(&args.csv, &rows)?;
    out.json_artifact(&args.json, &rows)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_ordering() {
        assert_eq!(Status::Mismatch.worst(Status::Ambiguity), Status::Ambiguity);
        assert_eq!(Status::Ambiguity.worst(Status::ConfigError), Status::ConfigError);
        assert_eq!(Status::Success.worst(Status::Mismatch), Status::Mismatch);
        assert_eq!(Status::ConfigError.code(), 2);
        assert_eq!(Status::Ambiguity.code(), 3);
    }

    #[test]
    fn error_classes() {
        let amb = Failure::from(Error::AmbiguousGap {
            sigma: 1e-7,
            threshold: 1e-7,
            factor: 10.0,
        });
        assert_eq!(amb.status, Status::Ambiguity);
        assert_eq!(Failure::from(Error::Parse("x".into())).status, Status::ConfigError);
        assert_eq!(Failure::from(Error::IdentityFailed("x".into())).status, Status::Mismatch);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
