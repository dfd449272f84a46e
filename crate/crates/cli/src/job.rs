//! Serializable job descriptions. Every subcommand is turned into a
//! [`JobConfig`] before it runs, so `run --config` on a saved job reproduces
//! the same artifacts.

use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use theta_torsion::ppav::{product_ppav, random_siegel, AbelianPoint};
use theta_torsion::ser::parse_complex;
use theta_torsion::theta::SiegelMatrix;
use theta_torsion::{Config, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    #[serde(flatten)]
    pub job: Job,
    #[serde(default)]
    pub config: Config,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "parameters", rename_all = "kebab-case")]
pub enum Job {
    CountTorsion(CountArgs),
    VerifyBound(BoundArgs),
    KempfCorank(KempfArgs),
    ScanSingular(ScanArgs),
    ChowReport(ChowArgs),
    Sweep(SweepArgs),
}

/// Where the period matrix comes from. Precedence: `omega` file, `product`,
/// `tau`, then a seeded random matrix of genus `g`.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct AmbientArgs {
    /// Genus of a seeded random period matrix.
    #[arg(long)]
    pub g: Option<usize>,
    /// Seed of the random period matrix.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Product of elliptic curves, e.g. `i,2i` or `0.5+1.5i`.
    #[arg(long)]
    pub product: Option<String>,
    /// Elliptic curve period.
    #[arg(long)]
    pub tau: Option<String>,
    /// Period matrix JSON file (`{"g": .., "omega": [[{"re": .., "im": ..}]]}`).
    #[arg(long)]
    pub omega: Option<PathBuf>,
}

impl AmbientArgs {
    pub fn resolve(&self) -> Result<SiegelMatrix> {
        if let Some(path) = &self.omega {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            return SiegelMatrix::from_json(&text);
        }
        if let Some(list) = &self.product {
            return product_ppav(&parse_complex_list(list)?);
        }
        if let Some(tau) = &self.tau {
            return product_ppav(&[parse_complex(tau)?]);
        }
        match (self.g, self.seed) {
            (Some(g), Some(seed)) => random_siegel(g, seed),
            _ => Err(Error::InvalidArgument(
                "specify the period matrix with --omega, --product, --tau or --g with --seed".into(),
            )),
        }
    }
}

pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>> {
    s.split(',').map(parse_complex).collect()
}

/// `0` for the origin, otherwise comma-separated complex coordinates.
pub fn parse_point(s: Option<&str>, g: usize) -> Result<AbelianPoint> {
    match s.map(str::trim) {
        None | Some("0") => Ok(AbelianPoint::zero(g)),
        Some(list) => {
            let z = parse_complex_list(list)?;
            if z.len() != g {
                return Err(Error::DimensionMismatch {
                    expected: g,
                    found: z.len(),
                });
            }
            Ok(AbelianPoint::from_complex(z))
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ambient: AmbientArgs,
    /// Torsion order.
    #[arg(long)]
    pub n: u32,
    /// Translate `x` (`0` or comma-separated complex coordinates).
    #[arg(long)]
    pub x: Option<String>,
    /// Fail with exit code 1 unless the count equals this value.
    #[arg(long)]
    pub expect: Option<u64>,
    /// Per-point CSV artifact.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Full JSON report artifact.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ambient: AmbientArgs,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub x: Option<String>,
    /// Use the translate `((1 + tau_i)/2)_i` and require the count to equal
    /// the bound (products of elliptic curves only).
    #[arg(long)]
    pub equality: bool,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct KempfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ambient: AmbientArgs,
    #[arg(long, default_value_t = 1)]
    pub a: u32,
    #[arg(long, default_value_t = 1)]
    pub b: u32,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    /// JSON array of jobs `{"a", "b", "x", "y", "omega"}`; replaces the
    /// single-job flags.
    #[arg(long)]
    pub batch: Option<PathBuf>,
    /// CSV summary (one row per job).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON reports.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 1)]
    pub a: u32,
    #[arg(long, default_value_t = 1)]
    pub b: u32,
    /// Elliptic curve period.
    #[arg(long, default_value = "i")]
    pub tau: String,
    #[arg(long, default_value = "0")]
    pub x: String,
    /// Grid points per direction.
    #[arg(long, default_value_t = 4)]
    pub grid: u32,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ChowArgs {
    /// Largest `a` and `b`.
    #[arg(long, default_value_t = 5)]
    pub amax: u64,
    /// Largest genus.
    #[arg(long, default_value_t = 6)]
    pub gmax: usize,
    /// Largest `n` in the Euler characteristic identity.
    #[arg(long, default_value_t = 6)]
    pub nmax: u64,
    /// Largest `n` and `g` for the divisibility and surface arithmetic.
    #[arg(long, default_value_t = 12)]
    pub arithmetic_max: u64,
    /// Random slope pairs for the criterion equivalence.
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl Default for ChowArgs {
    fn default() -> Self {
        ChowArgs {
            amax: 5,
            gmax: 6,
            nmax: 6,
            arithmetic_max: 12,
            pairs: 1000,
            seed: 2024,
            csv: None,
            json: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    pub g: usize,
    /// Torsion orders, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub n: Vec<u32>,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub seed_start: u64,
    /// Number of seeds.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl Default for SweepArgs {
    fn default() -> Self {
        SweepArgs {
            g: 2,
            n: vec![2, 3, 4],
            seed_start: 0,
            seeds: 20,
            csv: None,
            json: None,
        }
    }
}
