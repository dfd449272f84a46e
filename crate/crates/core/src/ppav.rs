//! Points, torsion subgroups and torsion counts on a principally polarized
//! abelian variety `C^g / (Z^g + Omega Z^g)`.

use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::ser;
use crate::theta::{rational_to_f64, SiegelMatrix, ThetaDivisor, Verdict};

/// The point `Omega p + q + extra`, with `p`, `q` exact.
///
/// In JSON any of the three coordinate lists may be omitted and is then
/// taken to be zero; the lists that are present must agree in length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct AbelianPoint {
    #[serde(with = "ser::rational_vec")]
    pub p: Vec<Rational64>,
    #[serde(with = "ser::rational_vec")]
    pub q: Vec<Rational64>,
    #[serde(with = "ser::complex_vec")]
    pub extra: Vec<Complex64>,
}

#[derive(Deserialize)]
struct RawPoint {
    #[serde(default, with = "ser::rational_vec")]
    p: Vec<Rational64>,
    #[serde(default, with = "ser::rational_vec")]
    q: Vec<Rational64>,
    #[serde(default, with = "ser::complex_vec")]
    extra: Vec<Complex64>,
}

impl TryFrom<RawPoint> for AbelianPoint {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        let g = raw.p.len().max(raw.q.len()).max(raw.extra.len());
        let fill_r = |v: Vec<Rational64>| if v.is_empty() { vec![Rational64::zero(); g] } else { v };
        let extra = if raw.extra.is_empty() {
            vec![Complex64::zero(); g]
        } else {
            raw.extra
        };
        AbelianPoint::new(fill_r(raw.p), fill_r(raw.q), extra)
    }
}

impl AbelianPoint {
    pub fn new(p: Vec<Rational64>, q: Vec<Rational64>, extra: Vec<Complex64>) -> Result<Self> {
        let g = p.len();
        for found in [q.len(), extra.len()] {
            if found != g {
                return Err(Error::DimensionMismatch { expected: g, found });
            }
        }
        Ok(AbelianPoint { p, q, extra })
    }

    pub fn zero(g: usize) -> Self {
        AbelianPoint {
            p: vec![Rational64::zero(); g],
            q: vec![Rational64::zero(); g],
            extra: vec![Complex64::zero(); g],
        }
    }

    pub fn rational(p: Vec<Rational64>, q: Vec<Rational64>) -> Result<Self> {
        let g = p.len();
        Self::new(p, q, vec![Complex64::zero(); g])
    }

    /// A point given only by its complex coordinates.
    pub fn from_complex(z: Vec<Complex64>) -> Self {
        let g = z.len();
        AbelianPoint {
            p: vec![Rational64::zero(); g],
            q: vec![Rational64::zero(); g],
            extra: z,
        }
    }

    pub fn genus(&self) -> usize {
        self.p.len()
    }

    pub fn is_rational(&self) -> bool {
        self.extra.iter().all(|c| c.is_zero())
    }

    /// Exact test for `n x = 0`.
    pub fn is_torsion_of_order(&self, n: i64) -> bool {
        let n = Rational64::from_integer(n);
        self.is_rational() && self.p.iter().chain(&self.q).all(|x| (x * n).is_integer())
    }

    pub fn embed(&self, omega: &SiegelMatrix) -> Vec<Complex64> {
        let pf: Vec<f64> = self.p.iter().map(rational_to_f64).collect();
        let qf: Vec<f64> = self.q.iter().map(rational_to_f64).collect();
        omega
            .embed(&pf, &qf)
            .into_iter()
            .zip(&self.extra)
            .map(|(a, b)| a + b)
            .collect()
    }

    fn check_genus(&self, other: &AbelianPoint) -> Result<()> {
        if self.genus() == other.genus() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.genus(),
                found: other.genus(),
            })
        }
    }

    pub fn try_add(&self, other: &AbelianPoint) -> Result<AbelianPoint> {
        self.check_genus(other)?;
        Ok(self + other)
    }
}

impl Add for &AbelianPoint {
    type Output = AbelianPoint;

    /// Panics on genus mismatch; see [`AbelianPoint::try_add`].
    fn add(self, other: &AbelianPoint) -> AbelianPoint {
        assert_eq!(self.genus(), other.genus(), "adding points of different genus");
        AbelianPoint {
            p: self.p.iter().zip(&other.p).map(|(a, b)| a + b).collect(),
            q: self.q.iter().zip(&other.q).map(|(a, b)| a + b).collect(),
            extra: self.extra.iter().zip(&other.extra).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Neg for &AbelianPoint {
    type Output = AbelianPoint;

    fn neg(self) -> AbelianPoint {
        AbelianPoint {
            p: self.p.iter().map(|a| -a).collect(),
            q: self.q.iter().map(|a| -a).collect(),
            extra: self.extra.iter().map(|a| -a).collect(),
        }
    }
}

impl Sub for &AbelianPoint {
    type Output = AbelianPoint;

    fn sub(self, other: &AbelianPoint) -> AbelianPoint {
        self + &(-other)
    }
}

/// The `n`-torsion point `(Omega p + q) / n`, `p, q` in `[0, n)^g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorsionIndex {
    pub n: u32,
    pub p: Vec<u32>,
    pub q: Vec<u32>,
}

impl TorsionIndex {
    pub fn new(n: u32, p: Vec<u32>, q: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("torsion order must be at least 1".into()));
        }
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch {
                expected: p.len(),
                found: q.len(),
            });
        }
        let p = p.into_iter().map(|v| v % n).collect();
        let q = q.into_iter().map(|v| v % n).collect();
        Ok(TorsionIndex { n, p, q })
    }

    pub fn to_point(&self) -> AbelianPoint {
        let n = self.n as i64;
        let r = |v: &[u32]| v.iter().map(|&k| Rational64::new(k as i64, n)).collect();
        AbelianPoint::rational(r(&self.p), r(&self.q)).expect("p and q have equal length")
    }

    /// Index of `self + other` in the same group.
    pub fn add(&self, other: &TorsionIndex) -> TorsionIndex {
        assert_eq!(self.n, other.n, "adding torsion of different orders");
        let n = self.n;
        let s = |a: &[u32], b: &[u32]| a.iter().zip(b).map(|(x, y)| (x + y) % n).collect();
        TorsionIndex {
            n,
            p: s(&self.p, &other.p),
            q: s(&self.q, &other.q),
        }
    }

    pub fn negate(&self) -> TorsionIndex {
        let n = self.n;
        let m = |a: &[u32]| a.iter().map(|x| (n - x) % n).collect();
        TorsionIndex {
            n,
            p: m(&self.p),
            q: m(&self.q),
        }
    }
}

fn group_order(n: u32, g: usize) -> u128 {
    (n as u128).pow(2 * g as u32)
}

/// All `n^{2g}` indices in lexicographic order of `(p, q)`.
pub fn enumerate_torsion(n: u32, g: usize, cap: u64) -> Result<Vec<TorsionIndex>> {
    if n == 0 || g == 0 {
        return Err(Error::InvalidArgument(format!("need n, g >= 1, got n={n}, g={g}")));
    }
    let size = group_order(n, g);
    if size > cap as u128 {
        return Err(Error::InstanceTooLarge { size, cap });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut digits = vec![0u32; 2 * g];
    for _ in 0..size {
        out.push(TorsionIndex {
            n,
            p: digits[..g].to_vec(),
            q: digits[g..].to_vec(),
        });
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < n {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

/// `n^{2g} - (n^2 - 1)^g`.
pub fn torsion_bound(n: u32, g: usize) -> u128 {
    let n = n as u128;
    n.pow(2 * g as u32) - (n * n - 1).pow(g as u32)
}

/// Count on a product of elliptic curves: `n^{2g} - prod_i (n^2 - c_i)` where
/// `c_i` is the count on the `i`-th factor.
pub fn product_count(n: u32, factor_counts: &[u32]) -> u128 {
    let n2 = (n as u128) * (n as u128);
    let miss: u128 = factor_counts.iter().map(|&c| n2 - c as u128).product();
    n2.pow(factor_counts.len() as u32) - miss
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub index: TorsionIndex,
    /// Normalized `|theta|` at `eta + x`.
    pub magnitude: f64,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub n: u32,
    pub g: usize,
    pub x: AbelianPoint,
    pub count: u64,
    pub bound: u128,
    pub reference: f64,
    pub rel_tol: f64,
    pub hits: Vec<TorsionIndex>,
    pub indeterminate: Vec<TorsionIndex>,
    /// One record per torsion point, in enumeration order.
    pub records: Vec<CountRecord>,
}

impl CountReport {
    pub fn within_bound(&self) -> bool {
        (self.count as u128) <= self.bound
    }

    /// Largest normalized magnitude among hits.
    pub fn max_hit_magnitude(&self) -> Option<f64> {
        self.records
            .iter()
            .filter(|r| r.verdict.is_on())
            .map(|r| r.magnitude)
            .reduce(f64::max)
    }

    /// Smallest normalized magnitude among non-hits.
    pub fn min_miss_magnitude(&self) -> Option<f64> {
        self.records
            .iter()
            .filter(|r| !r.verdict.is_on())
            .map(|r| r.magnitude)
            .reduce(f64::min)
    }
}

/// Counts `eta in A[n]` with `theta(eta + x) = 0`, reusing a divisor whose
/// reference magnitude is already computed.
pub fn count_on_divisor(divisor: &ThetaDivisor, n: u32, x: &AbelianPoint, config: &Config) -> Result<CountReport> {
    let g = divisor.omega().genus();
    if x.genus() != g {
        return Err(Error::DimensionMismatch {
            expected: g,
            found: x.genus(),
        });
    }
    let indices = enumerate_torsion(n, g, config.enumeration_cap)?;
    let records = indices
        .into_par_iter()
        .map(|index| {
            let point = &index.to_point() + x;
            let verdict = divisor.test_point(&point.p, &point.q, &point.extra)?;
            Ok(CountRecord {
                index,
                magnitude: verdict.margin * divisor.reference(),
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let hits: Vec<TorsionIndex> = records
        .iter()
        .filter(|r| r.verdict.is_on())
        .map(|r| r.index.clone())
        .collect();
    let indeterminate = records
        .iter()
        .filter(|r| r.verdict.indeterminate)
        .map(|r| r.index.clone())
        .collect();
    Ok(CountReport {
        n,
        g,
        x: x.clone(),
        count: hits.len() as u64,
        bound: torsion_bound(n, g),
        reference: divisor.reference(),
        rel_tol: divisor.rel_tol(),
        hits,
        indeterminate,
        records,
    })
}

pub fn count_torsion_on_theta(omega: &SiegelMatrix, n: u32, x: &AbelianPoint, config: &Config) -> Result<CountReport> {
    if n < 1 {
        return Err(Error::InvalidArgument("torsion order must be at least 1".into()));
    }
    let size = group_order(n, omega.genus());
    if size > config.enumeration_cap as u128 {
        return Err(Error::InstanceTooLarge {
            size,
            cap: config.enumeration_cap,
        });
    }
    let divisor = ThetaDivisor::new(omega.clone(), config)?;
    count_on_divisor(&divisor, n, x, config)
}

/// `diag(taus)`.
pub fn product_ppav(taus: &[Complex64]) -> Result<SiegelMatrix> {
    if taus.is_empty() {
        return Err(Error::InvalidArgument("need at least one elliptic factor".into()));
    }
    SiegelMatrix::diagonal(taus)
}

/// The translate `x_i = (1 + tau_i) / 2` on a product of `g` elliptic curves.
///
/// Each factor's divisor translate is then the origin, which is `n`-torsion
/// for every `n`, so the count equals the bound.
pub fn equality_translate(g: usize) -> AbelianPoint {
    let half = vec![Rational64::new(1, 2); g];
    AbelianPoint::rational(half.clone(), half).expect("equal lengths")
}

/// Seeded period matrix: `Re` entries uniform in `[-1/2, 1/2]`,
/// `Im = Q^T Q + I/2` with `Q` uniform in `[-1, 1]^{g x g}`.
pub fn random_siegel(g: usize, seed: u64) -> Result<SiegelMatrix> {
    if g == 0 {
        return Err(Error::InvalidArgument("genus must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut re = vec![vec![0.0; g]; g];
    for i in 0..g {
        for j in i..g {
            let v = rng.random_range(-0.5..=0.5);
            re[i][j] = v;
            re[j][i] = v;
        }
    }
    let qm: Vec<Vec<f64>> = (0..g)
        .map(|_| (0..g).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let rows: Vec<Vec<Complex64>> = (0..g)
        .map(|i| {
            (0..g)
                .map(|j| {
                    let mut y: f64 = (0..g).map(|k| qm[k][i] * qm[k][j]).sum();
                    if i == j {
                        y += 0.5;
                    }
                    Complex64::new(re[i][j], y)
                })
                .collect()
        })
        .collect();
    SiegelMatrix::from_rows(&rows)
}

/// `{eta in A[n] : theta(x + y + eta) = 0}`.
pub fn e_divisor_hits(omega: &SiegelMatrix, n: u32, y: &AbelianPoint, x: &AbelianPoint, config: &Config) -> Result<Vec<TorsionIndex>> {
    Ok(count_torsion_on_theta(omega, n, &x.try_add(y)?, config)?.hits)
}
