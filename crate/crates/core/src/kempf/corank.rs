use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{line_bundle_basis, pushforward_basis, SectionBasis};
use crate::chow::{ch_w, rank_lower_bound};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::ppav::{count_torsion_on_theta, AbelianPoint};
use crate::rank::{normalize_rows, numerical_rank};
use crate::ser;
use crate::theta::SiegelMatrix;

/// Candidate twists tried, in order, for an even-rank factor: the four
/// half-periods of the cover `C/(Z + a tau Z)`.
pub fn twist_candidates(a: u32, tau: Complex64) -> [Complex64; 4] {
    let cover = tau * a as f64;
    [Complex64::zero(), Complex64::new(0.5, 0.0), cover * 0.5, (cover + 1.0) * 0.5]
}

/// The two bases of a multiplication map and the lattice of the common
/// cover on which their products are sampled.
struct Factors {
    left: SectionBasis,
    right: SectionBasis,
    sample_lattice: SiegelMatrix,
}

fn supported(a: u32, b: u32, g: usize) -> Result<()> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidArgument("a and b must be positive".into()));
    }
    if a.gcd(&b) != 1 {
        return Err(Error::NotCoprime {
            a: a as u64,
            b: b as u64,
        });
    }
    match g {
        1 => Ok(()),
        2 if a == 1 && b == 1 => Ok(()),
        _ => Err(Error::Unsupported(format!(
            "multiplication maps are implemented for g = 1 (any coprime a, b) and g = 2 with a = b = 1, not (a, b, g) = ({a}, {b}, {g})"
        ))),
    }
}

fn factors(a: u32, b: u32, x: &AbelianPoint, y: &AbelianPoint, omega: &SiegelMatrix, twists: (Complex64, Complex64), config: &Config) -> Result<Factors> {
    let g = omega.genus();
    supported(a, b, g)?;
    let n = a + b;
    if g == 1 {
        let tau = omega.omega()[(0, 0)];
        Ok(Factors {
            left: pushforward_basis(a, n, x, tau, twists.0, config)?,
            right: pushforward_basis(b, n, y, tau, twists.1, config)?,
            sample_lattice: SiegelMatrix::diagonal(&[tau * (a * b) as f64])?,
        })
    } else {
        Ok(Factors {
            left: line_bundle_basis(n, x, omega, config)?,
            right: line_bundle_basis(n, y, omega, config)?,
            sample_lattice: omega.clone(),
        })
    }
}

fn sample_points(lattice: &SiegelMatrix, samples: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let g = lattice.genus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let u: Vec<f64> = (0..g).map(|_| rng.random()).collect();
            let v: Vec<f64> = (0..g).map(|_| rng.random()).collect();
            lattice.embed(&u, &v)
        })
        .collect()
}

fn assemble(f: &Factors, samples: usize, seed: u64) -> Result<DMatrix<Complex64>> {
    let points = sample_points(&f.sample_lattice, samples, seed);
    let columns = points
        .par_iter()
        .map(|z| {
            let s = f.left.evaluate_all(z)?;
            let t = f.right.evaluate_all(z)?;
            Ok(s.iter().flat_map(|si| t.iter().map(move |tj| si * tj)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = f.left.count() * f.right.count();
    let mut m = DMatrix::from_fn(rows, samples, |i, j| columns[j][i]);
    normalize_rows(&mut m);
    Ok(m)
}

fn check_samples(n: u32, g: usize, samples: usize) -> Result<()> {
    let target = (n as usize).pow(2 * g as u32);
    if samples < 4 * target {
        return Err(Error::InvalidArgument(format!(
            "{samples} samples is fewer than 4 x target dimension {target}"
        )));
    }
    Ok(())
}

/// Row-normalized evaluation matrix of the products `s_i t_j` at seeded
/// sample points of the common cover, with explicitly chosen twists.
#[allow(clippy::too_many_arguments)]
pub fn multiplication_matrix_with_twists(
    a: u32,
    b: u32,
    x: &AbelianPoint,
    y: &AbelianPoint,
    omega: &SiegelMatrix,
    twists: (Complex64, Complex64),
    samples: usize,
    seed: u64,
    config: &Config,
) -> Result<DMatrix<Complex64>> {
    check_samples(a + b, omega.genus(), samples)?;
    assemble(&factors(a, b, x, y, omega, twists, config)?, samples, seed)
}

/// As [`multiplication_matrix_with_twists`], with twists resolved by
/// [`resolve_twists`].
#[allow(clippy::too_many_arguments)]
pub fn multiplication_matrix(
    a: u32,
    b: u32,
    x: &AbelianPoint,
    y: &AbelianPoint,
    omega: &SiegelMatrix,
    samples: usize,
    seed: u64,
    config: &Config,
) -> Result<DMatrix<Complex64>> {
    supported(a, b, omega.genus())?;
    let twists = resolve_twists(a, b, omega, config)?;
    multiplication_matrix_with_twists(a, b, x, y, omega, twists, samples, seed, config)
}

/// Corank of the map with given twists, without the torsion cross-check.
fn raw_corank(a: u32, b: u32, x: &AbelianPoint, y: &AbelianPoint, omega: &SiegelMatrix, twists: (Complex64, Complex64), config: &Config) -> Result<usize> {
    let n = a + b;
    let target = (n as usize).pow(2 * omega.genus() as u32);
    let samples = config.sample_factor * target;
    let m = multiplication_matrix_with_twists(a, b, x, y, omega, twists, samples, config.sample_seed, config)?;
    Ok(target - numerical_rank(&m, config.rank_threshold, config.gap_factor)?.rank)
}

/// Locates the twist of an even-rank factor `W_{a,n}` on `C/(Z + tau Z)`.
///
/// Pairing with `W_{n-a,n}` at `x = 0`, the map must be singular exactly at
/// `y = w0 + eta`, `eta in E[n]`, with `w0 = (1 + tau)/2`. A candidate twist is
/// accepted if every such `y` gives corank 1 and a grid of generic `y` gives
/// corank 0. The first accepted candidate is returned.
pub fn calibrate_twist(a: u32, n: u32, tau: Complex64, config: &Config) -> Result<Complex64> {
    let b = n.checked_sub(a).filter(|&b| b > 0).ok_or_else(|| {
        Error::InvalidArgument(format!("rank {a} must be smaller than the degree {n}"))
    })?;
    let omega = SiegelMatrix::diagonal(&[tau])?;
    let w0 = (tau + 1.0) * 0.5;
    let origin = AbelianPoint::zero(1);
    let nf = n as f64;
    let mut predicted = Vec::new();
    for j in 0..n {
        for k in 0..n {
            predicted.push(w0 + (tau * k as f64 + j as f64) / nf);
        }
    }
    let grid: Vec<Complex64> = (0..3)
        .flat_map(|i| (0..3).map(move |j| Complex64::new((i as f64 + 0.37) / 3.0, 0.0) + tau * ((j as f64 + 0.21) / 3.0)))
        .collect();
    let right_twist = if b % 2 == 1 { Complex64::zero() } else { return Err(Error::Unsupported("both factors even".into())) };
    'candidates: for t in twist_candidates(a, tau) {
        for (points, expected) in [(&predicted, 1usize), (&grid, 0usize)] {
            for &yv in points.iter() {
                let y = AbelianPoint::from_complex(vec![yv]);
                match raw_corank(a, b, &origin, &y, &omega, (t, right_twist), config) {
                    Ok(c) if c == expected => {}
                    Ok(_) => continue 'candidates,
                    Err(e) if e.is_numerical_ambiguity() => continue 'candidates,
                    Err(e) => return Err(e),
                }
            }
        }
        return Ok(t);
    }
    Err(Error::CalibrationFailed(format!(
        "no half-period twist of W_{{{a},{n}}} reproduces the predicted singular locus for tau = {tau}"
    )))
}

/// Twists used for the two factors. Odd-rank factors (and all factors at
/// `g = 2`) use `0`, i.e. the bundle centred at the cover's odd half-period;
/// even-rank factors are calibrated.
pub fn resolve_twists(a: u32, b: u32, omega: &SiegelMatrix, config: &Config) -> Result<(Complex64, Complex64)> {
    if omega.genus() != 1 {
        return Ok((Complex64::zero(), Complex64::zero()));
    }
    let tau = omega.omega()[(0, 0)];
    let n = a + b;
    let pick = |r: u32| if r.is_multiple_of(2) { calibrate_twist(r, n, tau, config) } else { Ok(Complex64::zero()) };
    Ok((pick(a)?, pick(b)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorankReport {
    pub a: u32,
    pub b: u32,
    pub n: u32,
    pub g: usize,
    pub x: AbelianPoint,
    pub y: AbelianPoint,
    pub source_dim: usize,
    pub target_dim: usize,
    pub samples: usize,
    pub sample_seed: u64,
    /// Descending, after row normalization.
    pub singular_values: Vec<f64>,
    pub numerical_rank: usize,
    pub corank: usize,
    /// Absolute singular-value cut.
    pub threshold: f64,
    pub min_accepted: Option<f64>,
    pub max_rejected: Option<f64>,
    pub torsion_count: u64,
    /// Torsion points whose vanishing margin was indeterminate.
    pub torsion_indeterminate: usize,
    #[serde(rename = "match")]
    pub matches: bool,
    pub rank_lower_bound: u64,
    pub lower_bound_holds: bool,
    #[serde(with = "ser::complex")]
    pub twist_left: Complex64,
    #[serde(with = "ser::complex")]
    pub twist_right: Complex64,
    pub left_bundle: String,
    pub right_bundle: String,
}

fn dims(a: u32, b: u32, g: usize) -> Result<(usize, usize)> {
    let n = (a + b) as u64;
    let wa = ch_w(a as u64, n, g)?;
    let wb = ch_w(b as u64, n, g)?;
    let to_usize = |r: num_rational::BigRational| {
        r.to_integer()
            .to_usize()
            .ok_or_else(|| Error::IdentityFailed(format!("dimension {r} is not a small integer")))
    };
    let source = to_usize(wa.euler_char())? * to_usize(wb.euler_char())?;
    let target = to_usize(wa.tensor(&wb)?.euler_char())?;
    Ok((source, target))
}

/// Corank report with the configured sample count and seed.
pub fn corank(a: u32, b: u32, x: &AbelianPoint, y: &AbelianPoint, omega: &SiegelMatrix, config: &Config) -> Result<CorankReport> {
    let target = ((a + b) as usize).pow(2 * omega.genus() as u32);
    corank_sampled(a, b, x, y, omega, config.sample_factor * target, config.sample_seed, config)
}

#[allow(clippy::too_many_arguments)]
pub fn corank_sampled(
    a: u32,
    b: u32,
    x: &AbelianPoint,
    y: &AbelianPoint,
    omega: &SiegelMatrix,
    samples: usize,
    seed: u64,
    config: &Config,
) -> Result<CorankReport> {
    let g = omega.genus();
    supported(a, b, g)?;
    check_samples(a + b, g, samples)?;
    let (source_dim, target_dim) = dims(a, b, g)?;
    let twists = resolve_twists(a, b, omega, config)?;
    let f = factors(a, b, x, y, omega, twists, config)?;
    if f.left.count() * f.right.count() != source_dim {
        return Err(Error::IdentityFailed(format!(
            "basis sizes {} x {} disagree with source dimension {source_dim}",
            f.left.count(),
            f.right.count()
        )));
    }
    let m = assemble(&f, samples, seed)?;
    let decision = numerical_rank(&m, config.rank_threshold, config.gap_factor)?;
    let corank = target_dim - decision.rank;
    let count = count_torsion_on_theta(omega, a + b, &(y - x), config)?;
    let bound = rank_lower_bound(a as u64, b as u64, g)?
        .to_u64()
        .ok_or_else(|| Error::IdentityFailed("rank bound overflows".into()))?;
    Ok(CorankReport {
        a,
        b,
        n: a + b,
        g,
        x: x.clone(),
        y: y.clone(),
        source_dim,
        target_dim,
        samples,
        sample_seed: seed,
        numerical_rank: decision.rank,
        corank,
        threshold: decision.threshold,
        min_accepted: decision.min_accepted,
        max_rejected: decision.max_rejected,
        singular_values: decision.singular_values,
        torsion_count: count.count,
        torsion_indeterminate: count.indeterminate.len(),
        matches: corank as u64 == count.count,
        rank_lower_bound: bound,
        lower_bound_holds: decision.rank as u64 >= bound,
        twist_left: twists.0,
        twist_right: twists.1,
        left_bundle: f.left.bundle_tag().to_string(),
        right_bundle: f.right.bundle_tag().to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    #[serde(with = "ser::complex")]
    pub y: Complex64,
    /// Whether `y` was taken from the predicted singular set.
    pub predicted: bool,
    pub corank: usize,
    /// Independent count `#(E[n] + y - x) ∩ Theta`.
    pub torsion_count: u64,
}

/// Coranks over a `grid x grid` lattice of `y` (offset to avoid torsion
/// translates) plus the predicted singular points `x + w0 + eta`.
pub fn singular_locus_scan(a: u32, b: u32, x: Complex64, tau: Complex64, grid: u32, config: &Config) -> Result<Vec<ScanPoint>> {
    let omega = SiegelMatrix::diagonal(&[tau])?;
    supported(a, b, 1)?;
    let n = a + b;
    let w0 = (tau + 1.0) * 0.5;
    let mut ys = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let g = grid as f64;
            ys.push((x + (i as f64 + 0.37) / g + tau * ((j as f64 + 0.21) / g), false));
        }
    }
    for j in 0..n {
        for k in 0..n {
            ys.push((x + w0 + (tau * k as f64 + j as f64) / n as f64, true));
        }
    }
    let xp = AbelianPoint::from_complex(vec![x]);
    ys.into_iter()
        .map(|(y, predicted)| {
            let r = corank(a, b, &xp, &AbelianPoint::from_complex(vec![y]), &omega, config)?;
            Ok(ScanPoint {
                y,
                predicted,
                corank: r.corank,
                torsion_count: r.torsion_count,
            })
        })
        .collect()
}

/// One multiplication-map job of a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KempfJob {
    pub a: u32,
    pub b: u32,
    pub x: AbelianPoint,
    pub y: AbelianPoint,
    pub omega: SiegelMatrix,
}

/// CSV summary row of one job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorankSummary {
    pub job: usize,
    pub a: u32,
    pub b: u32,
    pub g: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub numerical_rank: usize,
    pub corank: usize,
    pub torsion_count: u64,
    #[serde(rename = "match")]
    pub matches: bool,
    pub min_accepted_sigma: Option<f64>,
    pub max_rejected_sigma: Option<f64>,
    pub error: Option<String>,
}

impl CorankSummary {
    pub fn from_result(job: usize, input: &KempfJob, result: &Result<CorankReport>) -> Self {
        match result {
            Ok(r) => CorankSummary {
                job,
                a: r.a,
                b: r.b,
                g: r.g,
                source_dim: r.source_dim,
                target_dim: r.target_dim,
                numerical_rank: r.numerical_rank,
                corank: r.corank,
                torsion_count: r.torsion_count,
                matches: r.matches,
                min_accepted_sigma: r.min_accepted,
                max_rejected_sigma: r.max_rejected,
                error: None,
            },
            Err(e) => CorankSummary {
                job,
                a: input.a,
                b: input.b,
                g: input.omega.genus(),
                source_dim: 0,
                target_dim: 0,
                numerical_rank: 0,
                corank: 0,
                torsion_count: 0,
                matches: false,
                min_accepted_sigma: None,
                max_rejected_sigma: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// Runs jobs concurrently; results come back in job order.
pub fn run_batch(jobs: &[KempfJob], config: &Config) -> Vec<Result<CorankReport>> {
    jobs.par_iter()
        .map(|j| corank(j.a, j.b, &j.x, &j.y, &j.omega, config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(z: Complex64) -> AbelianPoint {
        AbelianPoint::from_complex(vec![z])
    }

    #[test]
    fn matrix_shapes() {
        let config = Config::default();
        let omega = SiegelMatrix::diagonal(&[c(0.0, 1.0)]).unwrap();
        let o = AbelianPoint::zero(1);
        assert_eq!(multiplication_matrix(1, 1, &o, &o, &omega, 32, 1, &config).unwrap().shape(), (4, 32));
        assert_eq!(multiplication_matrix(1, 2, &o, &o, &omega, 72, 1, &config).unwrap().shape(), (9, 72));
        let omega2 = SiegelMatrix::diagonal(&[c(0.0, 1.0), c(0.0, 2.0)]).unwrap();
        let o2 = AbelianPoint::zero(2);
        assert_eq!(multiplication_matrix(1, 1, &o2, &o2, &omega2, 64, 1, &config).unwrap().shape(), (16, 64));
        assert!(multiplication_matrix(1, 1, &o, &o, &omega, 8, 1, &config).is_err());
        assert!(matches!(
            multiplication_matrix(1, 2, &o2, &o2, &omega2, 400, 1, &config),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn elliptic_kempf_map() {
        let config = Config::default();
        let tau = c(0.0, 1.0);
        let omega = SiegelMatrix::diagonal(&[tau]).unwrap();
        let o = AbelianPoint::zero(1);
        let r = corank(1, 1, &o, &o, &omega, &config).unwrap();
        assert_eq!((r.corank, r.torsion_count), (1, 1));
        assert!(r.matches && r.lower_bound_holds);
        assert_eq!((r.source_dim, r.target_dim), (4, 4));

        let r = corank(1, 2, &o, &pt(c(0.3, 0.2)), &omega, &config).unwrap();
        assert_eq!((r.corank, r.torsion_count), (0, 0));

        let hit = pt((tau + 1.0) * 0.5 - 1.0 / 3.0);
        let r = corank(1, 2, &o, &hit, &omega, &config).unwrap();
        assert_eq!((r.corank, r.torsion_count), (1, 1));
    }

    #[test]
    fn even_rank_calibration_picks_untwisted_bundle() {
        let config = Config::default();
        for tau in [c(0.0, 1.0), c(0.5, 1.5)] {
            assert_eq!(calibrate_twist(2, 3, tau, &config).unwrap(), Complex64::zero());
        }
    }

    #[test]
    fn torsion_translation_invariance() {
        let config = Config::default();
        let omega = SiegelMatrix::diagonal(&[c(0.5, 1.5)]).unwrap();
        let x = pt(c(0.11, 0.05));
        let y = &pt((c(0.5, 1.5) + 1.0) * 0.5) + &x;
        let eta = AbelianPoint::rational(vec![Rational64::new(1, 3)], vec![Rational64::new(2, 3)]).unwrap();
        let base = corank(2, 1, &x, &y, &omega, &config).unwrap();
        let moved = corank(2, 1, &(&x + &eta), &(&y + &eta), &omega, &config).unwrap();
        assert_eq!(base.corank, moved.corank);
        assert!(base.matches && moved.matches);
    }

    #[test]
    fn report_serializes_match_field() {
        let config = Config::default();
        let omega = SiegelMatrix::diagonal(&[c(0.0, 1.0)]).unwrap();
        let o = AbelianPoint::zero(1);
        let r = corank(1, 1, &o, &o, &omega, &config).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["match"], serde_json::Value::Bool(true));
    }
}
