//! Lattice-sum evaluation of `theta[a;b](z, Omega)`.
//!
//! Write `z = x + i y`, `Y = Im Omega`. Each summand has modulus
//!
//! ```text
//! |exp(pi i v^T Omega v + 2 pi i v^T (z + b))| = exp(s) * exp(-pi (v + c)^T Y (v + c)),
//! s = pi y^T Y^{-1} y,   c = Y^{-1} y,
//! ```
//!
//! so after removing the factor `exp(s)` the terms form a Gaussian over the
//! shifted lattice `Z^g + a + c`. We sum over the ellipsoid
//! `(v + c)^T Y (v + c) <= R^2` and bound the tail by
//!
//! ```text
//! tail(R) <= min_{0 < t < 1}  exp(-(1 - t) pi R^2) * coth(t pi lambda / 2)^g
//! ```
//!
//! where `lambda` is the smallest eigenvalue of `Y`. Outside the ellipsoid
//! each term satisfies `exp(-pi q) <= exp(-(1-t) pi R^2) exp(-t pi q)`; the
//! remaining shifted Gaussian sum is at most the unshifted one (Poisson
//! summation, positive Fourier coefficients), which is at most
//! `(sum_k exp(-t pi lambda k^2))^g <= coth(t pi lambda / 2)^g`.
//! The minimum is taken over `t = j/64`, `j = 1..63`.
//!
//! Before summing, `z` is reduced by the lattice so that `Y^{-1} Im z` lies in
//! `[-1/2, 1/2]^g`, which keeps every intermediate quantity bounded.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::characteristic::{centered, dot_frac, frac, rational_to_f64, RationalPhase, ThetaCharacteristic};
use super::siegel::{quad_form, SiegelMatrix, MIN_EIGENVALUE};
use crate::error::{Error, Result};
use crate::ser;

const T_GRID: usize = 64;
/// Refuse evaluations whose ellipsoid would contain more points than this.
const MAX_LATTICE_POINTS: f64 = 5.0e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    #[serde(with = "ser::complex")]
    pub value: Complex64,
    /// Absolute bound on the truncation error of `value`.
    pub error_bound: f64,
    /// `pi y^T Y^{-1} y` with `y = Im z`.
    pub scale: f64,
    /// `value * exp(-scale)`, computed without forming `value`.
    #[serde(with = "ser::complex")]
    pub normalized: Complex64,
    /// Ellipsoid radius (in the `Y` norm) that was summed.
    pub radius: f64,
}

impl ThetaValue {
    pub fn normalized_abs(&self) -> f64 {
        self.normalized.norm()
    }

    /// Truncation bound on `normalized`.
    pub fn normalized_error_bound(&self) -> f64 {
        tail_bound_for_radius(self.error_bound, self.scale)
    }
}

fn tail_bound_for_radius(error_bound: f64, scale: f64) -> f64 {
    error_bound * (-scale).exp()
}

fn ln_coth(x: f64) -> f64 {
    let e = (-2.0 * x).exp();
    e.ln_1p() - (-e).ln_1p()
}

fn t_grid() -> impl Iterator<Item = f64> {
    (1..T_GRID).map(|j| j as f64 / T_GRID as f64)
}

/// Upper bound on the scale-normalized tail outside radius `radius`.
pub fn tail_bound(lambda_min: f64, g: usize, radius: f64) -> f64 {
    t_grid()
        .map(|t| (-(1.0 - t) * PI * radius * radius + g as f64 * ln_coth(t * PI * lambda_min / 2.0)).exp())
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn radius_for(lambda_min: f64, g: usize, tol: f64) -> f64 {
    t_grid()
        .map(|t| {
            let num = g as f64 * ln_coth(t * PI * lambda_min / 2.0) - tol.ln();
            (num.max(0.0) / ((1.0 - t) * PI)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance {tol} must lie in (0, 1)")))
    }
}

/// Truncation radius `R` (in the norm `sqrt(u^T Y u)`) whose tail bound is at
/// most `tol`.
pub fn truncation_radius(y: &DMatrix<f64>, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if y.nrows() != y.ncols() || y.nrows() == 0 {
        return Err(Error::InvalidArgument("Y must be a non-empty square matrix".into()));
    }
    let min_eigenvalue = SymmetricEigen::new(y.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(min_eigenvalue > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue });
    }
    if min_eigenvalue < MIN_EIGENVALUE {
        return Err(Error::IllConditioned(format!("smallest eigenvalue {min_eigenvalue:e}")));
    }
    Ok(radius_for(min_eigenvalue, y.nrows(), tol))
}

fn check_point_budget(omega: &SiegelMatrix, radius: f64) -> Result<()> {
    let g = omega.genus() as i32;
    // volume of the ellipsoid u^T Y u <= R^2, plus a margin for boundary cells
    let det = omega.im().determinant();
    let unit_ball = PI.powf(g as f64 / 2.0) / gamma_half_plus_one(g);
    let estimate = unit_ball * (radius + (g as f64).sqrt()).powi(g) / det.sqrt();
    if !estimate.is_finite() || estimate > MAX_LATTICE_POINTS {
        return Err(Error::IllConditioned(format!(
            "truncation ellipsoid would hold ~{estimate:.3e} lattice points"
        )));
    }
    Ok(())
}

/// `Gamma(g/2 + 1)`.
fn gamma_half_plus_one(g: i32) -> f64 {
    let mut x = if g % 2 == 0 { 1.0 } else { PI.sqrt() / 2.0 };
    let mut k = if g % 2 == 0 { 1.0 } else { 1.5 };
    while k <= g as f64 / 2.0 + 1e-9 {
        x *= k;
        k += 1.0;
    }
    x
}

/// Result of reducing `z` modulo the period lattice: `z = z0 + Omega m + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPoint {
    pub z0: Vec<Complex64>,
    pub m: Vec<i64>,
    pub n: Vec<i64>,
    /// `theta(z) = cocycle * theta(z0)` for the zero characteristic.
    pub cocycle: Complex64,
}

pub fn reduce_point(z: &[Complex64], omega: &SiegelMatrix) -> ReducedPoint {
    let (z0, m, n) = reduce(z, omega);
    let cocycle = log_cocycle(omega, &m, &z0).exp();
    ReducedPoint { z0, m, n, cocycle }
}

fn reduce(z: &[Complex64], omega: &SiegelMatrix) -> (Vec<Complex64>, Vec<i64>, Vec<i64>) {
    let g = omega.genus();
    let y: Vec<f64> = z.iter().map(|c| c.im).collect();
    let m: Vec<i64> = (0..g)
        .map(|i| {
            let s: f64 = (0..g).map(|j| omega.im_inv()[(i, j)] * y[j]).sum();
            s.round() as i64
        })
        .collect();
    let mf: Vec<f64> = m.iter().map(|&v| v as f64).collect();
    let shift = omega.embed(&mf, &vec![0.0; g]);
    let z1: Vec<Complex64> = z.iter().zip(&shift).map(|(a, b)| a - b).collect();
    let n: Vec<i64> = z1.iter().map(|c| c.re.round() as i64).collect();
    let z0 = z1.iter().zip(&n).map(|(c, &k)| c - k as f64).collect();
    (z0, m, n)
}

/// `-pi i m^T Omega m - 2 pi i m^T z0`.
fn log_cocycle(omega: &SiegelMatrix, m: &[i64], z0: &[Complex64]) -> Complex64 {
    let g = omega.genus();
    let mut mom = Complex64::new(0.0, 0.0);
    for i in 0..g {
        for j in 0..g {
            mom += omega.omega()[(i, j)] * (m[i] * m[j]) as f64;
        }
    }
    let mz: Complex64 = m.iter().zip(z0).map(|(&k, c)| c * k as f64).sum();
    let i = Complex64::i();
    -i * PI * mom - i * 2.0 * PI * mz
}

/// Visits every integer vector `k` with `(k + offset)^T Y (k + offset) <= R^2`.
///
/// Candidates are generated coordinate by coordinate from the Cholesky factor
/// with a small slack; membership is then decided by `quad_form`, which is
/// sign-symmetric, so the visited set is exactly symmetric whenever the
/// shifted lattice is.
fn for_each_in_ellipsoid(omega: &SiegelMatrix, offset: &[f64], radius: f64, mut visit: impl FnMut(&[i64], &[f64])) {
    let g = omega.genus();
    let r = omega.im_chol_upper();
    let r2 = radius * radius;
    let slack = r2 * (1.0 + 1e-9) + 1e-12;
    let mut k = vec![0_i64; g];
    let mut u = vec![0.0_f64; g];

    #[allow(clippy::too_many_arguments)]
    fn walk(
        level: usize,
        rem: f64,
        r: &DMatrix<f64>,
        y: &DMatrix<f64>,
        offset: &[f64],
        r2: f64,
        k: &mut [i64],
        u: &mut [f64],
        visit: &mut dyn FnMut(&[i64], &[f64]),
    ) {
        let g = k.len();
        let t: f64 = ((level + 1)..g).map(|j| r[(level, j)] * u[j]).sum();
        let rii = r[(level, level)];
        let half_width = rem.max(0.0).sqrt() / rii;
        let center = -t / rii;
        let lo = (center - half_width - offset[level]).ceil() as i64;
        let hi = (center + half_width - offset[level]).floor() as i64;
        for ki in lo..=hi {
            k[level] = ki;
            u[level] = ki as f64 + offset[level];
            let partial = (rii * u[level] + t).powi(2);
            let next = rem - partial;
            if next < 0.0 {
                continue;
            }
            if level == 0 {
                if quad_form(y, u) <= r2 {
                    visit(k, u);
                }
            } else {
                walk(level - 1, next, r, y, offset, r2, k, u, visit);
            }
        }
    }

    walk(g - 1, slack, r, omega.im(), offset, r2, &mut k, &mut u, &mut visit);
}

/// Scale-normalized lattice sum at a reduced point `z0`:
/// `exp(-s0) * sum_v exp(pi i v^T Omega v + 2 pi i v^T (z0 + b))` over
/// `v in Z^g + a0` inside the ellipsoid, with `s0 = pi y0^T Y^{-1} y0`.
fn normalized_sum(omega: &SiegelMatrix, a0: &[Rational64], b: &[Rational64], z0: &[Complex64], radius: f64) -> Complex64 {
    let g = omega.genus();
    let y0: Vec<f64> = z0.iter().map(|c| c.im).collect();
    let x0: Vec<f64> = z0.iter().map(|c| c.re).collect();
    let c: Vec<f64> = (0..g)
        .map(|i| (0..g).map(|j| omega.im_inv()[(i, j)] * y0[j]).sum())
        .collect();
    let a0f: Vec<f64> = a0.iter().map(rational_to_f64).collect();
    let offset: Vec<f64> = a0f.iter().zip(&c).map(|(a, ci)| a + ci).collect();

    // v^T b = k^T b + a0^T b, assembled exactly mod 1
    let kb = RationalPhase::new(b);
    let ab = dot_frac(a0, b);
    let (ab_num, ab_den) = (*ab.numer() as i128, *ab.denom() as i128);

    let x = omega.re();
    let y = omega.im();
    let mut v = vec![0.0; g];
    let mut u = vec![0.0; g];
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_in_ellipsoid(omega, &offset, radius, |k, _| {
        for i in 0..g {
            v[i] = k[i] as f64 + a0f[i];
            u[i] = v[i] + c[i];
        }
        let (kn, kd) = kb.eval(k);
        let den = kd * ab_den;
        let num = (kn * ab_den + ab_num * kd).rem_euclid(den);
        let bphase = num as f64 / den as f64;
        let xphase: f64 = v.iter().zip(&x0).map(|(vi, xi)| vi * xi).sum();
        let phase = PI * quad_form(x, &v) + 2.0 * PI * (xphase + bphase);
        let modulus = (-PI * quad_form(y, &u)).exp();
        acc += Complex64::from_polar(modulus, phase);
    });
    acc
}

fn check_dims(ch: &ThetaCharacteristic, z: &[Complex64], omega: &SiegelMatrix) -> Result<()> {
    let g = omega.genus();
    for found in [ch.genus(), z.len()] {
        if found != g {
            return Err(Error::DimensionMismatch { expected: g, found });
        }
    }
    Ok(())
}

/// `theta[a;b](z, Omega)` with truncation error at most `tol * exp(scale)`.
pub fn eval_theta(ch: &ThetaCharacteristic, z: &[Complex64], omega: &SiegelMatrix, tol: f64) -> Result<ThetaValue> {
    check_tol(tol)?;
    let radius = radius_for(omega.min_eigenvalue(), omega.genus(), tol);
    eval_theta_with_radius(ch, z, omega, radius)
}

/// As [`eval_theta`] but summing over a caller-chosen radius.
pub fn eval_theta_with_radius(ch: &ThetaCharacteristic, z: &[Complex64], omega: &SiegelMatrix, radius: f64) -> Result<ThetaValue> {
    check_dims(ch, z, omega)?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius {radius} must be positive and finite")));
    }
    check_point_budget(omega, radius)?;
    let g = omega.genus();
    let (z0, m, n) = reduce(z, omega);

    // theta[a;b](z0 + Omega m + n) = exp(2 pi i (a.n - b.m)) * exp(log_cocycle) * theta[a;b](z0)
    let a0: Vec<Rational64> = ch.top.iter().map(|x| centered(*x).0).collect();
    let mut char_phase = Rational64::from_integer(0);
    for i in 0..g {
        char_phase += a0[i] * n[i] - ch.bottom[i] * m[i];
    }
    let char_phase = rational_to_f64(&frac(char_phase));
    let log_c = log_cocycle(omega, &m, &z0) + Complex64::new(0.0, 2.0 * PI * char_phase);

    let s0 = omega.scale_of(&z0);
    let sum = normalized_sum(omega, &a0, &ch.bottom, &z0, radius);
    let scale = omega.scale_of(z);
    let value = sum * (log_c + s0).exp();
    let normalized = sum * (log_c + s0 - scale).exp();
    let error_bound = tail_bound(omega.min_eigenvalue(), g, radius) * scale.exp();
    Ok(ThetaValue {
        value,
        error_bound,
        scale,
        normalized,
        radius,
    })
}

/// Riemann theta (zero characteristic) at the point `Omega p + q + extra`.
///
/// The rational part is moved into the characteristic,
/// `theta(Omega p + q + e) = exp(-pi i p^T Omega p - 2 pi i p^T (e + q)) theta[p;q](e)`,
/// so torsion coordinates never pass through floating point before the
/// phases are assembled.
pub fn eval_at_point(omega: &SiegelMatrix, p: &[Rational64], q: &[Rational64], extra: &[Complex64], tol: f64) -> Result<ThetaValue> {
    let g = omega.genus();
    let ch = ThetaCharacteristic::new(p.to_vec(), q.to_vec())?;
    let inner = eval_theta(&ch, extra, omega, tol)?;

    let pf: Vec<f64> = p.iter().map(rational_to_f64).collect();
    let mut pop = Complex64::new(0.0, 0.0);
    for i in 0..g {
        for j in 0..g {
            pop += omega.omega()[(i, j)] * (pf[i] * pf[j]);
        }
    }
    let pe: Complex64 = pf.iter().zip(extra).map(|(a, e)| e * a).sum();
    let pq = rational_to_f64(&dot_frac(p, q));
    let i = Complex64::i();
    let prefactor = -i * PI * pop - i * 2.0 * PI * (pe + pq);

    let z = omega.embed(&pf, &vec![0.0; g]);
    let z: Vec<Complex64> = z.iter().zip(extra).map(|(a, e)| a + e).collect();
    let scale = omega.scale_of(&z);
    let normalized_tail = inner.error_bound * (-inner.scale).exp();
    Ok(ThetaValue {
        value: inner.value * prefactor.exp(),
        error_bound: normalized_tail * scale.exp(),
        scale,
        normalized: inner.normalized * (prefactor + inner.scale - scale).exp(),
        radius: inner.radius,
    })
}
