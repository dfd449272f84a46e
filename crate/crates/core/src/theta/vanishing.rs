//! Membership of points in the theta divisor.
//!
//! Raw `|theta|` grows without bound along the lattice, so all comparisons use
//! the normalized magnitude `|theta(z)| exp(-pi y^T Y^{-1} y)`, which is
//! lattice-invariant. A point is on the divisor when this is below
//! `rel_tol * M`, where `M` is the median normalized magnitude over a fixed
//! seeded sample of the fundamental domain.

use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::characteristic::ThetaCharacteristic;
use super::eval::{eval_at_point, eval_theta};
use super::siegel::SiegelMatrix;
use crate::config::Config;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    On,
    Off,
}

/// Outcome of one vanishing test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Normalized magnitude divided by the reference `M`.
    pub margin: f64,
    pub membership: Membership,
    /// The margin is within `margin_factor` of `rel_tol`.
    pub indeterminate: bool,
}

impl Verdict {
    pub fn is_on(&self) -> bool {
        self.membership == Membership::On
    }
}

/// The divisor of the zero-characteristic theta function for a fixed period
/// matrix, together with its magnitude reference.
#[derive(Debug, Clone)]
pub struct ThetaDivisor {
    omega: SiegelMatrix,
    reference: f64,
    eval_tol: f64,
    rel_tol: f64,
    margin_factor: f64,
}

/// Median normalized `|theta|` over `samples` seeded points `Omega u + w`,
/// `u, w` uniform in `[0, 1)^g`.
pub fn reference_magnitude(omega: &SiegelMatrix, samples: usize, seed: u64, tol: f64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidArgument("reference needs at least one sample".into()));
    }
    let g = omega.genus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = ThetaCharacteristic::zero(g);
    let mut mags = Vec::with_capacity(samples);
    for _ in 0..samples {
        let u: Vec<f64> = (0..g).map(|_| rng.random()).collect();
        let w: Vec<f64> = (0..g).map(|_| rng.random()).collect();
        let z = omega.embed(&u, &w);
        mags.push(eval_theta(&zero, &z, omega, tol)?.normalized_abs());
    }
    mags.sort_by(f64::total_cmp);
    let mid = samples / 2;
    Ok(if samples % 2 == 1 {
        mags[mid]
    } else {
        0.5 * (mags[mid - 1] + mags[mid])
    })
}

impl ThetaDivisor {
    pub fn new(omega: SiegelMatrix, config: &Config) -> Result<Self> {
        if !(config.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("rel_tol {} must be positive", config.rel_tol)));
        }
        let reference = reference_magnitude(&omega, config.reference_samples, config.reference_seed, config.eval_tol)?;
        if !(reference > 0.0) || !reference.is_finite() {
            return Err(Error::Degenerate(format!("reference magnitude {reference}")));
        }
        Ok(ThetaDivisor {
            omega,
            reference,
            eval_tol: config.eval_tol,
            rel_tol: config.rel_tol,
            margin_factor: config.margin_factor,
        })
    }

    pub fn omega(&self) -> &SiegelMatrix {
        &self.omega
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn classify(&self, margin: f64) -> Verdict {
        let membership = if margin < self.rel_tol { Membership::On } else { Membership::Off };
        let indeterminate =
            margin >= self.rel_tol / self.margin_factor && margin < self.rel_tol * self.margin_factor;
        Verdict {
            margin,
            membership,
            indeterminate,
        }
    }

    /// Test at an arbitrary complex point.
    pub fn test(&self, z: &[Complex64]) -> Result<Verdict> {
        let v = eval_theta(&ThetaCharacteristic::zero(self.omega.genus()), z, &self.omega, self.eval_tol)?;
        Ok(self.classify(v.normalized_abs() / self.reference))
    }

    /// Test at `Omega p + q + extra` with exact `p`, `q`.
    pub fn test_point(&self, p: &[Rational64], q: &[Rational64], extra: &[Complex64]) -> Result<Verdict> {
        let v = eval_at_point(&self.omega, p, q, extra, self.eval_tol)?;
        Ok(self.classify(v.normalized_abs() / self.reference))
    }
}

/// One-shot membership test with default sampling parameters.
pub fn is_on_theta(z: &[Complex64], omega: &SiegelMatrix, rel_tol: f64) -> Result<bool> {
    let config = Config {
        rel_tol,
        ..Config::default()
    };
    Ok(ThetaDivisor::new(omega.clone(), &config)?.test(z)?.is_on())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn odd_half_period_is_on_theta() {
        for tau in [c(0.0, 1.0), c(0.5, 1.5), c(-0.2, 0.7)] {
            let omega = SiegelMatrix::diagonal(&[tau]).unwrap();
            assert!(is_on_theta(&[(tau + 1.0) * 0.5], &omega, 1e-6).unwrap());
            assert!(!is_on_theta(&[c(0.0, 0.0)], &omega, 1e-6).unwrap());
        }
    }

    #[test]
    fn product_with_vanishing_factor() {
        let (t1, t2) = (c(0.1, 1.1), c(-0.3, 0.9));
        let omega = SiegelMatrix::diagonal(&[t1, t2]).unwrap();
        assert!(is_on_theta(&[(t1 + 1.0) * 0.5, c(0.0, 0.0)], &omega, 1e-6).unwrap());
        assert!(!is_on_theta(&[c(0.2, 0.1), c(0.0, 0.3)], &omega, 1e-6).unwrap());
    }

    #[test]
    fn indeterminate_band() {
        let omega = SiegelMatrix::diagonal(&[c(0.0, 1.0)]).unwrap();
        let div = ThetaDivisor::new(omega, &Config::default()).unwrap();
        assert!(div.classify(5e-6).indeterminate);
        assert!(div.classify(2e-7).indeterminate);
        assert!(!div.classify(5e-8).indeterminate);
        assert!(!div.classify(1e-3).indeterminate);
        assert!(div.classify(5e-7).is_on());
    }

    #[test]
    fn reference_is_deterministic() {
        let omega = SiegelMatrix::diagonal(&[c(0.2, 0.8), c(0.0, 1.4)]).unwrap();
        let a = reference_magnitude(&omega, 64, 11, 1e-13).unwrap();
        let b = reference_magnitude(&omega, 64, 11, 1e-13).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(a > 0.1 && a < 10.0);
    }
}
