use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use crate::chow::{ch_w, ChowClass};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::ppav::AbelianPoint;
use crate::theta::{eval_theta, SiegelMatrix, ThetaCharacteristic, ThetaValue};

/// Explicit basis of a space of theta functions of level `degree` on a cover
/// `C^g / (Z^g + Omega_c Z^g)`:
///
/// ```text
/// f_sigma(z) = theta[sigma/d; 0](d (z + x) - t, d Omega_c),   sigma in {0..d-1}^g.
/// ```
///
/// Each `f_sigma` is 1-periodic in every coordinate and picks up
/// `exp(-pi i d k^T Omega_c k - 2 pi i k^T w)` under `z -> z + Omega_c k`,
/// where `w = d (z + x) - t`.
#[derive(Debug, Clone)]
pub struct SectionBasis {
    degree: u32,
    lattice: SiegelMatrix,
    scaled: SiegelMatrix,
    shift: Vec<Complex64>,
    twist: Vec<Complex64>,
    characteristics: Vec<ThetaCharacteristic>,
    tag: String,
    tol: f64,
}

impl SectionBasis {
    fn build(degree: u32, lattice: SiegelMatrix, shift: Vec<Complex64>, twist: Vec<Complex64>, tag: String, config: &Config) -> Result<Self> {
        let g = lattice.genus();
        let count = (degree as u128).pow(g as u32);
        if count > config.basis_cap as u128 {
            return Err(Error::InstanceTooLarge {
                size: count,
                cap: config.basis_cap,
            });
        }
        let d = degree as i64;
        let mut characteristics = Vec::with_capacity(count as usize);
        let mut sigma = vec![0i64; g];
        for _ in 0..count {
            let top = sigma.iter().map(|&s| Rational64::new(s, d)).collect();
            characteristics.push(ThetaCharacteristic::new(top, vec![Rational64::zero(); g])?);
            for s in sigma.iter_mut().rev() {
                *s += 1;
                if *s < d {
                    break;
                }
                *s = 0;
            }
        }
        let scaled = lattice.scaled(degree as f64)?;
        Ok(SectionBasis {
            degree,
            lattice,
            scaled,
            shift,
            twist,
            characteristics,
            tag,
            tol: config.eval_tol,
        })
    }

    pub fn count(&self) -> usize {
        self.characteristics.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Period matrix of the cover on which the sections are quasi-periodic.
    pub fn lattice(&self) -> &SiegelMatrix {
        &self.lattice
    }

    pub fn bundle_tag(&self) -> &str {
        &self.tag
    }

    pub fn twist(&self) -> &[Complex64] {
        &self.twist
    }

    fn argument(&self, z: &[Complex64]) -> Vec<Complex64> {
        let d = self.degree as f64;
        z.iter()
            .zip(&self.shift)
            .zip(&self.twist)
            .map(|((zi, xi), ti)| (zi + xi) * d - ti)
            .collect()
    }

    pub fn evaluate(&self, i: usize, z: &[Complex64]) -> Result<ThetaValue> {
        let ch = self
            .characteristics
            .get(i)
            .ok_or_else(|| Error::InvalidArgument(format!("basis index {i} out of range {}", self.count())))?;
        eval_theta(ch, &self.argument(z), &self.scaled, self.tol)
    }

    /// Scale-normalized values of every basis section at `z`. The
    /// normalization is common to all sections at a given point.
    pub fn evaluate_all(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let w = self.argument(z);
        self.characteristics
            .iter()
            .map(|ch| Ok(eval_theta(ch, &w, &self.scaled, self.tol)?.normalized))
            .collect()
    }

    /// Factor `e` with `f(z + Omega_c k + m) = e * f(z)` for integer `k`, `m`.
    pub fn automorphy_factor(&self, k: &[i64], z: &[Complex64]) -> Complex64 {
        let g = self.lattice.genus();
        let w = self.argument(z);
        let omega = self.scaled.omega();
        let mut kok = Complex64::zero();
        for i in 0..g {
            for j in 0..g {
                kok += omega[(i, j)] * (k[i] * k[j]) as f64;
            }
        }
        let kw: Complex64 = k.iter().zip(&w).map(|(&ki, wi)| wi * ki as f64).sum();
        (-Complex64::i() * PI * kok - Complex64::i() * 2.0 * PI * kw).exp()
    }
}

fn check_count(basis: &SectionBasis, class: &ChowClass) -> Result<()> {
    let chi = class.euler_char();
    if chi != num_rational::BigRational::from_integer((basis.count() as i64).into()) {
        return Err(Error::IdentityFailed(format!(
            "{} has {} sections but Euler characteristic {chi}",
            basis.tag,
            basis.count()
        )));
    }
    Ok(())
}

/// Sections of `t_x^* O(n Theta)`: the `n^g` functions
/// `theta[sigma/n; 0](n (z + x), n Omega)`.
pub fn line_bundle_basis(n: u32, x: &AbelianPoint, omega: &SiegelMatrix, config: &Config) -> Result<SectionBasis> {
    let g = omega.genus();
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    if x.genus() != g {
        return Err(Error::DimensionMismatch {
            expected: g,
            found: x.genus(),
        });
    }
    let basis = SectionBasis::build(
        n,
        omega.clone(),
        x.embed(omega),
        vec![Complex64::zero(); g],
        format!("H0(t_x^* O({n} Theta))"),
        config,
    )?;
    check_count(&basis, &ChowClass::line_bundle(n as i64, g))?;
    Ok(basis)
}

/// Sections of `t_x^* W_{a,degree}` on an elliptic curve `C/(Z + tau Z)`,
/// realized as sections of a degree-`degree` line bundle on the cover
/// `C/(Z + a tau Z)` and pushed forward.
///
/// `twist` moves the line bundle on the cover: `w = degree (z + x) - twist`.
/// With `twist = 0` the bundle is `O(degree * o)` for `o` the odd half-period
/// of the cover.
pub fn pushforward_basis(a: u32, degree: u32, x: &AbelianPoint, tau: Complex64, twist: Complex64, config: &Config) -> Result<SectionBasis> {
    if a == 0 || degree == 0 {
        return Err(Error::InvalidArgument("rank and degree must be positive".into()));
    }
    if a.gcd(&degree) != 1 {
        return Err(Error::NotCoprime {
            a: a as u64,
            b: degree as u64,
        });
    }
    if x.genus() != 1 {
        return Err(Error::Unsupported("pushforward bases are implemented for elliptic curves only".into()));
    }
    let base = SiegelMatrix::diagonal(&[tau])?;
    let cover = SiegelMatrix::diagonal(&[tau * a as f64])?;
    let basis = SectionBasis::build(
        degree,
        cover,
        x.embed(&base),
        vec![twist],
        format!("H0(t_x^* W_{{{a},{degree}}}) via degree-{a} cover"),
        config,
    )?;
    check_count(&basis, &ch_w(a as u64, degree as u64, 1)?)?;
    Ok(basis)
}
