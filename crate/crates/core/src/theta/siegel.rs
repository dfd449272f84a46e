use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ser::ComplexJson;

/// Smallest eigenvalue of `Im(Omega)` we are willing to work with.
pub const MIN_EIGENVALUE: f64 = 1e-8;

/// A point of the Siegel upper half-space: symmetric `g x g` complex matrix
/// with positive-definite imaginary part.
///
/// Derived data (`Y^{-1}`, the Cholesky factor of `Y`, its smallest
/// eigenvalue) is computed once at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SiegelJson", into = "SiegelJson")]
pub struct SiegelMatrix {
    omega: DMatrix<Complex64>,
    re: DMatrix<f64>,
    im: DMatrix<f64>,
    im_inv: DMatrix<f64>,
    /// Upper-triangular `R` with `Y = R^T R`.
    im_chol_upper: DMatrix<f64>,
    min_eigenvalue: f64,
}

impl SiegelMatrix {
    pub fn new(omega: DMatrix<Complex64>) -> Result<Self> {
        let g = omega.nrows();
        if g == 0 {
            return Err(Error::InvalidArgument("genus must be positive".into()));
        }
        if omega.ncols() != g {
            return Err(Error::DimensionMismatch {
                expected: g,
                found: omega.ncols(),
            });
        }
        if omega.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("period matrix has non-finite entries".into()));
        }
        let magnitude = omega.iter().map(|c| c.norm()).fold(1.0_f64, f64::max);
        let mut sym = omega.clone();
        for i in 0..g {
            for j in (i + 1)..g {
                let deviation = (omega[(i, j)] - omega[(j, i)]).norm();
                if deviation > 1e-12 * magnitude {
                    return Err(Error::NotSymmetric { i, j, deviation });
                }
                let avg = (omega[(i, j)] + omega[(j, i)]) * 0.5;
                sym[(i, j)] = avg;
                sym[(j, i)] = avg;
            }
        }
        let re = sym.map(|c| c.re);
        let im = sym.map(|c| c.im);
        let min_eigenvalue = SymmetricEigen::new(im.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if !(min_eigenvalue > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        if min_eigenvalue < MIN_EIGENVALUE {
            return Err(Error::IllConditioned(format!(
                "smallest eigenvalue of Im(omega) is {min_eigenvalue:e} < {MIN_EIGENVALUE:e}"
            )));
        }
        let chol = Cholesky::new(im.clone())
            .ok_or(Error::NotPositiveDefinite { min_eigenvalue })?;
        let im_chol_upper = chol.l().transpose();
        let im_inv = chol.inverse();
        Ok(SiegelMatrix {
            omega: sym,
            re,
            im,
            im_inv,
            im_chol_upper,
            min_eigenvalue,
        })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let g = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != g) {
            return Err(Error::DimensionMismatch {
                expected: g,
                found: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(g, g, |i, j| rows[i][j]))
    }

    /// `diag(taus)`: the period matrix of a product of elliptic curves.
    pub fn diagonal(taus: &[Complex64]) -> Result<Self> {
        if let Some(t) = taus.iter().find(|t| !(t.im > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "elliptic period {t} must have positive imaginary part"
            )));
        }
        let g = taus.len();
        Self::new(DMatrix::from_fn(g, g, |i, j| {
            if i == j {
                taus[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn genus(&self) -> usize {
        self.omega.nrows()
    }

    pub fn omega(&self) -> &DMatrix<Complex64> {
        &self.omega
    }

    pub fn re(&self) -> &DMatrix<f64> {
        &self.re
    }

    pub fn im(&self) -> &DMatrix<f64> {
        &self.im
    }

    pub fn im_inv(&self) -> &DMatrix<f64> {
        &self.im_inv
    }

    pub fn im_chol_upper(&self) -> &DMatrix<f64> {
        &self.im_chol_upper
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.omega.map(|c| c * k))
    }

    /// `Omega * u + w` for real vectors `u`, `w`.
    pub fn embed(&self, u: &[f64], w: &[f64]) -> Vec<Complex64> {
        let g = self.genus();
        (0..g)
            .map(|i| {
                let mut acc = Complex64::new(w[i], 0.0);
                for (j, uj) in u.iter().enumerate() {
                    acc += self.omega[(i, j)] * uj;
                }
                acc
            })
            .collect()
    }

    /// The invariant normalization exponent `pi * y^T Y^{-1} y` for `y = Im z`.
    pub fn scale_of(&self, z: &[Complex64]) -> f64 {
        let y: Vec<f64> = z.iter().map(|c| c.im).collect();
        std::f64::consts::PI * quad_form(&self.im_inv, &y)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("siegel matrix serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `u^T M u`, evaluated term by term so that `u` and `-u` give bit-identical
/// results.
pub(crate) fn quad_form(m: &DMatrix<f64>, u: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..u.len() {
        for j in 0..u.len() {
            acc += u[i] * m[(i, j)] * u[j];
        }
    }
    acc
}

#[derive(Serialize, Deserialize)]
struct SiegelJson {
    g: usize,
    omega: Vec<Vec<ComplexJson>>,
}

impl TryFrom<SiegelJson> for SiegelMatrix {
    type Error = Error;

    fn try_from(j: SiegelJson) -> Result<Self> {
        if j.omega.len() != j.g {
            return Err(Error::DimensionMismatch {
                expected: j.g,
                found: j.omega.len(),
            });
        }
        let rows: Vec<Vec<Complex64>> = j
            .omega
            .into_iter()
            .map(|r| r.into_iter().map(Complex64::from).collect())
            .collect();
        SiegelMatrix::from_rows(&rows)
    }
}

impl From<SiegelMatrix> for SiegelJson {
    fn from(s: SiegelMatrix) -> Self {
        let g = s.genus();
        SiegelJson {
            g,
            omega: (0..g)
                .map(|i| (0..g).map(|j| s.omega[(i, j)].into()).collect())
                .collect(),
        }
    }
}
