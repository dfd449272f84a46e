//! Single configuration record for every numeric tolerance, seed and cap.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Absolute truncation tolerance on the scale-normalized lattice sum.
    pub eval_tol: f64,
    /// A point is on the divisor when its normalized magnitude is below
    /// `rel_tol` times the reference magnitude.
    pub rel_tol: f64,
    /// Margins within this factor of `rel_tol` are reported as indeterminate.
    pub margin_factor: f64,
    /// Number of pseudo-random fundamental-domain points used for the
    /// reference magnitude.
    pub reference_samples: usize,
    pub reference_seed: u64,
    /// Largest torsion enumeration (`n^{2g}`) we accept.
    pub enumeration_cap: u64,
    /// Largest section basis (`n^g`) we accept.
    pub basis_cap: u64,
    /// Relative singular-value threshold for numerical rank.
    pub rank_threshold: f64,
    /// Required separation factor between accepted/rejected singular values
    /// and the threshold.
    pub gap_factor: f64,
    /// Sample points per target dimension in the evaluation matrix.
    pub sample_factor: usize,
    pub sample_seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            eval_tol: 1e-13,
            rel_tol: 1e-6,
            margin_factor: 10.0,
            reference_samples: 64,
            reference_seed: 0x5eed_7e7a,
            enumeration_cap: 100_000,
            basis_cap: 4_096,
            rank_threshold: 1e-7,
            gap_factor: 10.0,
            sample_factor: 8,
            sample_seed: 0x00c0_ffee,
        }
    }
}

impl Config {
    /// Rejects tolerances and sample counts that cannot produce a meaningful
    /// decision.
    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            ("eval_tol", self.eval_tol),
            ("rel_tol", self.rel_tol),
            ("rank_threshold", self.rank_threshold),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(crate::Error::InvalidArgument(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        for (name, v) in [("margin_factor", self.margin_factor), ("gap_factor", self.gap_factor)] {
            if !(v.is_finite() && v >= 1.0) {
                return Err(crate::Error::InvalidArgument(format!("{name} must be at least 1, got {v}")));
            }
        }
        if self.reference_samples == 0 || self.sample_factor == 0 {
            return Err(crate::Error::InvalidArgument("sample counts must be positive".into()));
        }
        if self.enumeration_cap == 0 || self.basis_cap == 0 {
            return Err(crate::Error::InvalidArgument("caps must be positive".into()));
        }
        Ok(())
    }
}
