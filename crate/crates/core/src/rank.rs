//! Numerical rank with a mandatory gap check.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDecision {
    /// Descending.
    pub singular_values: Vec<f64>,
    /// Absolute cut: `rel_threshold * sigma_max`.
    pub threshold: f64,
    pub rank: usize,
    pub min_accepted: Option<f64>,
    pub max_rejected: Option<f64>,
}

/// Scales every nonzero row to unit Euclidean norm.
pub fn normalize_rows(m: &mut DMatrix<Complex64>) {
    for mut row in m.row_iter_mut() {
        let norm = row.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|c| *c /= norm);
        }
    }
}

/// Number of singular values at or above `rel_threshold * sigma_max`.
///
/// Fails with [`Error::AmbiguousGap`] if any singular value lies within a
/// factor `gap_factor` of the cut, so a borderline spectrum never turns
/// silently into an integer.
pub fn numerical_rank(m: &DMatrix<Complex64>, rel_threshold: f64, gap_factor: f64) -> Result<RankDecision> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) || !(gap_factor >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rank threshold {rel_threshold} must lie in (0, 1) and gap factor {gap_factor} be >= 1"
        )));
    }
    if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Degenerate("matrix has non-finite entries".into()));
    }
    let mut singular_values: Vec<f64> = if m.is_empty() {
        Vec::new()
    } else {
        m.clone()
            .try_svd(false, false, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Degenerate("singular value decomposition did not converge".into()))?
            .singular_values
            .iter()
            .copied()
            .collect()
    };
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    if !(sigma_max > 0.0) {
        return Ok(RankDecision {
            singular_values,
            threshold: 0.0,
            rank: 0,
            min_accepted: None,
            max_rejected: None,
        });
    }
    let threshold = rel_threshold * sigma_max;
    if let Some(&sigma) = singular_values
        .iter()
        .find(|&&s| s >= threshold / gap_factor && s < threshold * gap_factor)
    {
        return Err(Error::AmbiguousGap {
            sigma,
            threshold,
            factor: gap_factor,
        });
    }
    let rank = singular_values.iter().filter(|&&s| s >= threshold).count();
    Ok(RankDecision {
        threshold,
        rank,
        min_accepted: singular_values[..rank].last().copied(),
        max_rejected: singular_values.get(rank).copied(),
        singular_values,
    })
}
