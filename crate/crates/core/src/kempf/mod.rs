//! Multiplication maps `H0(t_x^* W_{a,n}) (x) H0(t_y^* W_{b,n}) -> H0(tensor)`,
//! `n = a + b`, built from explicit theta bases, with numerical coranks
//! checked against independent torsion counts.
//!
//! Supported regimes: elliptic curves with any coprime `(a, b)`, where the
//! rank-`a` bundle is the pushforward of a line bundle along the isogeny
//! `C/(Z + a tau Z) -> C/(Z + tau Z)` and products are sampled on
//! `C/(Z + ab tau Z)`; and abelian surfaces with `a = b = 1`.

mod basis;
mod corank;

pub use basis::{line_bundle_basis, pushforward_basis, SectionBasis};
pub use corank::{
    calibrate_twist, corank, corank_sampled, multiplication_matrix, multiplication_matrix_with_twists, resolve_twists,
    run_batch, singular_locus_scan, twist_candidates, CorankReport, CorankSummary, KempfJob, ScanPoint,
};
