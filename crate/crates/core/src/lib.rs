//! Torsion points on theta divisors of principally polarized abelian
//! varieties.
//!
//! * [`theta`]: Riemann theta functions with certified truncation and the
//!   vanishing test.
//! * [`ppav`]: torsion enumeration and counts on translated divisors.
//! * [`kempf`]: numerical coranks of multiplication maps of theta sections.
//! * [`chow`]: exact calculus on semihomogeneous Chern characters.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Symmetric matrix fills read better with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod chow;
pub mod config;
pub mod error;
pub mod kempf;
pub mod ppav;
pub mod rank;
pub mod ser;
pub mod theta;

pub use config::Config;
pub use error::{Error, Result};
