//! Riemann theta functions with rational characteristics.

mod characteristic;
mod eval;
mod siegel;
mod vanishing;

pub use characteristic::ThetaCharacteristic;
pub(crate) use characteristic::rational_to_f64;
pub use eval::{
    eval_at_point, eval_theta, eval_theta_with_radius, reduce_point, tail_bound, truncation_radius, ReducedPoint,
    ThetaValue,
};
pub use siegel::{SiegelMatrix, MIN_EIGENVALUE};
pub use vanishing::{is_on_theta, reference_magnitude, Membership, ThetaDivisor, Verdict};
