use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ser::rational_vec;

/// Rational characteristic `[a; b]` of `theta[a;b](z, Omega)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThetaCharacteristic {
    #[serde(with = "rational_vec")]
    pub top: Vec<Rational64>,
    #[serde(with = "rational_vec")]
    pub bottom: Vec<Rational64>,
}

impl ThetaCharacteristic {
    pub fn new(top: Vec<Rational64>, bottom: Vec<Rational64>) -> Result<Self> {
        if top.len() != bottom.len() {
            return Err(Error::DimensionMismatch {
                expected: top.len(),
                found: bottom.len(),
            });
        }
        Ok(ThetaCharacteristic { top, bottom })
    }

    pub fn zero(g: usize) -> Self {
        ThetaCharacteristic {
            top: vec![Rational64::zero(); g],
            bottom: vec![Rational64::zero(); g],
        }
    }

    /// Half-integer characteristic from bit vectors: `top_i = t_i / 2`,
    /// `bottom_i = b_i / 2`.
    pub fn half(top: &[u8], bottom: &[u8]) -> Result<Self> {
        let h = |v: &[u8]| v.iter().map(|&x| Rational64::new(x as i64, 2)).collect();
        Self::new(h(top), h(bottom))
    }

    pub fn genus(&self) -> usize {
        self.top.len()
    }

    /// Parity of a half-integer characteristic: `Some(true)` when `4 a.b` is
    /// odd. `None` if the characteristic is not half-integral.
    pub fn is_odd(&self) -> Option<bool> {
        let two = Rational64::from_integer(2);
        if self
            .top
            .iter()
            .chain(&self.bottom)
            .any(|x| !(x * two).is_integer())
        {
            return None;
        }
        let four_ab: Rational64 = self
            .top
            .iter()
            .zip(&self.bottom)
            .map(|(a, b)| a * b * Rational64::from_integer(4))
            .sum();
        Some(four_ab.to_integer().is_odd())
    }
}

/// `x mod 1` in `[0, 1)`.
pub(crate) fn frac(x: Rational64) -> Rational64 {
    x - x.floor()
}

/// Representative of `x mod 1` in `[-1/2, 1/2)` together with the integer
/// removed, so `x = reduced + shift`.
pub(crate) fn centered(x: Rational64) -> (Rational64, i64) {
    let half = Rational64::new(1, 2);
    let shift = (x + half).floor();
    (x - shift, shift.to_integer())
}

/// Exact evaluation of `k . b mod 1` for integer vectors `k`, with `b` a fixed
/// rational vector. Everything is brought to the common denominator of `b`
/// once, so each evaluation is integer arithmetic plus one division.
#[derive(Debug, Clone)]
pub(crate) struct RationalPhase {
    numerators: Vec<i128>,
    denominator: i128,
}

impl RationalPhase {
    pub(crate) fn new(b: &[Rational64]) -> Self {
        let denominator = b
            .iter()
            .fold(1_i64, |acc, x| acc.lcm(x.denom())) as i128;
        let numerators = b
            .iter()
            .map(|x| {
                let f = frac(*x);
                *f.numer() as i128 * (denominator / *f.denom() as i128)
            })
            .collect();
        RationalPhase {
            numerators,
            denominator,
        }
    }

    /// `k . b mod 1` as a fraction in `[0, 1)`, returned as (numerator, denominator).
    pub(crate) fn eval(&self, k: &[i64]) -> (i128, i128) {
        let mut acc: i128 = 0;
        for (ki, ni) in k.iter().zip(&self.numerators) {
            acc = (acc + (*ki as i128) * ni).rem_euclid(self.denominator);
        }
        (acc, self.denominator)
    }
}

/// Exact `a . b mod 1` for rational vectors.
pub(crate) fn dot_frac(a: &[Rational64], b: &[Rational64]) -> Rational64 {
    frac(a.iter().zip(b).fold(Rational64::zero(), |acc, (x, y)| acc + x * y))
}

pub(crate) fn rational_to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_of_half_characteristics() {
        let odd = ThetaCharacteristic::half(&[1], &[1]).unwrap();
        assert_eq!(odd.is_odd(), Some(true));
        let even = ThetaCharacteristic::half(&[1, 1], &[1, 1]).unwrap();
        assert_eq!(even.is_odd(), Some(false));
        let third = ThetaCharacteristic::new(vec![Rational64::new(1, 3)], vec![Rational64::zero()]).unwrap();
        assert_eq!(third.is_odd(), None);
        // genus 2 has exactly six odd characteristics
        let mut odd_count = 0;
        for bits in 0..16u8 {
            let t = [bits & 1, (bits >> 1) & 1];
            let b = [(bits >> 2) & 1, (bits >> 3) & 1];
            if ThetaCharacteristic::half(&t, &b).unwrap().is_odd() == Some(true) {
                odd_count += 1;
            }
        }
        assert_eq!(odd_count, 6);
    }

    #[test]
    fn centered_reduction() {
        assert_eq!(centered(Rational64::new(1, 2)), (Rational64::new(-1, 2), 1));
        assert_eq!(centered(Rational64::new(-1, 2)), (Rational64::new(-1, 2), 0));
        assert_eq!(centered(Rational64::new(7, 3)), (Rational64::new(1, 3), 2));
        assert_eq!(centered(Rational64::new(-5, 3)), (Rational64::new(1, 3), -2));
    }

    #[test]
    fn rational_phase_is_exact() {
        let b = vec![Rational64::new(1, 3), Rational64::new(-1, 2)];
        let ph = RationalPhase::new(&b);
        for k0 in -7..7_i64 {
            for k1 in -7..7_i64 {
                let expect = frac(Rational64::from_integer(k0) * b[0] + Rational64::from_integer(k1) * b[1]);
                let (n, d) = ph.eval(&[k0, k1]);
                assert_eq!(Rational64::new(n as i64, d as i64), expect);
            }
        }
    }
}
