//! Exact dyadic rationals `m * 2^(-e)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A dyadic rational `mantissa * 2^(-exponent)` kept in lowest terms
/// (odd mantissa, or zero with exponent 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(i128, i32)", into = "(i128, i32)")]
pub struct Dyadic {
    mantissa: i128,
    exponent: i32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { mantissa: 0, exponent: 0 };
    pub const ONE: Dyadic = Dyadic { mantissa: 1, exponent: 0 };

    pub fn new(mantissa: i128, exponent: i32) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    /// `2^(-e)`.
    pub fn pow2_neg(e: i32) -> Self {
        Dyadic { mantissa: 1, exponent: e }
    }

    pub fn from_int(n: i128) -> Self {
        Dyadic::new(n, 0)
    }

    fn normalize(&mut self) {
        if self.mantissa == 0 {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros() as i32;
        self.mantissa >>= tz;
        self.exponent -= tz;
    }

    pub fn mantissa(&self) -> i128 {
        self.mantissa
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn abs(self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    pub fn to_f64(self) -> f64 {
        self.mantissa as f64 * (2f64).powi(-self.exponent)
    }

    /// Both operands rewritten over the common exponent `max(e1, e2)`.
    fn aligned(self, other: Dyadic) -> (i128, i128, i32) {
        let e = self.exponent.max(other.exponent);
        let shift = |d: Dyadic| -> i128 {
            let s = (e - d.exponent) as u32;
            assert!(
                s < 127 && d.mantissa.unsigned_abs().leading_zeros() > s,
                "dyadic overflow"
            );
            d.mantissa << s
        };
        (shift(self), shift(other), e)
    }

    /// Multiply by `2^k`.
    pub fn scale_pow2(self, k: i32) -> Self {
        Dyadic::new(self.mantissa, self.exponent - k)
    }

    /// Exact quotient; defined only when the divisor is `±2^k`.
    pub fn checked_div(self, rhs: Dyadic) -> Option<Dyadic> {
        match rhs.mantissa {
            1 => Some(Dyadic::new(self.mantissa, self.exponent - rhs.exponent)),
            -1 => Some(Dyadic::new(-self.mantissa, self.exponent - rhs.exponent)),
            _ => None,
        }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a.checked_add(b).expect("dyadic overflow"), e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa, exponent: self.exponent }
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent <= 0 {
            write!(f, "{}", self.mantissa << (-self.exponent) as u32)
        } else {
            write!(f, "{}/2^{}", self.mantissa, self.exponent)
        }
    }
}

impl TryFrom<(i128, i32)> for Dyadic {
    type Error = String;
    fn try_from((m, e): (i128, i32)) -> Result<Self, String> {
        Ok(Dyadic::new(m, e))
    }
}

impl From<Dyadic> for (i128, i32) {
    fn from(d: Dyadic) -> (i128, i32) {
        (d.mantissa, d.exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_even_mantissa() {
        let d = Dyadic::new(12, 5);
        assert_eq!((d.mantissa(), d.exponent()), (3, 3));
        assert_eq!(Dyadic::new(0, 9), Dyadic::ZERO);
    }

    #[test]
    fn sums_of_cylinder_masses() {
        let total: Dyadic = (0..8).map(|_| Dyadic::pow2_neg(3)).sum();
        assert_eq!(total, Dyadic::ONE);
        assert_eq!(Dyadic::pow2_neg(2) - Dyadic::pow2_neg(3), Dyadic::pow2_neg(3));
    }

    #[test]
    fn ordering_and_division() {
        assert!(Dyadic::pow2_neg(3) < Dyadic::pow2_neg(2));
        assert!(Dyadic::new(-1, 0) < Dyadic::ZERO);
        let r = Dyadic::ONE.checked_div(Dyadic::pow2_neg(4)).unwrap();
        assert_eq!(r, Dyadic::from_int(16));
        assert!(Dyadic::ONE.checked_div(Dyadic::from_int(3)).is_none());
        assert_eq!(r.to_string(), "16");
        assert_eq!(Dyadic::new(3, 4).to_string(), "3/2^4");
    }
}
