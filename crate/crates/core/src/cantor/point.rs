//! Eventually periodic points of Cantor space.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Dyadic, Word};
use crate::error::{Error, Result};

/// An eventually periodic 0/1 sequence `prefix period period ...`.
///
/// Coordinates are 1-indexed. The representation is canonical (minimal
/// period, then minimal prefix), so structural equality is equality of
/// sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CantorPoint {
    prefix: Word,
    period: Word,
}

impl CantorPoint {
    pub fn new(prefix: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidArgument("period must be nonempty".into()));
        }
        let mut p = CantorPoint { prefix, period };
        p.canonicalize();
        Ok(p)
    }

    /// `w 0 0 0 ...`
    pub fn zero_tail(w: &Word) -> Self {
        let mut p = CantorPoint { prefix: w.clone(), period: Word::zeros(1) };
        p.canonicalize();
        p
    }

    pub fn all_zeros() -> Self {
        CantorPoint { prefix: Word::empty(), period: Word::zeros(1) }
    }

    /// The distinguished fixed point `1 1 1 ...`.
    pub fn all_ones() -> Self {
        CantorPoint { prefix: Word::empty(), period: Word::ones(1) }
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    fn canonicalize(&mut self) {
        let n = self.period.len();
        let bits = self.period.bits();
        if let Some(p) = (1..n)
            .filter(|p| n % p == 0)
            .find(|&p| (p..n).all(|i| bits[i] == bits[i % p]))
        {
            self.period = self.period.prefix(p);
        }
        while let Some(&last) = self.prefix.bits().last() {
            let plen = self.period.len();
            if last != self.period.get(plen - 1) {
                break;
            }
            self.prefix.pop();
            let mut rotated = vec![last];
            rotated.extend_from_slice(&self.period.bits()[..plen - 1]);
            self.period = Word::new(rotated);
        }
    }

    /// Coordinate `j >= 1`.
    pub fn coord(&self, j: usize) -> bool {
        assert!(j >= 1, "coordinates are 1-indexed");
        let i = j - 1;
        let l = self.prefix.len();
        if i < l {
            self.prefix.get(i)
        } else {
            self.period.get((i - l) % self.period.len())
        }
    }

    /// The word of the first `n` coordinates.
    pub fn first_bits(&self, n: usize) -> Word {
        Word::new((1..=n).map(|j| self.coord(j)).collect())
    }

    /// Index of the first zero coordinate, `None` for the all-ones point.
    pub fn first_zero(&self) -> Option<usize> {
        if let Some(i) = self.prefix.bits().iter().position(|b| !b) {
            return Some(i + 1);
        }
        self.period
            .bits()
            .iter()
            .position(|b| !b)
            .map(|i| self.prefix.len() + i + 1)
    }

    /// Drop the first `k` coordinates.
    pub fn shift(&self, k: usize) -> CantorPoint {
        let l = self.prefix.len();
        if k <= l {
            return CantorPoint {
                prefix: self.prefix.slice(k, l),
                period: self.period.clone(),
            };
        }
        let p = self.period.len();
        let r = (k - l) % p;
        let mut rot = self.period.slice(r, p).into_bits();
        rot.extend_from_slice(&self.period.bits()[..r]);
        let mut out = CantorPoint { prefix: Word::empty(), period: Word::new(rot) };
        out.canonicalize();
        out
    }

    /// `w` followed by this sequence.
    pub fn prepend(&self, w: &Word) -> CantorPoint {
        let mut out = CantorPoint { prefix: w.concat(&self.prefix), period: self.period.clone() };
        out.canonicalize();
        out
    }

    /// Replace the first `w.len()` coordinates by `w`.
    pub fn with_prefix(&self, w: &Word) -> CantorPoint {
        self.shift(w.len()).prepend(w)
    }

    /// Ultrametric distance `2^(-N)`, `N` the first disagreeing coordinate.
    pub fn distance(&self, other: &CantorPoint) -> Dyadic {
        match self.first_disagreement(other) {
            None => Dyadic::ZERO,
            Some(n) => Dyadic::pow2_neg(n as i32),
        }
    }

    pub fn first_disagreement(&self, other: &CantorPoint) -> Option<usize> {
        if self == other {
            return None;
        }
        let horizon = self.prefix.len().max(other.prefix.len())
            + lcm(self.period.len(), other.period.len());
        (1..=horizon).find(|&j| self.coord(j) != other.coord(j))
    }

    /// `s_m = sum_{j <= m} x_j 2^(j-1)`, least significant bit first.
    pub fn truncate_2adic(&self, m: usize) -> u64 {
        assert!(m <= 64, "2-adic truncation limited to 64 digits");
        (1..=m).fold(0u64, |acc, j| acc | ((self.coord(j) as u64) << (j - 1)))
    }

    /// 2-adic addition of a nonnegative integer, with the carry propagated
    /// into the periodic tail.
    pub fn add_2adic(&self, t: u64) -> CantorPoint {
        let l = self.prefix.len();
        let p = self.period.len();
        let tbits = 64 - t.leading_zeros() as usize;
        let k = if tbits <= l { l } else { l + p * (tbits - l).div_ceil(p) };
        let mut head = self.first_bits(k).into_bits();
        let mut carry = false;
        for (i, b) in head.iter_mut().enumerate() {
            let tb = i < 64 && (t >> i) & 1 == 1;
            let s = *b as u8 + tb as u8 + carry as u8;
            *b = s & 1 == 1;
            carry = s >= 2;
        }
        if !carry {
            return CantorPoint::new(Word::new(head), self.period.clone()).unwrap();
        }
        if self.period.bits().iter().all(|&b| b) {
            return CantorPoint::new(Word::new(head), Word::zeros(1)).unwrap();
        }
        // The carry dies inside the first copy of the period.
        let mut first = self.period.clone().into_bits();
        for b in first.iter_mut() {
            if *b {
                *b = false;
            } else {
                *b = true;
                break;
            }
        }
        head.extend(first);
        CantorPoint::new(Word::new(head), self.period.clone()).unwrap()
    }

    /// Translation by `2^r` in the 2-adic integers.
    pub fn translate_pow2(&self, r: u32) -> CantorPoint {
        assert!(r < 64, "translation exponent too large");
        self.add_2adic(1u64 << r)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl fmt::Display for CantorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.prefix, self.period)
    }
}

impl FromStr for CantorPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (pre, per) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("expected prefix|period, got {s:?}")))?;
        CantorPoint::new(pre.parse()?, per.parse()?)
    }
}

impl TryFrom<String> for CantorPoint {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CantorPoint> for String {
    fn from(p: CantorPoint) -> String {
        p.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> CantorPoint {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(pt("1001|01"), pt("10|01"));
        assert_eq!(pt("10|01").to_string(), "10|01");
        assert_eq!(pt("0101|01"), pt("|01"));
        assert_eq!(pt("|0000"), CantorPoint::all_zeros());
        assert_eq!(pt("11|1"), CantorPoint::all_ones());
        assert_eq!(pt("0|10").to_string(), "|01");
        assert!("10|".parse::<CantorPoint>().is_err());
        assert!("10".parse::<CantorPoint>().is_err());
    }

    #[test]
    fn coordinates_and_shift() {
        let x = pt("10|01");
        let bits: String = (1..=7).map(|j| if x.coord(j) { '1' } else { '0' }).collect();
        assert_eq!(bits, "1001010");
        assert_eq!(x.shift(3).first_bits(4).to_string(), "1010");
        assert_eq!(x.with_prefix(&"11".parse().unwrap()).first_bits(5).to_string(), "11010");
        assert_eq!(x.first_zero(), Some(2));
        assert_eq!(CantorPoint::all_ones().first_zero(), None);
    }

    #[test]
    fn distance_is_first_disagreement() {
        assert_eq!(pt("101|0").distance(&pt("100|0")), Dyadic::pow2_neg(3));
        assert_eq!(pt("|01").distance(&pt("01|01")), Dyadic::ZERO);
        assert_eq!(pt("|01").distance(&pt("|011")), Dyadic::pow2_neg(3));
    }

    #[test]
    fn two_adic_arithmetic() {
        assert_eq!(CantorPoint::all_ones().add_2adic(1), CantorPoint::all_zeros());
        // 3 + 1 = 4: 11|0 -> 001|0
        assert_eq!(pt("11|0").add_2adic(1), pt("001|0"));
        assert_eq!(pt("1|0").truncate_2adic(3), 1);
        assert_eq!(pt("011|0").truncate_2adic(3), 6);
        // -1/3 + 1 = 2/3
        assert_eq!(pt("|10").add_2adic(1), pt("01|10"));
        assert_eq!(pt("|0").translate_pow2(2), pt("001|0"));
    }
}
