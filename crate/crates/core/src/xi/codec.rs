//! Pairing functions and the tuple coding `N^m -> N^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `<a, b> = (a + b)(a + b + 1)/2 + b`.
    #[default]
    Cantor,
    /// `<a, b> = b^2 + a` if `a < b`, else `a^2 + a + b`.
    Szudzik,
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

impl Pairing {
    pub fn pair(self, a: u64, b: u64) -> Result<u64> {
        let ov = || Error::Overflow("pairing");
        match self {
            Pairing::Cantor => {
                let s = a.checked_add(b).ok_or_else(ov)?;
                let t = if s % 2 == 0 {
                    (s / 2).checked_mul(s + 1)
                } else {
                    s.checked_mul((s + 1) / 2)
                }
                .ok_or_else(ov)?;
                t.checked_add(b).ok_or_else(ov)
            }
            Pairing::Szudzik => {
                if a < b {
                    b.checked_mul(b).and_then(|x| x.checked_add(a)).ok_or_else(ov)
                } else {
                    a.checked_mul(a)
                        .and_then(|x| x.checked_add(a))
                        .and_then(|x| x.checked_add(b))
                        .ok_or_else(ov)
                }
            }
        }
    }

    pub fn unpair(self, n: u64) -> (u64, u64) {
        match self {
            Pairing::Cantor => {
                // largest w with w(w+1)/2 <= n
                let mut w = (isqrt(n.saturating_mul(8).saturating_add(1)).saturating_sub(1)) / 2;
                while w * (w + 1) / 2 > n {
                    w -= 1;
                }
                while (w + 1) * (w + 2) / 2 <= n {
                    w += 1;
                }
                let b = n - w * (w + 1) / 2;
                (w - b, b)
            }
            Pairing::Szudzik => {
                let s = isqrt(n);
                let r = n - s * s;
                if r < s {
                    (r, s)
                } else {
                    (s, r - s)
                }
            }
        }
    }
}

/// `iota_m = iota ∘ <.>`: nested pairing of an `m`-tuple followed by the
/// inverse of a (possibly different) pairing into matrix coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TupleCodec {
    #[serde(default)]
    pub pairing: Pairing,
    /// `iota` is the inverse of this pairing.
    #[serde(default)]
    pub iota: Pairing,
}

impl TupleCodec {
    /// `<n1, ..., nm> = <<n1, ..., n_{m-1}>, nm>`, `<n1> = n1`.
    pub fn nest(&self, tuple: &[u64]) -> Result<u64> {
        let (&first, rest) = tuple
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty tuple".into()))?;
        rest.iter().try_fold(first, |acc, &n| self.pairing.pair(acc, n))
    }

    pub fn unnest(&self, code: u64, m: usize) -> Vec<u64> {
        assert!(m >= 1, "tuple length must be positive");
        let mut out = vec![0; m];
        let mut k = code;
        for slot in out.iter_mut().skip(1).rev() {
            let (a, b) = self.pairing.unpair(k);
            *slot = b;
            k = a;
        }
        out[0] = k;
        out
    }

    /// Matrix coordinates of a tuple.
    pub fn encode_tuple(&self, tuple: &[u64]) -> Result<(u64, u64)> {
        Ok(self.iota.unpair(self.nest(tuple)?))
    }

    pub fn decode_entry(&self, i: u64, j: u64, m: usize) -> Result<Vec<u64>> {
        Ok(self.unnest(self.iota.pair(i, j)?, m))
    }
}
