//! Instance families with known `Xi_m` values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::codec::TupleCodec;
use super::oracle::{tuple_entry, MatrixOracle, OracleKind, ThresholdTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdBase {
    Table,
    Seed,
}

/// Oracle description as it appears in config files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    Constant {
        m: usize,
        value: bool,
    },
    /// Ones exactly where every existential coordinate hits its target.
    WitnessAt {
        m: usize,
        coords: Vec<u64>,
    },
    ThresholdRandom {
        m: usize,
        #[serde(rename = "T")]
        clamp: u64,
        seed: u64,
    },
    Thresholded {
        m: usize,
        #[serde(rename = "T")]
        clamp: u64,
        base: ThresholdBase,
        /// `(T+1)^m` zeros and ones, first coordinate most significant.
        #[serde(default)]
        table: Option<Vec<u8>>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Delayed {
        m: usize,
        flip_index: u64,
    },
    Explicit {
        m: usize,
        support: Vec<(u64, u64)>,
    },
}

impl OracleSpec {
    pub fn m(&self) -> usize {
        match self {
            OracleSpec::Constant { m, .. }
            | OracleSpec::WitnessAt { m, .. }
            | OracleSpec::ThresholdRandom { m, .. }
            | OracleSpec::Thresholded { m, .. }
            | OracleSpec::Delayed { m, .. }
            | OracleSpec::Explicit { m, .. } => *m,
        }
    }

    pub fn build(&self, codec: TupleCodec) -> Result<MatrixOracle> {
        let m = self.m();
        if m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        match self {
            OracleSpec::Constant { value, .. } => {
                Ok(MatrixOracle::thresholded(ThresholdTable::from_fn(m, 0, |_| *value)?, codec))
            }
            OracleSpec::WitnessAt { coords, .. } => witness_at(m, coords, codec),
            OracleSpec::ThresholdRandom { clamp, seed, .. } => threshold_random(m, *clamp, *seed, codec),
            OracleSpec::Thresholded { clamp, base, table, seed, .. } => match base {
                ThresholdBase::Seed => {
                    let seed = seed.ok_or_else(|| Error::InvalidArgument("base \"seed\" needs a seed".into()))?;
                    threshold_random(m, *clamp, seed, codec)
                }
                ThresholdBase::Table => {
                    let bits = table
                        .as_ref()
                        .ok_or_else(|| Error::InvalidArgument("base \"table\" needs a table".into()))?;
                    if let Some(b) = bits.iter().find(|&&b| b > 1) {
                        return Err(Error::InvalidArgument(format!("table entry {b} is not 0 or 1")));
                    }
                    let t = ThresholdTable::new(m, *clamp, bits.iter().map(|&b| b == 1).collect())?;
                    Ok(MatrixOracle::thresholded(t, codec))
                }
            },
            OracleSpec::Delayed { flip_index, .. } => delayed(m, *flip_index, codec),
            OracleSpec::Explicit { support, .. } => {
                MatrixOracle::explicit(m, support.iter().copied().collect(), codec)
            }
        }
    }
}

/// Uniform random base table on `{1..T+1}^m`.
pub fn threshold_random(m: usize, clamp: u64, seed: u64, codec: TupleCodec) -> Result<MatrixOracle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probe = ThresholdTable::from_fn(m, clamp, |_| false)?;
    let bits = (0..probe.bits().len()).map(|_| rng.gen_bool(0.5)).collect();
    Ok(MatrixOracle::thresholded(ThresholdTable::new(m, clamp, bits)?, codec))
}

/// `P(n) = 1` iff `n_r = c_r` at every existential (odd) level. `Xi_m = 1`,
/// and the level-1 sweep turns on exactly at `N_1 = c_1`.
pub fn witness_at(m: usize, coords: &[u64], codec: TupleCodec) -> Result<MatrixOracle> {
    if coords.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: coords.len() });
    }
    if coords.iter().any(|&c| c == 0) {
        return Err(Error::InvalidArgument("witness coordinates start at 1".into()));
    }
    let c = coords.to_vec();
    Ok(MatrixOracle::from_fn(OracleKind::Embedded { m }, codec, Some(true), move |i, j| {
        tuple_entry(&codec, i, j, m, |t| t.iter().zip(&c).step_by(2).all(|(n, w)| n == w))
    }))
}

/// `P(n) = [n_1 >= flip_index]`: `Xi_m = 1`, but every window shorter than
/// the flip index looks like 0.
pub fn delayed(m: usize, flip_index: u64, codec: TupleCodec) -> Result<MatrixOracle> {
    if flip_index == 0 {
        return Err(Error::InvalidArgument("flip index starts at 1".into()));
    }
    Ok(MatrixOracle::from_fn(OracleKind::Adversarial { m, flip_index }, codec, Some(true), move |i, j| {
        tuple_entry(&codec, i, j, m, |t| t[0] >= flip_index)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xi::oracle::xi_exact;

    #[test]
    fn constants_for_m2() {
        let c = TupleCodec::default();
        let one = OracleSpec::Constant { m: 2, value: true }.build(c).unwrap();
        let zero = OracleSpec::Constant { m: 2, value: false }.build(c).unwrap();
        assert!(xi_exact(&one, 2).unwrap());
        assert!(!xi_exact(&zero, 2).unwrap());
    }

    #[test]
    fn spec_json_round_trip() {
        let s: OracleSpec = serde_json::from_str(r#"{"kind":"thresholded","m":2,"T":4,"base":"seed","seed":7}"#).unwrap();
        assert_eq!(s.m(), 2);
        let o = s.build(TupleCodec::default()).unwrap();
        assert!(o.ground_truth().is_some());
        assert!(serde_json::from_str::<OracleSpec>(r#"{"kind":"mystery","m":1}"#).is_err());
    }

    #[test]
    fn seeded_tables_are_reproducible() {
        let c = TupleCodec::default();
        let a = threshold_random(3, 4, 7, c).unwrap();
        let b = threshold_random(3, 4, 7, c).unwrap();
        assert_eq!(a.kind(), b.kind());
        assert_eq!(xi_exact(&a, 3).unwrap(), a.ground_truth().unwrap());
    }

    #[test]
    fn table_base_checks_length() {
        let s = OracleSpec::Thresholded { m: 1, clamp: 2, base: ThresholdBase::Table, table: Some(vec![0, 1]), seed: None };
        assert!(s.build(TupleCodec::default()).is_err());
    }
}
