//! Lazily queried `{0,1}` matrices with a query log.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::codec::TupleCodec;

/// A predicate on `{1..T+1}^m`, row-major with the first coordinate most
/// significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdTable {
    m: usize,
    clamp: u64,
    bits: Vec<bool>,
}

impl ThresholdTable {
    /// `clamp` is `T`; the table has `(T+1)^m` entries.
    pub fn new(m: usize, clamp: u64, bits: Vec<bool>) -> Result<Self> {
        let expected = Self::size(m, clamp)?;
        if bits.len() != expected {
            return Err(Error::LengthMismatch { expected, got: bits.len() });
        }
        Ok(ThresholdTable { m, clamp, bits })
    }

    pub fn from_fn(m: usize, clamp: u64, f: impl Fn(&[u64]) -> bool) -> Result<Self> {
        let size = Self::size(m, clamp)?;
        let side = clamp + 1;
        let mut tuple = vec![0u64; m];
        let bits = (0..size as u64)
            .map(|mut idx| {
                for slot in tuple.iter_mut().rev() {
                    *slot = idx % side + 1;
                    idx /= side;
                }
                f(&tuple)
            })
            .collect();
        Ok(ThresholdTable { m, clamp, bits })
    }

    fn size(m: usize, clamp: u64) -> Result<usize> {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        (clamp + 1)
            .checked_pow(m as u32)
            .filter(|&s| s <= 1 << 24)
            .map(|s| s as usize)
            .ok_or(Error::Overflow("threshold table size"))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn clamp(&self) -> u64 {
        self.clamp
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Value at `min(n_r, T+1)`; coordinates must be `>= 1`.
    pub fn get(&self, tuple: &[u64]) -> bool {
        debug_assert_eq!(tuple.len(), self.m);
        let side = self.clamp + 1;
        let idx = tuple.iter().fold(0u64, |acc, &n| acc * side + (n.min(side) - 1));
        self.bits[idx as usize]
    }
}

/// What the oracle is, which determines whether a ground truth is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleKind {
    Thresholded { table: ThresholdTable },
    /// `Psi_m(x)` for a tuple predicate `x`.
    Embedded { m: usize },
    /// Finitely many ones, given as matrix coordinates.
    Explicit { m: usize, support: BTreeSet<(u64, u64)> },
    /// `P(n) = [n_1 >= flip_index]`: the first-level sweep flips exactly there.
    Adversarial { m: usize, flip_index: u64 },
}

type EntryFn = Box<dyn Fn(u64, u64) -> bool + Send + Sync>;

pub struct MatrixOracle {
    kind: OracleKind,
    codec: TupleCodec,
    entry: EntryFn,
    ground_truth: Option<bool>,
    memo: Mutex<HashMap<(u64, u64), bool>>,
    log: Mutex<Vec<(u64, u64)>>,
}

impl fmt::Debug for MatrixOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixOracle")
            .field("kind", &self.kind)
            .field("codec", &self.codec)
            .field("ground_truth", &self.ground_truth)
            .field("queries", &self.query_count())
            .finish()
    }
}

impl MatrixOracle {
    pub fn from_fn(
        kind: OracleKind,
        codec: TupleCodec,
        ground_truth: Option<bool>,
        entry: impl Fn(u64, u64) -> bool + Send + Sync + 'static,
    ) -> Self {
        MatrixOracle {
            kind,
            codec,
            entry: Box::new(entry),
            ground_truth,
            memo: Mutex::new(HashMap::new()),
            log: Mutex::new(Vec::new()),
        }
    }

    /// A thresholded oracle; entries whose tuple has a zero coordinate are 0.
    pub fn thresholded(table: ThresholdTable, codec: TupleCodec) -> Self {
        let m = table.m();
        let inner = table.clone();
        let truth = Some(xi_of_table(&table));
        MatrixOracle::from_fn(OracleKind::Thresholded { table }, codec, truth, move |i, j| {
            tuple_entry(&codec, i, j, m, |t| inner.get(t))
        })
    }

    pub fn explicit(m: usize, support: BTreeSet<(u64, u64)>, codec: TupleCodec) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        // With finite support every universal level eventually fails, so only
        // m = 1 can hold.
        let truth = if m == 1 {
            support
                .iter()
                .any(|&(i, j)| codec.decode_entry(i, j, 1).is_ok_and(|t| t[0] >= 1))
        } else {
            false
        };
        let inner = support.clone();
        Ok(MatrixOracle::from_fn(
            OracleKind::Explicit { m, support },
            codec,
            Some(truth),
            move |i, j| inner.contains(&(i, j)),
        ))
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn codec(&self) -> &TupleCodec {
        &self.codec
    }

    pub fn m(&self) -> usize {
        match &self.kind {
            OracleKind::Thresholded { table } => table.m(),
            OracleKind::Embedded { m } | OracleKind::Explicit { m, .. } | OracleKind::Adversarial { m, .. } => *m,
        }
    }

    /// Exact `Xi_m` when the instance family determines it.
    pub fn ground_truth(&self) -> Option<bool> {
        self.ground_truth
    }

    /// Matrix entry `(i, j)`, memoized and logged.
    pub fn entry(&self, i: u64, j: u64) -> bool {
        self.log.lock().unwrap().push((i, j));
        let mut memo = self.memo.lock().unwrap();
        *memo.entry((i, j)).or_insert_with(|| (self.entry)(i, j))
    }

    /// Entry at `iota_m(tuple)`.
    pub fn tuple_entry(&self, tuple: &[u64]) -> Result<bool> {
        let (i, j) = self.codec.encode_tuple(tuple)?;
        Ok(self.entry(i, j))
    }

    /// Every query so far, in order.
    pub fn query_log(&self) -> Vec<(u64, u64)> {
        self.log.lock().unwrap().clone()
    }

    pub fn query_count(&self) -> usize {
        self.log.lock().unwrap().len()
    }

    pub fn distinct_queries(&self) -> BTreeSet<(u64, u64)> {
        self.log.lock().unwrap().iter().copied().collect()
    }

    pub fn clear_log(&self) {
        self.log.lock().unwrap().clear();
    }
}

/// Decode `(i, j)` to an `m`-tuple and apply `x`; tuples touching 0 and
/// codes that overflow map to 0.
pub(crate) fn tuple_entry(codec: &TupleCodec, i: u64, j: u64, m: usize, x: impl Fn(&[u64]) -> bool) -> bool {
    match codec.decode_entry(i, j, m) {
        Ok(t) if t.iter().all(|&n| n >= 1) => x(&t),
        _ => false,
    }
}

/// Alternating quantifiers over `{1..T+1}^m`, first level existential.
pub(crate) fn xi_of_table(table: &ThresholdTable) -> bool {
    let side = table.clamp() + 1;
    fn rec(table: &ThresholdTable, prefix: &mut Vec<u64>, side: u64) -> bool {
        let level = prefix.len();
        if level == table.m() {
            return table.get(prefix);
        }
        let exists = level % 2 == 0;
        for n in 1..=side {
            prefix.push(n);
            let v = rec(table, prefix, side);
            prefix.pop();
            if v == exists {
                return exists;
            }
        }
        !exists
    }
    rec(table, &mut Vec::with_capacity(table.m()), side)
}

/// Exact `Xi_m` of a thresholded oracle by brute force over `{1..T+1}^m`.
pub fn xi_exact(oracle: &MatrixOracle, m: usize) -> Result<bool> {
    match oracle.kind() {
        OracleKind::Thresholded { table } if table.m() == m => {
            // Read the box through the matrix rather than trusting the table.
            let seen = ThresholdTable::from_fn(m, table.clamp(), |t| oracle.tuple_entry(t).unwrap_or(false))?;
            Ok(xi_of_table(&seen))
        }
        OracleKind::Thresholded { table } => Err(Error::InvalidArgument(format!(
            "oracle has arity {}, asked for m = {m}",
            table.m()
        ))),
        _ => Err(Error::NotApplicable {
            method: "xi_exact",
            reason: "ground truth is only defined for thresholded oracles".into(),
        }),
    }
}

/// `Psi_m(x)`: `x(n)` at `iota_m(n)`, 0 on every other entry.
pub fn embed_universal(
    x: impl Fn(&[u64]) -> bool + Send + Sync + 'static,
    m: usize,
    codec: TupleCodec,
) -> Result<MatrixOracle> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    Ok(MatrixOracle::from_fn(OracleKind::Embedded { m }, codec, None, move |i, j| {
        tuple_entry(&codec, i, j, m, &x)
    }))
}

/// `Psi_m` of a thresholded predicate; keeps the thresholded kind so the
/// result stays exactly decidable.
pub fn embed_thresholded(table: ThresholdTable, codec: TupleCodec) -> MatrixOracle {
    MatrixOracle::thresholded(table, codec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codec() -> TupleCodec {
        TupleCodec::default()
    }

    #[test]
    fn m1_zero_base_is_false() {
        let t = ThresholdTable::from_fn(1, 5, |_| false).unwrap();
        assert!(!xi_exact(&MatrixOracle::thresholded(t, codec()), 1).unwrap());
    }

    #[test]
    fn m1_single_one_is_true() {
        let t = ThresholdTable::from_fn(1, 5, |n| n[0] == 3).unwrap();
        assert!(xi_exact(&MatrixOracle::thresholded(t, codec()), 1).unwrap());
    }

    #[test]
    fn m2_lower_triangle_with_clamp() {
        let t = ThresholdTable::from_fn(2, 4, |n| n[1] <= n[0]).unwrap();
        let o = MatrixOracle::thresholded(t, codec());
        assert!(xi_exact(&o, 2).unwrap());
        // Clamping: (9, 100) reads base(5, 5).
        assert!(o.tuple_entry(&[9, 100]).unwrap());
        assert!(!o.tuple_entry(&[2, 100]).unwrap());
    }

    #[test]
    fn zero_coordinates_read_zero() {
        let t = ThresholdTable::from_fn(2, 2, |_| true).unwrap();
        let o = MatrixOracle::thresholded(t, codec());
        assert!(!o.tuple_entry(&[0, 1]).unwrap());
        assert!(o.tuple_entry(&[1, 1]).unwrap());
    }

    #[test]
    fn memo_is_deterministic_and_logged() {
        let o = embed_universal(|n| n[0] % 2 == 1, 1, codec()).unwrap();
        let a = o.tuple_entry(&[3]).unwrap();
        let b = o.tuple_entry(&[3]).unwrap();
        assert_eq!(a, b);
        assert_eq!(o.query_count(), 2);
        assert_eq!(o.distinct_queries().len(), 1);
    }

    #[test]
    fn exact_refuses_non_thresholded() {
        let o = embed_universal(|_| true, 2, codec()).unwrap();
        assert!(xi_exact(&o, 2).is_err());
    }

    #[test]
    fn explicit_truth() {
        let c = codec();
        let one = c.encode_tuple(&[4]).unwrap();
        let o = MatrixOracle::explicit(1, [one].into_iter().collect(), c).unwrap();
        assert_eq!(o.ground_truth(), Some(true));
        let o2 = MatrixOracle::explicit(2, [one].into_iter().collect(), c).unwrap();
        assert_eq!(o2.ground_truth(), Some(false));
    }
}
