//! Bounded-quantifier cells and the nested height-`m` limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::oracle::MatrixOracle;

/// Largest number of cells `run_xi_tower` will tabulate.
pub const MAX_XI_CELLS: usize = 1 << 24;

fn quantify(level: usize, a: bool, b: bool) -> bool {
    // Odd levels (1-based) are existential.
    if level % 2 == 0 {
        a || b
    } else {
        a && b
    }
}

/// `max_{n1<=N1} min_{n2<=N2} ... A(iota_m(n))`. Queries all `prod N_r`
/// entries, without short-circuiting.
pub fn xi_tower_cell(oracle: &MatrixOracle, m: usize, bounds: &[usize]) -> Result<bool> {
    if bounds.len() != m || m == 0 {
        return Err(Error::LengthMismatch { expected: m, got: bounds.len() });
    }
    if bounds.iter().any(|&n| n == 0) {
        return Err(Error::InvalidArgument("cell bounds must be at least 1".into()));
    }
    let table = CellTable::tabulate(oracle, bounds)?;
    Ok(table.get(bounds))
}

/// `Gamma_N` for every `N` in a box `[1..M_1] x ... x [1..M_m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellTable {
    maxes: Vec<usize>,
    values: Vec<bool>,
}

impl CellTable {
    /// Query the box once, then aggregate prefixes innermost axis first.
    pub fn tabulate(oracle: &MatrixOracle, maxes: &[usize]) -> Result<Self> {
        let m = maxes.len();
        let total = maxes
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .filter(|&t| t <= MAX_XI_CELLS)
            .ok_or(Error::Overflow("xi cell box"))?;
        let mut values = Vec::with_capacity(total);
        let mut tuple = vec![0u64; m];
        for mut idx in 0..total {
            for (slot, &side) in tuple.iter_mut().zip(maxes).rev() {
                *slot = (idx % side) as u64 + 1;
                idx /= side;
            }
            values.push(oracle.tuple_entry(&tuple)?);
        }
        let mut stride = 1;
        for axis in (0..m).rev() {
            let side = maxes[axis];
            for base in (0..total).filter(|b| (b / stride) % side == 0) {
                for k in 1..side {
                    let cur = base + k * stride;
                    values[cur] = quantify(axis, values[cur - stride], values[cur]);
                }
            }
            stride *= side;
        }
        Ok(CellTable { maxes: maxes.to_vec(), values })
    }

    pub fn maxes(&self) -> &[usize] {
        &self.maxes
    }

    /// `Gamma_N`; every `N_r` must lie in `1..=M_r`.
    pub fn get(&self, bounds: &[usize]) -> bool {
        let idx = bounds.iter().zip(&self.maxes).fold(0, |acc, (&n, &side)| {
            debug_assert!(n >= 1 && n <= side);
            acc * side + (n - 1)
        });
        self.values[idx]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiSchedule {
    /// Increasing index lists, one per level.
    pub levels: Vec<Vec<usize>>,
    /// Stable when the last `window` steps of a sweep leave the value unchanged.
    #[serde(default = "default_window")]
    pub window: usize,
}

fn default_window() -> usize {
    3
}

impl XiSchedule {
    /// `1..=max` at every level.
    pub fn uniform(m: usize, max: usize, window: usize) -> Self {
        XiSchedule { levels: vec![(1..=max).collect(); m], window }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.levels.len() != m {
            return Err(Error::LengthMismatch { expected: m, got: self.levels.len() });
        }
        for (r, lv) in self.levels.iter().enumerate() {
            if lv.is_empty() || lv[0] == 0 || lv.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "level {} indices must be nonempty, positive and strictly increasing",
                    r + 1
                )));
            }
        }
        if self.window == 0 {
            return Err(Error::InvalidArgument("window must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiTraceRow {
    pub level: usize,
    pub index: usize,
    pub value: bool,
    pub flipped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiTowerResult {
    pub value: bool,
    /// Every sweep, at every level and outer index, was eventually constant.
    pub stable: bool,
    pub unstable_sweeps: usize,
    /// Level-`r` sweep with all outer indices at their largest scheduled value.
    pub trace: Vec<XiTraceRow>,
    pub queries: usize,
}

impl XiTowerResult {
    /// `(level, index)` of every flip in the trace.
    pub fn flip_points(&self) -> Vec<(usize, usize)> {
        self.trace.iter().filter(|r| r.flipped).map(|r| (r.level, r.index)).collect()
    }

    /// CSV with columns `level,index,value,flipped`.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("level,index,value,flipped\n");
        for r in &self.trace {
            s.push_str(&format!("{},{},{},{}\n", r.level, r.index, u8::from(r.value), u8::from(r.flipped)));
        }
        s
    }
}

struct Sweeper<'a> {
    cells: &'a CellTable,
    schedule: &'a XiSchedule,
    unstable: usize,
}

impl Sweeper<'_> {
    fn sweep(&mut self, level: usize, outer: &mut Vec<usize>) -> Vec<bool> {
        let idx = self.schedule.levels[level].clone();
        idx.iter()
            .map(|&n| {
                outer.push(n);
                let v = self.limit(level + 1, outer);
                outer.pop();
                v
            })
            .collect()
    }

    fn limit(&mut self, level: usize, outer: &mut Vec<usize>) -> bool {
        if level == self.schedule.levels.len() {
            return self.cells.get(outer);
        }
        let seq = self.sweep(level, outer);
        if !stable_tail(&seq, self.schedule.window) {
            self.unstable += 1;
        }
        *seq.last().unwrap()
    }
}

fn stable_tail(seq: &[bool], window: usize) -> bool {
    seq.len() > window && seq[seq.len() - window - 1..].windows(2).all(|w| w[0] == w[1])
}

/// Nested sweeps, innermost first, with the empirical limit at each level
/// taken as the last value of its sweep.
pub fn run_xi_tower(oracle: &MatrixOracle, m: usize, schedule: &XiSchedule) -> Result<XiTowerResult> {
    schedule.validate(m)?;
    let maxes: Vec<usize> = schedule.levels.iter().map(|l| *l.last().unwrap()).collect();
    let before = oracle.query_count();
    let cells = CellTable::tabulate(oracle, &maxes)?;
    let queries = oracle.query_count() - before;

    let mut sw = Sweeper { cells: &cells, schedule, unstable: 0 };
    let value = sw.limit(0, &mut Vec::new());
    let unstable_sweeps = sw.unstable;

    let mut trace = Vec::new();
    for level in 0..m {
        let mut outer = maxes[..level].to_vec();
        let mut quiet = Sweeper { cells: &cells, schedule, unstable: 0 };
        let seq = quiet.sweep(level, &mut outer);
        for (k, (&n, &v)) in schedule.levels[level].iter().zip(&seq).enumerate() {
            trace.push(XiTraceRow { level: level + 1, index: n, value: v, flipped: k > 0 && seq[k - 1] != v });
        }
    }
    Ok(XiTowerResult { value, stable: unstable_sweeps == 0, unstable_sweeps, trace, queries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xi::codec::TupleCodec;
    use crate::xi::oracle::{embed_universal, ThresholdTable};

    #[test]
    fn cell_queries_exactly_the_box() {
        let o = embed_universal(|n| n[0] == n[1], 2, TupleCodec::default()).unwrap();
        let v = xi_tower_cell(&o, 2, &[3, 4]).unwrap();
        assert_eq!(o.query_count(), 12);
        // exists n1 <= 3 with n2 == n1 for all n2 <= 4: no.
        assert!(!v);
    }

    #[test]
    fn table_matches_direct_cells() {
        let t = ThresholdTable::from_fn(3, 2, |n| (n[0] * 7 + n[1] * 3 + n[2]) % 4 == 1).unwrap();
        let o = MatrixOracle::thresholded(t, TupleCodec::default());
        let cells = CellTable::tabulate(&o, &[4, 3, 5]).unwrap();
        for a in 1..=4 {
            for b in 1..=3 {
                for c in 1..=5 {
                    let mut direct = false;
                    for n1 in 1..=a as u64 {
                        let mut all = true;
                        for n2 in 1..=b as u64 {
                            let any = (1..=c as u64).any(|n3| o.tuple_entry(&[n1, n2, n3]).unwrap());
                            all &= any;
                        }
                        direct |= all;
                    }
                    assert_eq!(cells.get(&[a, b, c]), direct, "cell {a},{b},{c}");
                }
            }
        }
    }

    #[test]
    fn m1_trace_flips_once() {
        let o = embed_universal(|n| n[0] >= 4, 1, TupleCodec::default()).unwrap();
        let r = run_xi_tower(&o, 1, &XiSchedule::uniform(1, 8, 3)).unwrap();
        assert!(r.value && r.stable);
        assert_eq!(r.flip_points(), vec![(1, 4)]);
    }

    #[test]
    fn schedule_validation() {
        assert!(XiSchedule { levels: vec![vec![1, 1]], window: 1 }.validate(1).is_err());
        assert!(XiSchedule::uniform(2, 3, 1).validate(1).is_err());
    }
}
