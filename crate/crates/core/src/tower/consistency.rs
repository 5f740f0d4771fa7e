//! Replay harness for the consistency axiom: an algorithm that only sees
//! point evaluations must return the same output on any map agreeing with
//! the original at every queried point.

use std::fmt::Debug;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cantor::{CantorPoint, Norm};
use crate::dynamics::{MapDescriptor, SymbolicMap};
use crate::error::Result;
use crate::koopman::{sample_section, LowerNormEvaluator, LowerNormMethod};
use crate::spectral_sets::SpectralSet;

use super::field::{gamma_set, residual_field_with};
use super::grid::SpectralGrid;

/// A map wrapper that logs every point it is evaluated at.
pub struct RecordingMap<'a> {
    inner: &'a dyn SymbolicMap,
    log: Mutex<Vec<CantorPoint>>,
}

impl<'a> RecordingMap<'a> {
    pub fn new(inner: &'a dyn SymbolicMap) -> Self {
        RecordingMap { inner, log: Mutex::new(Vec::new()) }
    }

    /// Queried points, sorted and deduplicated.
    pub fn queries(&self) -> Vec<CantorPoint> {
        let mut v = self.log.lock().unwrap().clone();
        v.sort();
        v.dedup();
        v
    }
}

impl SymbolicMap for RecordingMap<'_> {
    fn apply(&self, x: &CantorPoint) -> CantorPoint {
        self.log.lock().unwrap().push(x.clone());
        self.inner.apply(x)
    }
    fn info_depth(&self, k: usize) -> usize {
        self.inner.info_depth(k)
    }
    fn descriptor(&self) -> MapDescriptor {
        self.inner.descriptor()
    }
}

/// An algorithm whose only access to the map is point evaluation.
pub trait BaseAlgorithm {
    type Output: PartialEq + Debug;
    fn run(&self, f: &dyn SymbolicMap) -> Result<Self::Output>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConsistencyOutcome {
    /// `G` agrees with `F` on every query and the outputs coincide.
    Consistent { queries: usize },
    /// `G` differs from `F` at a queried point; the axiom says nothing.
    Distinguished { witness: CantorPoint },
    /// Agreement on every query but different outputs.
    Violated { queries: usize },
}

/// Run on `f` with logging, compare `g` at the logged points, then replay on `g`.
pub fn consistency_check<A: BaseAlgorithm>(
    alg: &A,
    f: &dyn SymbolicMap,
    g: &dyn SymbolicMap,
) -> Result<ConsistencyOutcome> {
    let rec = RecordingMap::new(f);
    let out_f = alg.run(&rec)?;
    let queries = rec.queries();
    if let Some(w) = queries.iter().find(|q| f.apply(q) != g.apply(q)) {
        return Ok(ConsistencyOutcome::Distinguished { witness: w.clone() });
    }
    let out_g = alg.run(g)?;
    Ok(if out_f == out_g {
        ConsistencyOutcome::Consistent { queries: queries.len() }
    } else {
        ConsistencyOutcome::Violated { queries: queries.len() }
    })
}

/// One `Gamma_{n2, n1}` evaluation from point queries only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaAlgorithm {
    pub dict_depth: usize,
    pub quad_depth: usize,
    pub n2: usize,
    pub epsilon: f64,
    pub p: Norm,
    pub grid_cap: f64,
    pub method: LowerNormMethod,
}

impl BaseAlgorithm for GammaAlgorithm {
    type Output = SpectralSet;
    fn run(&self, f: &dyn SymbolicMap) -> Result<SpectralSet> {
        let sec = sample_section(f, self.dict_depth, self.quad_depth)?;
        let ev = LowerNormEvaluator::new(&sec, self.p, self.method)?;
        let grid = SpectralGrid::truncated(self.n2, Some(self.grid_cap))?;
        let field = residual_field_with(&sec, &ev, self.p, &grid);
        Ok(gamma_set(&field, self.epsilon, self.n2)?.set)
    }
}

/// Residual values of a fixed dictionary function at fixed `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualAlgorithm {
    pub dict_depth: usize,
    pub quad_depth: usize,
    pub g: Vec<Complex64>,
    pub z: Complex64,
}

impl BaseAlgorithm for ResidualAlgorithm {
    type Output = Vec<Complex64>;
    fn run(&self, f: &dyn SymbolicMap) -> Result<Vec<Complex64>> {
        let sec = sample_section(f, self.dict_depth, self.quad_depth)?;
        crate::koopman::residual_values(&sec, &self.g, self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Identity, SingleToggle, Translation};

    fn gamma() -> GammaAlgorithm {
        GammaAlgorithm {
            dict_depth: 3,
            quad_depth: 3,
            n2: 8,
            epsilon: 0.4,
            p: Norm::L2,
            grid_cap: 2.0,
            method: LowerNormMethod::Auto,
        }
    }

    #[test]
    fn deep_toggle_is_invisible() {
        // The toggle only acts on [1111110]; depth-3 nodes never reach it.
        let g = SingleToggle::new(7, 0).unwrap();
        let out = consistency_check(&gamma(), &Identity, &g).unwrap();
        assert!(matches!(out, ConsistencyOutcome::Consistent { queries: 8 }));
    }

    #[test]
    fn visible_change_is_distinguished() {
        let out = consistency_check(&gamma(), &Identity, &Translation { r: 0 }).unwrap();
        assert!(matches!(out, ConsistencyOutcome::Distinguished { .. }));
    }
}
