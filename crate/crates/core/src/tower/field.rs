//! Residual fields over grids and the thresholded sets they induce.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::Norm;
use crate::error::{Error, Result};
use crate::koopman::{FiniteSection, LowerNormEvaluator, LowerNormMethod};
use crate::spectral_sets::SpectralSet;

use super::grid::SpectralGrid;

/// Points within this margin below the threshold are left out.
pub const GUARD_BAND: f64 = 1e-12;

/// Lower-norm values of one section over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualField {
    pub grid: SpectralGrid,
    pub values: Vec<f64>,
    pub dict_depth: usize,
    pub quad_depth: usize,
    pub p: Norm,
    pub method: LowerNormMethod,
    /// `false` if any value is only a heuristic upper bound.
    pub exact: bool,
}

impl ResidualField {
    /// CSV with columns `re,im,h`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im,h\n");
        for (z, h) in self.grid.points().iter().zip(&self.values) {
            s.push_str(&format!("{:.12},{:.12},{:.15e}\n", z.re, z.im, h));
        }
        s
    }
}

pub fn residual_field_with(
    sec: &FiniteSection,
    evaluator: &LowerNormEvaluator,
    p: Norm,
    grid: &SpectralGrid,
) -> ResidualField {
    let evals: Vec<_> = grid.points().par_iter().map(|&z| evaluator.eval(z)).collect();
    ResidualField {
        grid: grid.clone(),
        exact: evals.iter().all(|e| e.exact),
        values: evals.iter().map(|e| e.value).collect(),
        dict_depth: sec.dict_depth(),
        quad_depth: sec.quad_depth(),
        p,
        method: evaluator.method(),
    }
}

/// `h(z)` at every grid point.
pub fn residual_field(
    sec: &FiniteSection,
    p: Norm,
    method: LowerNormMethod,
    grid: &SpectralGrid,
) -> Result<ResidualField> {
    let ev = LowerNormEvaluator::new(sec, p, method)?;
    Ok(residual_field_with(sec, &ev, p, grid))
}

/// Output of one `Gamma` evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSet {
    pub set: SpectralSet,
    /// The set is the stand-in `{0}`: threshold nonpositive or nothing passed.
    pub placeholder: bool,
    pub threshold: f64,
    /// Grid points dropped by the guard band.
    pub guard_excluded: usize,
}

/// `{z in grid : h(z) < epsilon - 1/n2}` minus a guard band; `{0}` when
/// that is empty or the threshold is nonpositive.
pub fn gamma_set(field: &ResidualField, epsilon: f64, n2: usize) -> Result<GammaSet> {
    if n2 == 0 || !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("need epsilon > 0 and n2 >= 1".into()));
    }
    let threshold = epsilon - 1.0 / n2 as f64;
    let mesh = field.grid.mesh();
    let zero = || SpectralSet::singleton(Complex64::new(0.0, 0.0)).with_resolution(mesh);
    if threshold <= 0.0 {
        return Ok(GammaSet { set: zero(), placeholder: true, threshold, guard_excluded: 0 });
    }
    let mut pts = Vec::new();
    let mut guard_excluded = 0;
    for (z, &h) in field.grid.points().iter().zip(&field.values) {
        if h < threshold - GUARD_BAND {
            pts.push(*z);
        } else if h < threshold {
            guard_excluded += 1;
        }
    }
    if pts.is_empty() {
        return Ok(GammaSet { set: zero(), placeholder: true, threshold, guard_excluded });
    }
    Ok(GammaSet { set: SpectralSet::new(pts, mesh)?, placeholder: false, threshold, guard_excluded })
}
