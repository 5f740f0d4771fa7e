//! Residual-based spectral towers: lattice grids, residual fields,
//! thresholded sets, nested limit drivers and the consistency harness.

mod consistency;
mod driver;
mod field;
mod grid;

pub use consistency::{
    consistency_check, BaseAlgorithm, ConsistencyOutcome, GammaAlgorithm, RecordingMap, ResidualAlgorithm,
};
pub use driver::{
    one_index_schedule, run_pseudospectrum_tower, run_sigma_ap_tower, DictRule, N1Rule, SigmaApResult,
    Stabilization, TowerResult, TowerSchedule, TowerStage, TowerTrace,
};
pub use field::{gamma_set, residual_field, residual_field_with, GammaSet, ResidualField, GUARD_BAND};
pub use grid::SpectralGrid;
