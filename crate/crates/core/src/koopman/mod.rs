//! Koopman operator `g -> g ∘ F` restricted to cylinder dictionaries:
//! finite sections, residual lower norms and predicted spectra.

mod lower_norm;
mod predict;
mod section;

pub use lower_norm::{
    cycle_lower_norm, lower_norm, HeuristicConfig, LowerNorm, LowerNormEvaluator, LowerNormMethod,
};
pub use predict::{
    block_union_spectrum, exact_cycle_spectrum, predicted_spectrum, predicted_spectrum_tree,
    verify_character_eigenpair,
};
pub use section::{
    assemble_section, cycle_decomposition, dictionary_values, residual_values, sample_section,
    CycleDecomposition, FiniteSection, SectionRow, MAX_QUAD_DEPTH,
};
