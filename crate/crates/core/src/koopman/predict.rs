//! Predicted spectra and exact eigen-relations.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cantor::{CantorPoint, Word};
use crate::dynamics::{star_counts, FiniteTree, MapDescriptor, Translation, TreeVersion};
use crate::error::{Error, Result};
use crate::spectral_sets::{circle_grid, roots_of_unity, SpectralSet};

use super::section::assemble_section;

/// Union of the `L`-th roots of unity over the given cycle lengths.
pub fn exact_cycle_spectrum(lengths: &[usize]) -> Result<SpectralSet> {
    if lengths.is_empty() {
        return Err(Error::InvalidArgument("no cycles".into()));
    }
    let parts = lengths.iter().map(|&l| roots_of_unity(l)).collect::<Result<Vec<_>>>()?;
    SpectralSet::union(&parts)
}

/// Spectrum of a direct sum: the union of the parts.
pub fn block_union_spectrum(parts: &[SpectralSet]) -> Result<SpectralSet> {
    SpectralSet::union(parts)
}

/// Predicted point spectrum of a tree map: the `2^{k_m}`-th roots of unity
/// over all blocks, plus `{1, -1}` for the dump version. Orders above
/// `2^r_max` are capped and reflected in the resolution.
pub fn predicted_spectrum_tree(tree: &FiniteTree, version: TreeVersion, r_max: u32) -> Result<SpectralSet> {
    let ks = star_counts(tree);
    let mut parts = vec![SpectralSet::singleton(Complex64::new(1.0, 0.0))];
    if version == TreeVersion::Dump {
        parts.push(roots_of_unity(2)?);
    }
    let mut resolution: f64 = 0.0;
    for k in ks {
        let k = k as u32;
        if k > r_max {
            resolution = resolution.max(2.0 * (PI / (1u64 << r_max) as f64).sin());
        }
        parts.push(roots_of_unity(1usize << k.min(r_max))?);
    }
    Ok(SpectralSet::union(&parts)?.with_resolution(resolution))
}

/// Predicted approximate point spectrum of a gadget; the circle is
/// represented by `circle_grid(circle_n)`. `None` when no prediction applies.
pub fn predicted_spectrum(desc: &MapDescriptor, circle_n: usize, r_max: u32) -> Result<Option<SpectralSet>> {
    let one = SpectralSet::singleton(Complex64::new(1.0, 0.0));
    Ok(match desc {
        MapDescriptor::Identity => Some(one),
        MapDescriptor::Translation { .. } => Some(circle_grid(circle_n)?),
        MapDescriptor::SingleToggle { .. } => Some(block_union_spectrum(&[one, circle_grid(circle_n)?])?),
        MapDescriptor::TreeMap { version, tree } => Some(predicted_spectrum_tree(tree, *version, r_max)?),
        MapDescriptor::SilverTreeMap { version, a, x, max_depth } => Some(predicted_spectrum_tree(
            &crate::dynamics::silver_tree(a, x, *max_depth)?,
            *version,
            r_max,
        )?),
        MapDescriptor::Constant { .. } | MapDescriptor::Composite { .. } => None,
    })
}

/// `k * s_m(w) mod 2^m` with `s_m` read least significant bit first.
fn character_phase(w: &Word, k: u64, m: usize) -> u64 {
    let s = CantorPoint::zero_tail(w).truncate_2adic(m);
    (k.wrapping_mul(s)) & ((1u64 << m) - 1)
}

fn turn(phase: u64, m: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * phase as f64 / (1u64 << m) as f64)
}

/// Max node deviation `|chi(F x_P) - mu chi(x_P)|` for the character
/// `chi = exp(2 pi i k s_m / 2^m)` under translation by `2^r`, with
/// `mu = exp(2 pi i k 2^r / 2^m)`. The relation is exact for `r < m`.
pub fn verify_character_eigenpair(r: u32, m: usize, k: u64) -> Result<f64> {
    if m == 0 || m > 20 || (r as usize) >= m {
        return Err(Error::InvalidArgument(format!("need 0 <= r < m <= 20, got r={r}, m={m}")));
    }
    let sec = assemble_section(&Translation { r }, m, m)?;
    let mask = (1u64 << m) - 1;
    let mu_phase = (k.wrapping_mul(1u64 << r)) & mask;
    let mu = turn(mu_phase, m);
    Ok((0..sec.node_count())
        .map(|p| {
            let src = Word::from_index(sec.node_cylinder(p) as u64, m);
            let img = Word::from_index(sec.action()[p] as u64, m);
            (turn(character_phase(&img, k, m), m) - mu * turn(character_phase(&src, k, m), m)).norm()
        })
        .fold(0.0, f64::max))
}
