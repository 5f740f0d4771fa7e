//! Exhaustive cylinder diagnostics: measure preservation, density ratios,
//! modulus of continuity and displacement.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{CantorPoint, Dyadic, Word};
use crate::error::{Error, Result};

use super::SymbolicMap;

pub const DEFAULT_EXHAUSTIVE_DEPTH: usize = 16;
pub const EXHAUSTIVE_DEPTH_ENV: &str = "SCI_EXHAUSTIVE_DEPTH";

/// Hard ceiling on the number of enumerated input coordinates.
const MAX_ENUMERATION_BITS: usize = 28;

/// Depth cap for exhaustive checks, overridable through the environment.
pub fn exhaustive_depth_cap() -> usize {
    std::env::var(EXHAUSTIVE_DEPTH_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_EXHAUSTIVE_DEPTH)
}

fn check_cap(depth: usize, cap: usize) -> Result<()> {
    if depth > cap {
        return Err(Error::ExhaustiveCapExceeded { depth, cap });
    }
    Ok(())
}

fn check_enumeration(bits: usize) -> Result<()> {
    if bits > MAX_ENUMERATION_BITS {
        return Err(Error::ExhaustiveCapExceeded { depth: bits, cap: MAX_ENUMERATION_BITS });
    }
    Ok(())
}

/// Number of depth-`L(depth)` input words landing in each depth-`depth`
/// output cylinder; returns `(L(depth), counts)`.
pub fn pushforward_counts<F: SymbolicMap + ?Sized>(f: &F, depth: usize) -> Result<(usize, Vec<u64>)> {
    let input = f.info_depth(depth);
    check_enumeration(input)?;
    check_enumeration(depth)?;
    let counts = (0..1u64 << input)
        .into_par_iter()
        .fold(
            || vec![0u64; 1 << depth],
            |mut acc, i| {
                let w = Word::from_index(i, input);
                acc[f.image_word(&w, depth).index() as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; 1 << depth],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok((input, counts))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub depth: usize,
    pub input_depth: usize,
    /// Mass of `F^{-1}[w]` for each depth-`depth` word `w`, lexicographic.
    pub preimage_masses: Vec<Dyadic>,
    /// `max_w |mass(F^{-1}[w]) - 2^(-depth)|`, exact.
    pub max_deviation: Dyadic,
    pub preserving: bool,
}

/// Exact check of `mass(F^{-1} C) = mass(C)` on every depth-`depth` cylinder.
pub fn check_measure_preservation<F: SymbolicMap + ?Sized>(
    f: &F,
    depth: usize,
    cap: usize,
) -> Result<MeasureReport> {
    check_cap(depth, cap)?;
    let (input, counts) = pushforward_counts(f, depth)?;
    let target = Dyadic::pow2_neg(depth as i32);
    let preimage_masses: Vec<Dyadic> =
        counts.iter().map(|&c| Dyadic::new(c as i128, input as i32)).collect();
    let max_deviation = preimage_masses
        .iter()
        .map(|&m| (m - target).abs())
        .max()
        .unwrap_or(Dyadic::ZERO);
    Ok(MeasureReport {
        depth,
        input_depth: input,
        preimage_masses,
        preserving: max_deviation.is_zero(),
        max_deviation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub depth: usize,
    /// `mass(F^{-1}[w]) / mass([w])` per depth-`depth` word, lexicographic.
    pub ratios: Vec<Dyadic>,
    pub sup_ratio: Dyadic,
    pub inf_ratio: Dyadic,
}

/// Cylinder density ratios of the pushforward measure at one depth.
pub fn estimate_density<F: SymbolicMap + ?Sized>(f: &F, depth: usize, cap: usize) -> Result<DensityReport> {
    check_cap(depth, cap)?;
    let (input, counts) = pushforward_counts(f, depth)?;
    let ratios: Vec<Dyadic> = counts
        .iter()
        .map(|&c| Dyadic::new(c as i128, input as i32 - depth as i32))
        .collect();
    let sup_ratio = *ratios.iter().max().expect("at least one cylinder");
    let inf_ratio = *ratios.iter().min().expect("at least one cylinder");
    Ok(DensityReport { depth, ratios, sup_ratio, inf_ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub reports: Vec<DensityReport>,
    /// The sup ratio strictly increases at every depth: the density is
    /// probably not essentially bounded.
    pub unbounded_suspected: bool,
}

pub fn density_profile<F: SymbolicMap + ?Sized>(f: &F, depths: &[usize], cap: usize) -> Result<DensityProfile> {
    let reports = depths
        .iter()
        .map(|&d| estimate_density(f, d, cap))
        .collect::<Result<Vec<_>>>()?;
    let unbounded_suspected =
        reports.len() >= 2 && reports.windows(2).all(|w| w[1].sup_ratio > w[0].sup_ratio);
    Ok(DensityProfile { reports, unbounded_suspected })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusRow {
    /// Inputs at distance `2^(-input_level)`.
    pub input_level: usize,
    /// Smallest first-disagreement index of their images, `None` when all
    /// images agree through the probe depth.
    pub output_level: Option<usize>,
}

/// Worst-case output distance per input distance, over `w 0 0 ...` points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusTable {
    pub depth: usize,
    pub rows: Vec<ModulusRow>,
}

impl ModulusTable {
    /// `d(Fx, Fy) <= d(x, y)` on every probed pair.
    pub fn is_one_lipschitz(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.output_level.map_or(true, |o| o >= r.input_level))
    }

    /// Input levels where the contraction fails.
    pub fn violations(&self) -> Vec<ModulusRow> {
        self.rows
            .iter()
            .copied()
            .filter(|r| r.output_level.is_some_and(|o| o < r.input_level))
            .collect()
    }
}

/// Sampled modulus of continuity on all depth-`depth` words.
pub fn modulus_probe<F: SymbolicMap + ?Sized>(f: &F, depth: usize, cap: usize) -> Result<ModulusTable> {
    check_cap(depth, cap)?;
    check_enumeration(depth)?;
    let outputs: Vec<u64> = (0..1u64 << depth)
        .into_par_iter()
        .map(|i| f.image_word(&Word::from_index(i, depth), depth).index())
        .collect();
    let rows = (1..=depth)
        .map(|level| {
            // Words sharing their first level-1 bits form contiguous groups.
            let size = 1usize << (depth - level + 1);
            let worst = outputs
                .chunks(size)
                .filter_map(|g| {
                    let lo = g.iter().min().unwrap();
                    let hi = g.iter().max().unwrap();
                    let x = lo ^ hi;
                    (x != 0).then(|| depth - (64 - x.leading_zeros() as usize) + 1)
                })
                .min();
            ModulusRow { input_level: level, output_level: worst }
        })
        .collect();
    Ok(ModulusTable { depth, rows })
}

/// `max_w d(F(w 0 0 ...), w 0 0 ...)` over words of length `depth`, exact.
pub fn displacement_sup<F: SymbolicMap + ?Sized>(f: &F, depth: usize, cap: usize) -> Result<Dyadic> {
    check_cap(depth, cap)?;
    check_enumeration(depth)?;
    Ok((0..1u64 << depth)
        .into_par_iter()
        .map(|i| {
            let x = CantorPoint::zero_tail(&Word::from_index(i, depth));
            f.apply(&x).distance(&x)
        })
        .max()
        .unwrap_or(Dyadic::ZERO))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Constant, FiniteTree, Identity, SingleToggle, Translation, TreeMap, TreeVersion};

    #[test]
    fn translations_preserve_measure() {
        let rep = check_measure_preservation(&Translation { r: 1 }, 6, 16).unwrap();
        assert!(rep.preserving);
        assert_eq!(rep.preimage_masses.len(), 64);
    }

    #[test]
    fn constant_map_concentrates() {
        let f = Constant { point: CantorPoint::all_zeros() };
        let rep = estimate_density(&f, 5, 16).unwrap();
        assert_eq!(rep.ratios[0], Dyadic::from_int(32));
        assert_eq!(rep.sup_ratio, Dyadic::from_int(32));
        assert_eq!(rep.inf_ratio, Dyadic::ZERO);
        let m = check_measure_preservation(&f, 3, 16).unwrap();
        assert!(!m.preserving);
        assert_eq!(m.max_deviation, Dyadic::ONE - Dyadic::pow2_neg(3));
        let prof = density_profile(&f, &[1, 2, 3], 16).unwrap();
        assert!(prof.unbounded_suspected);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            check_measure_preservation(&Identity, 17, 16),
            Err(Error::ExhaustiveCapExceeded { depth: 17, cap: 16 })
        ));
    }

    #[test]
    fn modulus_of_isometries() {
        let t = modulus_probe(&Translation { r: 0 }, 8, 16).unwrap();
        assert!(t.is_one_lipschitz());
        let id = modulus_probe(&Identity, 5, 16).unwrap();
        assert!(id.rows.iter().all(|r| r.output_level == Some(r.input_level)));
    }

    #[test]
    fn dump_map_is_not_contracting() {
        let f = TreeMap::new(FiniteTree::full(3).unwrap(), TreeVersion::Dump).unwrap();
        let t = modulus_probe(&f, 8, 16).unwrap();
        assert!(!t.is_one_lipschitz());
        assert!(!t.violations().is_empty());
    }

    #[test]
    fn toggle_displacement() {
        let f = SingleToggle::new(2, 3).unwrap();
        let d = displacement_sup(&f, 10, 16).unwrap();
        assert!(d <= Dyadic::pow2_neg(4));
        assert!(d > Dyadic::ZERO);
    }
}
