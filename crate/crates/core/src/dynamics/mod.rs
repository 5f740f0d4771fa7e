//! Continuous maps of Cantor space given by finite-information evaluators:
//! 2-adic translations, single-block toggles and tree-driven block maps,
//! plus exhaustive diagnostics on cylinders.

mod diagnostics;
mod maps;
mod permutation;
mod tree;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cantor::{CantorPoint, Word};
use crate::error::Result;

pub use diagnostics::{
    check_measure_preservation, density_profile, displacement_sup, estimate_density,
    exhaustive_depth_cap, modulus_probe, pushforward_counts, DensityProfile, DensityReport,
    MeasureReport, ModulusRow, ModulusTable, DEFAULT_EXHAUSTIVE_DEPTH, EXHAUSTIVE_DEPTH_ENV,
};
pub use maps::{Composite, Constant, Identity, SingleToggle, Translation, TreeMap};
pub use permutation::{
    cyclic_successor, dump_block_permutation, dump_involution, dyadic_odometer, WordPermutation,
};
pub use tree::{
    silver_tree, star_counts, star_priority_witness, star_priority_witnesses, witness_support,
    FiniteTree, TemplateSymbol, TemplateWord, MAX_TREE_DEPTH,
};

/// A continuous self-map of Cantor space with a declared information
/// depth: the first `k` output coordinates depend only on the first
/// `info_depth(k)` input coordinates.
pub trait SymbolicMap: Send + Sync {
    fn apply(&self, x: &CantorPoint) -> CantorPoint;
    fn info_depth(&self, k: usize) -> usize;
    fn descriptor(&self) -> MapDescriptor;

    /// First `k` output coordinates at `w 0 0 ...`.
    fn image_word(&self, w: &Word, k: usize) -> Word {
        self.apply(&CantorPoint::zero_tail(w)).first_bits(k)
    }
}

impl<T: SymbolicMap + ?Sized> SymbolicMap for Box<T> {
    fn apply(&self, x: &CantorPoint) -> CantorPoint {
        (**self).apply(x)
    }
    fn info_depth(&self, k: usize) -> usize {
        (**self).info_depth(k)
    }
    fn descriptor(&self) -> MapDescriptor {
        (**self).descriptor()
    }
    fn image_word(&self, w: &Word, k: usize) -> Word {
        (**self).image_word(w, k)
    }
}

impl<T: SymbolicMap + ?Sized> SymbolicMap for &T {
    fn apply(&self, x: &CantorPoint) -> CantorPoint {
        (**self).apply(x)
    }
    fn info_depth(&self, k: usize) -> usize {
        (**self).info_depth(k)
    }
    fn descriptor(&self) -> MapDescriptor {
        (**self).descriptor()
    }
    fn image_word(&self, w: &Word, k: usize) -> Word {
        (**self).image_word(w, k)
    }
}

/// Which block permutation a tree map uses off the witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeVersion {
    /// Cycle on the witness cylinders, dump involution elsewhere.
    Dump,
    /// Dyadic odometer along the witness's star coordinates.
    Odometer,
}

/// Serializable description of a map, sufficient to rebuild it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapDescriptor {
    Identity,
    Translation { r: u32 },
    SingleToggle { n: usize, r: u32 },
    Constant { point: CantorPoint },
    TreeMap { version: TreeVersion, tree: FiniteTree },
    SilverTreeMap { version: TreeVersion, a: BTreeSet<usize>, x: Word, max_depth: usize },
    Composite { maps: Vec<MapDescriptor> },
}

impl MapDescriptor {
    pub fn build(&self) -> Result<Box<dyn SymbolicMap>> {
        Ok(match self {
            MapDescriptor::Identity => Box::new(Identity),
            MapDescriptor::Translation { r } => {
                if *r >= 63 {
                    return Err(crate::Error::InvalidArgument("translation exponent too large".into()));
                }
                Box::new(Translation { r: *r })
            }
            MapDescriptor::SingleToggle { n, r } => Box::new(SingleToggle::new(*n, *r)?),
            MapDescriptor::Constant { point } => Box::new(Constant { point: point.clone() }),
            MapDescriptor::TreeMap { version, tree } => Box::new(TreeMap::new(tree.clone(), *version)?),
            MapDescriptor::SilverTreeMap { version, a, x, max_depth } => {
                Box::new(TreeMap::new(silver_tree(a, x, *max_depth)?, *version)?)
            }
            MapDescriptor::Composite { maps } => Box::new(Composite::new(
                maps.iter().map(|d| d.build()).collect::<Result<Vec<_>>>()?,
            )),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_round_trip() {
        let d: MapDescriptor = serde_json::from_str(r#"{"kind":"single_toggle","n":2,"r":3}"#).unwrap();
        assert_eq!(d, MapDescriptor::SingleToggle { n: 2, r: 3 });
        let f = d.build().unwrap();
        assert_eq!(f.descriptor(), d);
        let silver: MapDescriptor = serde_json::from_str(
            r#"{"kind":"silver_tree_map","version":"odometer","a":[0,2],"x":"101","max_depth":3}"#,
        )
        .unwrap();
        let g = silver.build().unwrap();
        assert!(matches!(g.descriptor(), MapDescriptor::TreeMap { .. }));
        assert!(serde_json::from_str::<MapDescriptor>(r#"{"kind":"warp"}"#).is_err());
    }
}
