//! Concrete symbolic maps.

use std::collections::BTreeSet;

use crate::cantor::{CantorPoint, Word};
use crate::error::{Error, Result};

use super::permutation::{dump_block_permutation, dyadic_odometer, WordPermutation};
use super::tree::{star_priority_witnesses, witness_support, FiniteTree, TemplateWord};
use super::{MapDescriptor, SymbolicMap, TreeVersion};

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl SymbolicMap for Identity {
    fn apply(&self, x: &CantorPoint) -> CantorPoint {
        x.clone()
    }
    fn info_depth(&self, k: usize) -> usize {
        k
    }
    fn descriptor(&self) -> MapDescriptor {
        MapDescriptor::Identity
    }
}

/// 2-adic translation `y -> y + 2^r`.
#[derive(Debug, Clone, Copy)]
pub struct Translation {
    pub r: u32,
}

impl SymbolicMap for Translation {
    fn apply(&self, x: &CantorPoint) -> CantorPoint {
        x.translate_pow2(self.r)
    }
    fn info_depth(&self, k: usize) -> usize {
        k
    }
    fn descriptor(&self) -> MapDescriptor {
        MapDescriptor::Translation { r: self.r }
    }
}

/// Translation by `2^r` on the tail of the block `1^(n-1) 0`, identity
/// elsewhere.
#[derive(Debug, Clone)]
pub struct SingleToggle {
    pub n: usize,
    pub r: u32,
    marker: Word,
}

impl SingleToggle {
    pub fn new(n: usize, r: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("block index starts at 1".into()));
        }
        if r >= 63 {
            return Err(Error::InvalidArgument("translation exponent too large".into()));
        }
        Ok(SingleToggle { n, r, marker: Word::block_marker(n) })
    }
}

impl SymbolicMap for SingleToggle {
    fn apply(&self, x: &CantorPoint) -> CantorPoint {
        if x.first_bits(self.n) != self.marker {
            return x.clone();
        }
        x.shift(self.n).translate_pow2(self.r).prepend(&self.marker)
    }
    fn info_depth(&self, k: usize) -> usize {
        k
    }
    fn descriptor(&self) -> MapDescriptor {
        MapDescriptor::SingleToggle { n: self.n, r: self.r }
    }
}

/// The constant map onto a fixed point.
#[derive(Debug, Clone)]
pub struct Constant {
    pub point: CantorPoint,
}

impl SymbolicMap for Constant {
    fn apply(&self, _x: &CantorPoint) -> CantorPoint {
        self.point.clone()
    }
    fn info_depth(&self, _k: usize) -> usize {
        0
    }
    fn descriptor(&self) -> MapDescriptor {
        MapDescriptor::Constant { point: self.point.clone() }
    }
}

/// Tree-driven block map: on `Y_m = [1^(m-1) 0]` with `m <= max_depth`
/// only coordinates `m+1 ..= 2m` move, by a permutation of `2^m` read off
/// the tree at level `m`. The all-ones point and deeper blocks are fixed.
#[derive(Debug, Clone)]
pub struct TreeMap {
    tree: FiniteTree,
    version: TreeVersion,
    witnesses: Vec<Option<TemplateWord>>,
    blocks: Vec<WordPermutation>,
}

impl TreeMap {
    pub fn new(tree: FiniteTree, version: TreeVersion) -> Result<Self> {
        let witnesses = star_priority_witnesses(&tree);
        let mut blocks = vec![WordPermutation::identity(0)];
        for (m, u) in witnesses.iter().enumerate().skip(1) {
            let perm = match version {
                TreeVersion::Dump => dump_block_permutation(m, &witness_support(u))?,
                TreeVersion::Odometer => match u {
                    Some(t) => dyadic_odometer(m, t)?,
                    None => WordPermutation::identity(m),
                },
            };
            blocks.push(perm);
        }
        Ok(TreeMap { tree, version, witnesses, blocks })
    }

    pub fn tree(&self) -> &FiniteTree {
        &self.tree
    }

    pub fn version(&self) -> TreeVersion {
        self.version
    }

    pub fn witnesses(&self) -> &[Option<TemplateWord>] {
        &self.witnesses
    }

    /// The permutation of block `m` (`1 <= m <= max_depth`).
    pub fn block(&self, m: usize) -> &WordPermutation {
        &self.blocks[m]
    }

    /// `P_m(S)` as used by block `m`.
    pub fn support(&self, m: usize) -> BTreeSet<Word> {
        witness_support(&self.witnesses[m])
    }
}

impl SymbolicMap for TreeMap {
    fn apply(&self, x: &CantorPoint) -> CantorPoint {
        let m = match x.first_zero() {
            Some(m) if m <= self.tree.max_depth() => m,
            _ => return x.clone(),
        };
        let label = x.shift(m).first_bits(m);
        let image = self.blocks[m].apply(&label);
        x.with_prefix(&Word::block_marker(m).concat(&image))
    }

    fn info_depth(&self, k: usize) -> usize {
        match self.version {
            // Odometer blocks only carry towards later coordinates.
            TreeVersion::Odometer => k,
            TreeVersion::Dump => {
                let top = k.saturating_sub(1).min(self.tree.max_depth());
                k.max(2 * top)
            }
        }
    }

    fn descriptor(&self) -> MapDescriptor {
        MapDescriptor::TreeMap { version: self.version, tree: self.tree.clone() }
    }
}

/// `maps[last] ∘ ... ∘ maps[0]`.
pub struct Composite {
    maps: Vec<Box<dyn SymbolicMap>>,
}

impl Composite {
    pub fn new(maps: Vec<Box<dyn SymbolicMap>>) -> Self {
        Composite { maps }
    }
}

impl SymbolicMap for Composite {
    fn apply(&self, x: &CantorPoint) -> CantorPoint {
        self.maps.iter().fold(x.clone(), |acc, f| f.apply(&acc))
    }
    fn info_depth(&self, k: usize) -> usize {
        self.maps.iter().rev().fold(k, |acc, f| f.info_depth(acc))
    }
    fn descriptor(&self) -> MapDescriptor {
        MapDescriptor::Composite { maps: self.maps.iter().map(|f| f.descriptor()).collect() }
    }
}
