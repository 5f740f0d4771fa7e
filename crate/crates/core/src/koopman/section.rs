//! Finite sections of the Koopman operator on cylinder dictionaries.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{CantorPoint, Dyadic, Quadrature, Word};
use crate::dynamics::SymbolicMap;
use crate::error::{Error, Result};

/// Largest quadrature depth accepted when sampling a section.
pub const MAX_QUAD_DEPTH: usize = 24;

/// Action of `g -> g ∘ F` on depth-`dict_depth` cylinder indicators,
/// sampled at the depth-`quad_depth` quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSection {
    dict_depth: usize,
    quad_depth: usize,
    /// Node rank -> rank of the dictionary cylinder containing `F(node)`.
    action: Vec<u32>,
    weights: Vec<Dyadic>,
    query_log: Vec<CantorPoint>,
    /// Cylinder-level map, when every node of a cylinder lands in the same
    /// image cylinder.
    induced: Option<Vec<u32>>,
    is_permutation: bool,
}

/// One merged residual row `g[image] - z g[source]` with its total weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectionRow {
    pub image: u32,
    pub source: u32,
    pub weight: Dyadic,
}

/// Checked assembly: requires `quad_depth >= max(dict_depth, L(dict_depth))`.
pub fn assemble_section<F: SymbolicMap + ?Sized>(
    f: &F,
    dict_depth: usize,
    quad_depth: usize,
) -> Result<FiniteSection> {
    let required = dict_depth.max(f.info_depth(dict_depth));
    if quad_depth < required {
        return Err(Error::InsufficientResolution { n1: quad_depth, required });
    }
    sample_section(f, dict_depth, quad_depth)
}

/// Assembly from point evaluations alone; consults nothing but `F(node)`.
pub fn sample_section<F: SymbolicMap + ?Sized>(
    f: &F,
    dict_depth: usize,
    quad_depth: usize,
) -> Result<FiniteSection> {
    if quad_depth < dict_depth {
        return Err(Error::InsufficientResolution { n1: quad_depth, required: dict_depth });
    }
    if quad_depth > MAX_QUAD_DEPTH {
        return Err(Error::InvalidArgument(format!("quadrature depth above {MAX_QUAD_DEPTH}")));
    }
    let weight = Dyadic::pow2_neg(quad_depth as i32);
    let evaluated: Vec<(CantorPoint, u32)> = (0..1u64 << quad_depth)
        .into_par_iter()
        .map(|i| {
            let x = CantorPoint::zero_tail(&Word::from_index(i, quad_depth));
            let image = f.apply(&x).first_bits(dict_depth).index() as u32;
            (x, image)
        })
        .collect();
    let (query_log, action): (Vec<_>, Vec<_>) = evaluated.into_iter().unzip();
    let shift = quad_depth - dict_depth;
    let per_cylinder = 1usize << shift;
    let induced: Option<Vec<u32>> = action
        .chunks(per_cylinder)
        .map(|c| c.iter().all(|&a| a == c[0]).then_some(c[0]))
        .collect();
    let is_permutation = induced.as_ref().is_some_and(|m| {
        let mut seen = vec![false; m.len()];
        m.iter().all(|&j| !std::mem::replace(&mut seen[j as usize], true))
    });
    Ok(FiniteSection {
        dict_depth,
        quad_depth,
        weights: vec![weight; action.len()],
        action,
        query_log,
        induced,
        is_permutation,
    })
}

impl FiniteSection {
    pub fn dict_depth(&self) -> usize {
        self.dict_depth
    }

    pub fn quad_depth(&self) -> usize {
        self.quad_depth
    }

    /// Number of dictionary functions, `2^dict_depth`.
    pub fn dictionary_size(&self) -> usize {
        1 << self.dict_depth
    }

    pub fn node_count(&self) -> usize {
        self.action.len()
    }

    pub fn action(&self) -> &[u32] {
        &self.action
    }

    pub fn weights(&self) -> &[Dyadic] {
        &self.weights
    }

    /// Dictionary cylinder containing node `p`.
    pub fn node_cylinder(&self, p: usize) -> u32 {
        (p >> (self.quad_depth - self.dict_depth)) as u32
    }

    pub fn induced_map(&self) -> Option<&[u32]> {
        self.induced.as_deref()
    }

    pub fn is_permutation(&self) -> bool {
        self.is_permutation
    }

    /// Points at which the map was evaluated, in node order.
    pub fn query_log(&self) -> &[CantorPoint] {
        &self.query_log
    }

    /// Drop the recorded query points to save memory on cached sections.
    pub fn without_query_log(mut self) -> Self {
        self.query_log = Vec::new();
        self
    }

    pub fn quadrature(&self) -> Quadrature {
        Quadrature::new(self.quad_depth)
    }

    /// Mass of a dictionary cylinder under the quadrature.
    pub fn cylinder_mass(&self) -> Dyadic {
        Dyadic::pow2_neg(self.dict_depth as i32)
    }

    /// Nodes with equal `(image, source)` merged, weights added exactly.
    pub fn rows(&self) -> Vec<SectionRow> {
        let mut pairs: Vec<(u32, u32)> = (0..self.action.len())
            .map(|p| (self.node_cylinder(p), self.action[p]))
            .collect();
        pairs.sort_unstable();
        let mut rows: Vec<SectionRow> = Vec::new();
        for (source, image) in pairs {
            match rows.last_mut() {
                Some(r) if r.source == source && r.image == image => r.weight = r.weight + self.weights[0],
                _ => rows.push(SectionRow { image, source, weight: self.weights[0] }),
            }
        }
        rows
    }

    /// Pushforward mass of each dictionary cylinder under the quadrature.
    pub fn pushforward_masses(&self) -> Vec<Dyadic> {
        let mut out = vec![Dyadic::ZERO; self.dictionary_size()];
        for (&a, &w) in self.action.iter().zip(&self.weights) {
            out[a as usize] = out[a as usize] + w;
        }
        out
    }

    /// Operator norm of the section on the weighted `L^2` dictionary space.
    pub fn operator_norm_l2(&self) -> f64 {
        let m = self.cylinder_mass().to_f64();
        self.pushforward_masses()
            .iter()
            .map(|pf| (pf.to_f64() / m).sqrt())
            .fold(0.0, f64::max)
    }

    /// Operator norm bound for the given exponent (exact for `p = 2`).
    pub fn operator_norm(&self, p: crate::cantor::Norm) -> f64 {
        let m = self.cylinder_mass().to_f64();
        match p {
            crate::cantor::Norm::L2 => self.operator_norm_l2(),
            crate::cantor::Norm::L1 => self
                .pushforward_masses()
                .iter()
                .map(|pf| pf.to_f64() / m)
                .fold(0.0, f64::max),
            crate::cantor::Norm::LInf => 1.0,
        }
    }

    /// Weighted dictionary-to-section format rows for export.
    pub fn csv_rows(&self) -> Vec<(Word, Word, i128, i32)> {
        (0..self.action.len())
            .map(|p| {
                let w = self.weights[p];
                (
                    Word::from_index(p as u64, self.quad_depth),
                    Word::from_index(self.action[p] as u64, self.dict_depth),
                    w.mantissa(),
                    w.exponent(),
                )
            })
            .collect()
    }

    /// Section CSV: `node_word,image_cylinder_word,weight_numerator,weight_exponent`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("node_word,image_cylinder_word,weight_numerator,weight_exponent\n");
        for (node, img, num, exp) in self.csv_rows() {
            s.push_str(&format!("{node},{img},{num},{exp}\n"));
        }
        s
    }
}

/// `v_P = g[action(P)] - z g[cyl(P)]` at every node.
pub fn residual_values(sec: &FiniteSection, g: &[Complex64], z: Complex64) -> Result<Vec<Complex64>> {
    if g.len() != sec.dictionary_size() {
        return Err(Error::LengthMismatch { expected: sec.dictionary_size(), got: g.len() });
    }
    Ok((0..sec.node_count())
        .map(|p| g[sec.action[p] as usize] - z * g[sec.node_cylinder(p) as usize])
        .collect())
}

/// Node values of a dictionary function.
pub fn dictionary_values(sec: &FiniteSection, g: &[Complex64]) -> Result<Vec<Complex64>> {
    if g.len() != sec.dictionary_size() {
        return Err(Error::LengthMismatch { expected: sec.dictionary_size(), got: g.len() });
    }
    Ok((0..sec.node_count()).map(|p| g[sec.node_cylinder(p) as usize]).collect())
}

/// Cycles of a permutation section, each listed from its smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleDecomposition {
    pub depth: usize,
    pub cycles: Vec<Vec<Word>>,
}

impl CycleDecomposition {
    pub fn lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }
}

pub fn cycle_decomposition(sec: &FiniteSection) -> Result<CycleDecomposition> {
    let perm = match (sec.is_permutation, &sec.induced) {
        (true, Some(p)) => p,
        _ => {
            return Err(Error::NotApplicable {
                method: "cycle_decomposition",
                reason: "section is not a permutation of cylinders".into(),
            })
        }
    };
    let mut seen = vec![false; perm.len()];
    let mut cycles = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(Word::from_index(i as u64, sec.dict_depth));
            i = perm[i] as usize;
        }
        cycles.push(cycle);
    }
    Ok(CycleDecomposition { depth: sec.dict_depth, cycles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Constant, FiniteTree, Identity, Translation, TreeMap, TreeVersion};

    #[test]
    fn translation_section_is_one_cycle() {
        let sec = assemble_section(&Translation { r: 0 }, 3, 3).unwrap();
        assert!(sec.is_permutation());
        let cyc = cycle_decomposition(&sec).unwrap();
        assert_eq!(cyc.lengths(), vec![8]);
        assert_eq!(sec.query_log().len(), 8);
    }

    #[test]
    fn translation_by_higher_power_splits() {
        let sec = assemble_section(&Translation { r: 1 }, 3, 5).unwrap();
        let mut lens = cycle_decomposition(&sec).unwrap().lengths();
        lens.sort();
        assert_eq!(lens, vec![4, 4]);
        assert_eq!(sec.rows().len(), 8);
        assert_eq!(sec.rows()[0].weight, Dyadic::pow2_neg(3));
    }

    #[test]
    fn resolution_checked_against_info_depth() {
        let f = TreeMap::new(FiniteTree::full(3).unwrap(), TreeVersion::Dump).unwrap();
        assert!(matches!(
            assemble_section(&f, 3, 3),
            Err(Error::InsufficientResolution { required: 4, .. })
        ));
        assert!(assemble_section(&f, 3, 4).is_ok());
        assert!(assemble_section(&Identity, 3, 2).is_err());
    }

    #[test]
    fn constant_section_is_not_permutation() {
        let sec = assemble_section(&Constant { point: CantorPoint::all_zeros() }, 2, 2).unwrap();
        assert!(!sec.is_permutation());
        assert!(sec.induced_map().is_some());
        assert!(cycle_decomposition(&sec).is_err());
        assert_eq!(sec.pushforward_masses()[0], Dyadic::ONE);
        assert!((sec.operator_norm_l2() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn residuals_and_csv() {
        let sec = assemble_section(&Identity, 1, 2).unwrap();
        let g = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        let v = residual_values(&sec, &g, Complex64::new(1.0, 0.0)).unwrap();
        assert!(v.iter().all(|x| x.norm() == 0.0));
        assert!(residual_values(&sec, &g[..1], Complex64::new(0.0, 0.0)).is_err());
        let csv = sec.to_csv();
        assert!(csv.starts_with("node_word,image_cylinder_word,weight_numerator,weight_exponent\n00,0,1,2\n"));
    }
}
