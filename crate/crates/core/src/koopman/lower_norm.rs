//! Lower norms `inf_{||g|| = 1} ||(K - z) g||` of finite sections.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cantor::Norm;
use crate::error::{Error, Result};

use super::section::FiniteSection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerNormMethod {
    /// `cycle_exact` on permutation sections, else `svd` for `p = 2`,
    /// else `heuristic`.
    #[default]
    Auto,
    /// Smallest singular value of the weighted residual matrix (`p = 2`).
    Svd,
    /// Closed forms over the cycles of a permutation section.
    CycleExact,
    /// Multistart descent; an upper bound, exact when the section has one
    /// row per cylinder.
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerNorm {
    pub value: f64,
    pub method: LowerNormMethod,
    /// `false` when the value is only an upper bound.
    pub exact: bool,
}

/// Tuning for the heuristic solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Random sphere samples added when the dictionary has at most 8 cylinders.
    pub sphere_samples: usize,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig { starts: 4, iterations: 150, seed: 0, sphere_samples: 2000 }
    }
}

/// Precomputed data for evaluating the lower norm at many `z`.
#[derive(Debug, Clone)]
pub struct LowerNormEvaluator {
    p: Norm,
    method: LowerNormMethod,
    n: usize,
    /// `(image, source, weight / cylinder mass)`.
    rows: Vec<(usize, usize, f64)>,
    induced: Option<Vec<u32>>,
    cycle_lengths: Vec<usize>,
    heuristic: HeuristicConfig,
}

impl LowerNormEvaluator {
    pub fn new(sec: &FiniteSection, p: Norm, method: LowerNormMethod) -> Result<Self> {
        Self::with_heuristic(sec, p, method, HeuristicConfig::default())
    }

    pub fn with_heuristic(
        sec: &FiniteSection,
        p: Norm,
        method: LowerNormMethod,
        heuristic: HeuristicConfig,
    ) -> Result<Self> {
        let method = match method {
            LowerNormMethod::Auto if sec.is_permutation() => LowerNormMethod::CycleExact,
            LowerNormMethod::Auto if p == Norm::L2 => LowerNormMethod::Svd,
            LowerNormMethod::Auto => LowerNormMethod::Heuristic,
            m => m,
        };
        if method == LowerNormMethod::Svd && p != Norm::L2 {
            return Err(Error::NotApplicable { method: "svd", reason: format!("requires p = 2, got p = {p}") });
        }
        if method == LowerNormMethod::CycleExact && !sec.is_permutation() {
            return Err(Error::NotApplicable {
                method: "cycle_exact",
                reason: "section is not a permutation of cylinders".into(),
            });
        }
        let mass = sec.cylinder_mass();
        let rows = sec
            .rows()
            .into_iter()
            .map(|r| {
                let ratio = r.weight.checked_div(mass).expect("cylinder mass is a power of two");
                (r.image as usize, r.source as usize, ratio.to_f64())
            })
            .collect();
        let cycle_lengths = if sec.is_permutation() {
            let lens: BTreeSet<usize> = super::section::cycle_decomposition(sec)?.lengths().into_iter().collect();
            lens.into_iter().collect()
        } else {
            Vec::new()
        };
        Ok(LowerNormEvaluator {
            p,
            method,
            n: sec.dictionary_size(),
            rows,
            induced: sec.induced_map().map(|m| m.to_vec()),
            cycle_lengths,
            heuristic,
        })
    }

    /// The method actually used after resolving `auto`.
    pub fn method(&self) -> LowerNormMethod {
        self.method
    }

    pub fn eval(&self, z: Complex64) -> LowerNorm {
        match self.method {
            LowerNormMethod::CycleExact => LowerNorm {
                value: self
                    .cycle_lengths
                    .iter()
                    .map(|&l| cycle_lower_norm(l, z, self.p))
                    .fold(f64::INFINITY, f64::min),
                method: self.method,
                exact: true,
            },
            LowerNormMethod::Svd => LowerNorm { value: self.svd(z), method: self.method, exact: true },
            LowerNormMethod::Heuristic => self.heuristic(z),
            LowerNormMethod::Auto => unreachable!("resolved at construction"),
        }
    }

    /// Weighted residual matrix `W^{1/2} R D^{-1/2}`, one row per merged row.
    pub fn residual_matrix(&self, z: Complex64) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.rows.len(), self.n, Complex64::new(0.0, 0.0));
        for (i, &(a, c, w)) in self.rows.iter().enumerate() {
            let s = w.sqrt();
            m[(i, a)] += s;
            m[(i, c)] -= z * s;
        }
        m
    }

    fn svd(&self, z: Complex64) -> f64 {
        if self.rows.len() < self.n {
            return 0.0;
        }
        let sv = self.residual_matrix(z).singular_values();
        sv.iter().copied().fold(f64::INFINITY, f64::min).max(0.0)
    }

    /// Square matrix `g -> g∘pi - z g` of the induced cylinder map.
    fn square_matrix(&self, induced: &[u32], z: Complex64) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.n, self.n, Complex64::new(0.0, 0.0));
        for (c, &a) in induced.iter().enumerate() {
            m[(c, a as usize)] += Complex64::new(1.0, 0.0);
            m[(c, c)] -= z;
        }
        m
    }

    fn heuristic(&self, z: Complex64) -> LowerNorm {
        if let Some(induced) = &self.induced {
            // One row per cylinder with equal weights: the lower norm is
            // 1 / ||T^{-1}|| in the plain p-norm.
            let t = self.square_matrix(induced, z);
            let value = match self.p {
                Norm::L2 => t.singular_values().iter().copied().fold(f64::INFINITY, f64::min),
                _ => match t.try_inverse() {
                    None => 0.0,
                    Some(inv) => 1.0 / induced_norm(&inv, self.p),
                },
            };
            return LowerNorm { value, method: LowerNormMethod::Heuristic, exact: true };
        }
        let mut best = f64::INFINITY;
        let mut rng = ChaCha8Rng::seed_from_u64(self.heuristic.seed);
        let mut starts: Vec<Vec<Complex64>> = (0..self.n)
            .map(|c| {
                let mut e = vec![Complex64::new(0.0, 0.0); self.n];
                e[c] = Complex64::new(1.0, 0.0);
                e
            })
            .collect();
        starts.push(vec![Complex64::new(1.0, 0.0); self.n]);
        for _ in 0..self.heuristic.starts {
            starts.push(random_vector(&mut rng, self.n));
        }
        for g in &starts {
            best = best.min(self.ratio(g, z));
        }
        // Descend from the most promising few starts.
        let mut ranked: Vec<(f64, usize)> = starts.iter().enumerate().map(|(i, g)| (self.ratio(g, z), i)).collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(_, i) in ranked.iter().take(self.heuristic.starts.max(1)) {
            best = best.min(self.descend(starts[i].clone(), z));
        }
        if self.n <= 8 {
            best = best.min(self.sphere_sampling(z, self.heuristic.sphere_samples, self.heuristic.seed ^ 0x5eed));
        }
        LowerNorm { value: best, method: LowerNormMethod::Heuristic, exact: false }
    }

    /// `||Rg|| / ||g||` in the weighted norms.
    pub fn ratio(&self, g: &[Complex64], z: Complex64) -> f64 {
        let num = match self.p {
            Norm::L1 => self.rows.iter().map(|&(a, c, w)| w * (g[a] - z * g[c]).norm()).sum::<f64>(),
            Norm::L2 => self
                .rows
                .iter()
                .map(|&(a, c, w)| w * (g[a] - z * g[c]).norm_sqr())
                .sum::<f64>()
                .sqrt(),
            Norm::LInf => self.rows.iter().map(|&(a, c, _)| (g[a] - z * g[c]).norm()).fold(0.0, f64::max),
        };
        let den = vector_norm(g, self.p);
        if den == 0.0 {
            f64::INFINITY
        } else {
            num / den
        }
    }

    fn descend(&self, mut g: Vec<Complex64>, z: Complex64) -> f64 {
        normalize(&mut g, self.p);
        let mut best = self.ratio(&g, z);
        let mut step = 0.5;
        for _ in 0..self.heuristic.iterations {
            let grad = self.subgradient(&g, z);
            let gn = grad.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if gn < 1e-14 {
                break;
            }
            let trial: Vec<Complex64> = g.iter().zip(&grad).map(|(x, d)| x - d * (step / gn)).collect();
            let mut trial = trial;
            if vector_norm(&trial, self.p) == 0.0 {
                step *= 0.5;
                continue;
            }
            normalize(&mut trial, self.p);
            let val = self.ratio(&trial, z);
            if val < best {
                best = val;
                g = trial;
                step *= 1.2;
            } else {
                step *= 0.5;
                if step < 1e-10 {
                    break;
                }
            }
        }
        best
    }

    /// A subgradient of `||Rg||` at a normalized `g`, projected against the
    /// radial direction.
    fn subgradient(&self, g: &[Complex64], z: Complex64) -> Vec<Complex64> {
        let mut d = vec![Complex64::new(0.0, 0.0); self.n];
        let unit = |v: Complex64| if v.norm() > 0.0 { v / v.norm() } else { Complex64::new(0.0, 0.0) };
        match self.p {
            Norm::L1 | Norm::L2 => {
                for &(a, c, w) in &self.rows {
                    let v = g[a] - z * g[c];
                    let s = if self.p == Norm::L1 { w * unit(v) } else { w * v };
                    d[a] += s;
                    d[c] -= z.conj() * s;
                }
            }
            Norm::LInf => {
                if let Some(&(a, c, _)) = self
                    .rows
                    .iter()
                    .max_by(|x, y| (g[x.0] - z * g[x.1]).norm().total_cmp(&(g[y.0] - z * g[y.1]).norm()))
                {
                    let s = unit(g[a] - z * g[c]);
                    d[a] += s;
                    d[c] -= z.conj() * s;
                }
            }
        }
        d
    }

    /// Minimum of the ratio over random points of the unit sphere.
    pub fn sphere_sampling(&self, z: Complex64, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| self.ratio(&random_vector(&mut rng, self.n), z))
            .fold(f64::INFINITY, f64::min)
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Plain (unweighted) vector norm; the dictionary weights are uniform.
fn vector_norm(g: &[Complex64], p: Norm) -> f64 {
    match p {
        Norm::L1 => g.iter().map(|v| v.norm()).sum(),
        Norm::L2 => g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
        Norm::LInf => g.iter().map(|v| v.norm()).fold(0.0, f64::max),
    }
}

fn normalize(g: &mut [Complex64], p: Norm) {
    let n = vector_norm(g, p);
    g.iter_mut().for_each(|v| *v /= n);
}

/// Induced `p -> p` matrix norm for `p = 1` (max column sum) and
/// `p = inf` (max row sum).
fn induced_norm(m: &DMatrix<Complex64>, p: Norm) -> f64 {
    match p {
        Norm::L1 => (0..m.ncols())
            .map(|j| m.column(j).iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max),
        Norm::LInf => (0..m.nrows())
            .map(|i| m.row(i).iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max),
        Norm::L2 => m.singular_values().iter().copied().fold(0.0, f64::max),
    }
}

/// Lower norm of `S - z` for the cyclic shift `S` on `L` points.
///
/// For `p = 2`, `S` is unitary and the value is the distance from `z` to the
/// `L`-th roots of unity. For `p = 1` and `p = inf`, the resolvent
/// `(S - z)^{-1} = (1 - z^L)^{-1} sum_k z^(L-1-k) S^k` has disjoint
/// supports, giving `|1 - z^L| / sum_{k<L} |z|^k`.
pub fn cycle_lower_norm(l: usize, z: Complex64, p: Norm) -> f64 {
    assert!(l >= 1, "cycle length must be positive");
    match p {
        Norm::L2 => {
            let turns = z.arg() / (2.0 * PI) * l as f64;
            let j = turns.round();
            (z - Complex64::from_polar(1.0, 2.0 * PI * j / l as f64)).norm()
        }
        Norm::L1 | Norm::LInf => {
            let r = z.norm();
            let lf = l as f64;
            if (r - 1.0).abs() < 1e-12 {
                return (Complex64::new(1.0, 0.0) - z.powu(l as u32)).norm() / lf;
            }
            if r < 1.0 {
                let num = (Complex64::new(1.0, 0.0) - z.powf(lf)).norm();
                num * (1.0 - r) / (1.0 - r.powf(lf))
            } else {
                let w = z.inv();
                let num = (Complex64::new(1.0, 0.0) - w.powf(lf)).norm();
                num * (r - 1.0) / (1.0 - r.powf(-lf))
            }
        }
    }
}

/// One-shot lower norm at a single `z`.
pub fn lower_norm(sec: &FiniteSection, z: Complex64, p: Norm, method: LowerNormMethod) -> Result<LowerNorm> {
    Ok(LowerNormEvaluator::new(sec, p, method)?.eval(z))
}
