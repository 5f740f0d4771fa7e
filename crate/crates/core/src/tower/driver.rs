//! Two-index pseudospectrum towers and the approximate point spectrum tower.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cantor::Norm;
use crate::dynamics::{exhaustive_depth_cap, modulus_probe, ModulusTable, SymbolicMap};
use crate::error::{Error, Result};
use crate::koopman::{assemble_section, FiniteSection, LowerNormEvaluator, LowerNormMethod};
use crate::spectral_sets::{decreasing_limit_diagnostic, hausdorff_distance, DecreasingLimitReport, SpectralSet};

use super::field::{gamma_set, residual_field_with, ResidualField};
use super::grid::SpectralGrid;

/// How the dictionary depth follows the outer index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DictRule {
    /// Same depth at every stage.
    Fixed { depth: usize },
    /// Depth equals the grid index.
    Grid,
    /// `min(n2, depth)`.
    Capped { depth: usize },
}

impl Default for DictRule {
    fn default() -> Self {
        DictRule::Capped { depth: 6 }
    }
}

impl DictRule {
    pub fn depth(&self, n2: usize) -> usize {
        match *self {
            DictRule::Fixed { depth } => depth,
            DictRule::Grid => n2,
            DictRule::Capped { depth } => n2.min(depth),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum N1Rule {
    /// `n1 = dictionary depth`, only for certified 1-Lipschitz maps.
    OneIndex,
    /// Inner sweep over `n1` until stabilization or budget.
    #[default]
    Sweep,
}

/// Empirical stabilization: `K` consecutive changes of at most `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stabilization {
    #[serde(rename = "K")]
    pub k: usize,
    pub tol: f64,
}

impl Default for Stabilization {
    fn default() -> Self {
        Stabilization { k: 3, tol: 1e-9 }
    }
}

fn default_sweep_steps() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerSchedule {
    pub n2: Vec<usize>,
    #[serde(default)]
    pub dict_depth: DictRule,
    #[serde(default)]
    pub n1_rule: N1Rule,
    /// Inner sweep budget: number of `n1` values tried per outer step.
    #[serde(default = "default_sweep_steps")]
    pub sweep_steps: usize,
    #[serde(default)]
    pub stab: Stabilization,
    /// Grid truncation radius; defaults to `||K|| + epsilon + 1`.
    #[serde(default)]
    pub grid_cap: Option<f64>,
    #[serde(default)]
    pub method: LowerNormMethod,
}

impl TowerSchedule {
    pub fn new(n2: Vec<usize>) -> Self {
        TowerSchedule {
            n2,
            dict_depth: DictRule::default(),
            n1_rule: N1Rule::default(),
            sweep_steps: default_sweep_steps(),
            stab: Stabilization::default(),
            grid_cap: None,
            method: LowerNormMethod::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n2.is_empty() {
            return Err(Error::InvalidArgument("empty n2 schedule".into()));
        }
        if self.n2[0] == 0 || self.n2.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("n2 schedule must be positive and strictly increasing".into()));
        }
        if self.stab.k == 0 || !(self.stab.tol >= 0.0) {
            return Err(Error::InvalidArgument("stabilization needs K >= 1 and tol >= 0".into()));
        }
        if self.sweep_steps == 0 {
            return Err(Error::InvalidArgument("sweep budget must be positive".into()));
        }
        if let Some(c) = self.grid_cap {
            if !(c > 0.0) {
                return Err(Error::InvalidArgument("grid cap must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Quadrature depth for the collapsed one-index tower. Refuses unless the
/// probed modulus is 1-Lipschitz down to the requested depth.
pub fn one_index_schedule(table: &ModulusTable, dict_depth: usize) -> Result<usize> {
    if table.depth < dict_depth {
        return Err(Error::Uncertified(format!(
            "modulus probed to depth {}, need {dict_depth}",
            table.depth
        )));
    }
    if !table.is_one_lipschitz() {
        return Err(Error::Uncertified(format!(
            "contraction fails at input levels {:?}",
            table.violations().iter().map(|r| r.input_level).collect::<Vec<_>>()
        )));
    }
    Ok(dict_depth)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerStage {
    pub n2: usize,
    pub dict_depth: usize,
    pub n1: usize,
    pub set: SpectralSet,
    pub placeholder: bool,
    pub threshold: f64,
    pub grid_points: usize,
    /// Point evaluations of the map at this stage.
    pub queries: usize,
    pub guard_excluded: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerTrace {
    pub stages: Vec<TowerStage>,
    /// Per outer step: did the inner sweep stabilize.
    pub inner_stable: Vec<bool>,
    pub outer_stable: bool,
    /// The one-index rule was requested but refused.
    pub one_index_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerResult {
    pub final_set: SpectralSet,
    pub mesh: f64,
    pub epsilon: f64,
    pub trace: TowerTrace,
    pub final_field: ResidualField,
    pub stabilized: bool,
}

struct Engine<'a> {
    f: &'a dyn SymbolicMap,
    p: Norm,
    schedule: &'a TowerSchedule,
    fields: HashMap<(usize, usize, usize, bool, u64), Arc<ResidualField>>,
    /// `(d, n1) -> (section, operator norm, evaluator)`; shared across grids.
    sections: HashMap<(usize, usize), Arc<(FiniteSection, f64, LowerNormEvaluator)>>,
    certificate: Option<std::result::Result<ModulusTable, String>>,
}

impl<'a> Engine<'a> {
    fn new(f: &'a dyn SymbolicMap, p: Norm, schedule: &'a TowerSchedule) -> Self {
        Engine { f, p, schedule, fields: HashMap::new(), sections: HashMap::new(), certificate: None }
    }

    fn certificate(&mut self) -> std::result::Result<&ModulusTable, String> {
        if self.certificate.is_none() {
            // Probe down to the information depth so that moves hidden
            // below the dictionary depth are still caught.
            let depth = self
                .schedule
                .n2
                .iter()
                .map(|&n| {
                    let d = self.schedule.dict_depth.depth(n);
                    d.max(self.f.info_depth(d))
                })
                .max()
                .unwrap_or(0);
            self.certificate =
                Some(modulus_probe(self.f, depth, exhaustive_depth_cap()).map_err(|e| e.to_string()));
        }
        self.certificate.as_ref().unwrap().as_ref().map_err(|e| e.clone())
    }

    fn field(&mut self, d: usize, n1: usize, n2: usize, cap: Option<f64>, slack: f64) -> Result<Arc<ResidualField>> {
        let key = (d, n1, n2, cap.is_some(), cap.unwrap_or(slack).to_bits());
        if let Some(f) = self.fields.get(&key) {
            return Ok(f.clone());
        }
        let entry = match self.sections.get(&(d, n1)) {
            Some(e) => e.clone(),
            None => {
                let sec = assemble_section(self.f, d, n1)?.without_query_log();
                let norm = sec.operator_norm(self.p);
                let ev = LowerNormEvaluator::new(&sec, self.p, self.schedule.method)?;
                let e = Arc::new((sec, norm, ev));
                self.sections.insert((d, n1), e.clone());
                e
            }
        };
        let (sec, norm, ev) = &*entry;
        let cap = cap.unwrap_or(norm + slack + 1.0);
        let grid = SpectralGrid::truncated(n2, Some(cap))?;
        let field = Arc::new(residual_field_with(sec, ev, self.p, &grid));
        self.fields.insert(key, field.clone());
        Ok(field)
    }

    /// `slack` sizes the default grid cap; it is `epsilon` for a single
    /// tower and a fixed bound when several towers share fields.
    fn run(&mut self, epsilon: f64, slack: f64) -> Result<TowerResult> {
        let s = self.schedule;
        s.validate()?;
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        let mut stages = Vec::new();
        let mut inner_stable = Vec::new();
        let mut outer: Vec<SpectralSet> = Vec::new();
        let mut thresholds = Vec::new();
        let mut fallback = false;
        let mut last_field = None;
        for &n2 in &s.n2 {
            let d = s.dict_depth.depth(n2);
            let base = d.max(self.f.info_depth(d));
            let mut n1s: Vec<usize> = (base..base + s.sweep_steps).collect();
            let mut collapsed = false;
            if s.n1_rule == N1Rule::OneIndex {
                match self.certificate().and_then(|t| one_index_schedule(t, d).map_err(|e| e.to_string())) {
                    Ok(n1) => {
                        n1s = vec![n1.max(base)];
                        collapsed = true;
                    }
                    Err(_) => fallback = true,
                }
            }
            let mut sets: Vec<SpectralSet> = Vec::new();
            let mut stable = collapsed;
            for n1 in n1s {
                let field = self.field(d, n1, n2, s.grid_cap, slack)?;
                let g = gamma_set(&field, epsilon, n2)?;
                stages.push(TowerStage {
                    n2,
                    dict_depth: d,
                    n1,
                    set: g.set.clone(),
                    placeholder: g.placeholder,
                    threshold: g.threshold,
                    grid_points: field.grid.len(),
                    queries: 1 << n1,
                    guard_excluded: g.guard_excluded,
                    exact: field.exact,
                });
                sets.push(g.set);
                last_field = Some(field);
                if !collapsed && trailing_stable(&sets, s.stab, None) {
                    stable = true;
                    break;
                }
            }
            inner_stable.push(stable);
            thresholds.push(stages.last().map_or(0.0, |st: &TowerStage| st.threshold));
            outer.push(sets.pop().expect("at least one inner stage"));
        }
        let outer_stable = trailing_stable(&outer, s.stab, Some(&thresholds));
        let final_set = outer.pop().expect("nonempty schedule");
        let final_field = (*last_field.expect("at least one stage")).clone();
        let stabilized = outer_stable && inner_stable.iter().all(|&b| b);
        Ok(TowerResult {
            mesh: final_field.grid.mesh(),
            final_set,
            epsilon,
            trace: TowerTrace { stages, inner_stable, outer_stable, one_index_fallback: fallback },
            final_field,
            stabilized,
        })
    }
}

/// The last `K` consecutive changes are within `tol`. With `thresholds`,
/// each change may also use the two sets' resolutions plus the shift of the
/// threshold between them, which is what a converging outer limit moves by.
fn trailing_stable(sets: &[SpectralSet], stab: Stabilization, thresholds: Option<&[f64]>) -> bool {
    if sets.len() < stab.k + 1 {
        return false;
    }
    let start = sets.len() - stab.k - 1;
    (start..sets.len() - 1).all(|i| {
        let (a, b) = (&sets[i], &sets[i + 1]);
        let slack = thresholds.map_or(0.0, |t| a.resolution() + b.resolution() + (t[i + 1] - t[i]).abs());
        hausdorff_distance(a, b) <= stab.tol + slack
    })
}

/// Outer sweep over `n2`, inner sweep over `n1`, returning the last set.
pub fn run_pseudospectrum_tower(
    f: &dyn SymbolicMap,
    epsilon: f64,
    p: Norm,
    schedule: &TowerSchedule,
) -> Result<TowerResult> {
    Engine::new(f, p, schedule).run(epsilon, epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaApResult {
    /// `A_m` for `epsilon_m = 1/m`, `m = 1..=m_max`.
    pub sets: Vec<SpectralSet>,
    pub final_set: SpectralSet,
    pub runs: Vec<TowerTrace>,
    pub diagnostic: DecreasingLimitReport,
    pub stabilized: bool,
    /// Residual field behind the last set.
    pub final_field: ResidualField,
}

/// Pseudospectrum towers at `epsilon_m = 1/m`; residual fields are shared
/// between levels.
pub fn run_sigma_ap_tower(
    f: &dyn SymbolicMap,
    p: Norm,
    schedule: &TowerSchedule,
    m_max: usize,
) -> Result<SigmaApResult> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("need m_max >= 1".into()));
    }
    let mut engine = Engine::new(f, p, schedule);
    let mut sets = Vec::new();
    let mut runs = Vec::new();
    let mut stabilized = true;
    let mut final_field = None;
    for m in 1..=m_max {
        let r = engine.run(1.0 / m as f64, 1.0)?;
        stabilized &= r.stabilized;
        sets.push(r.final_set);
        runs.push(r.trace);
        final_field = Some(r.final_field);
    }
    let diagnostic = decreasing_limit_diagnostic(&sets)?;
    Ok(SigmaApResult {
        final_set: sets.last().unwrap().clone(),
        sets,
        runs,
        diagnostic,
        stabilized,
        final_field: final_field.expect("m_max >= 1"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{FiniteTree, Identity, Translation, TreeMap, TreeVersion};
    use num_complex::Complex64;

    #[test]
    fn identity_tower_collapses_to_one() {
        let mut s = TowerSchedule::new(vec![4, 8, 16, 32]);
        s.n1_rule = N1Rule::OneIndex;
        let r = run_pseudospectrum_tower(&Identity, 0.3, Norm::L2, &s).unwrap();
        assert!(!r.trace.one_index_fallback);
        assert!(r.trace.stages.iter().all(|st| st.n1 == st.dict_depth));
        let one = SpectralSet::singleton(Complex64::new(1.0, 0.0));
        assert!(crate::spectral_sets::directed_distance(&one, &r.final_set) <= r.mesh);
        assert!(r.final_set.points().iter().all(|z| (z - 1.0).norm() < 0.3));
    }

    #[test]
    fn dump_map_refuses_one_index() {
        let f = TreeMap::new(FiniteTree::full(3).unwrap(), TreeVersion::Dump).unwrap();
        let mut s = TowerSchedule::new(vec![8]);
        s.dict_depth = DictRule::Fixed { depth: 3 };
        s.n1_rule = N1Rule::OneIndex;
        let r = run_pseudospectrum_tower(&f, 0.3, Norm::L2, &s).unwrap();
        assert!(r.trace.one_index_fallback);
        assert!(r.trace.stages.len() > 1);
    }

    #[test]
    fn schedules_are_validated() {
        let s = TowerSchedule::new(vec![4, 4]);
        assert!(run_pseudospectrum_tower(&Identity, 0.3, Norm::L2, &s).is_err());
        let s = TowerSchedule::new(vec![]);
        assert!(run_pseudospectrum_tower(&Identity, 0.3, Norm::L2, &s).is_err());
    }

    #[test]
    fn inner_sweep_stabilizes_for_translation() {
        let mut s = TowerSchedule::new(vec![8]);
        s.dict_depth = DictRule::Fixed { depth: 2 };
        let r = run_pseudospectrum_tower(&Translation { r: 0 }, 0.3, Norm::L2, &s).unwrap();
        assert_eq!(r.trace.inner_stable, vec![true]);
        assert_eq!(r.trace.stages.len(), 4);
        let ns: Vec<usize> = r.trace.stages.iter().map(|st| st.n1).collect();
        assert_eq!(ns, vec![2, 3, 4, 5]);
    }
}
