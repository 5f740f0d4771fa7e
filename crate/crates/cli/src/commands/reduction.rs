use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use sci_core::dynamics::{silver_tree, star_counts, star_priority_witnesses, TreeMap};
use sci_core::koopman::{assemble_section, cycle_decomposition, exact_cycle_spectrum, predicted_spectrum_tree};
use sci_core::spectral_sets::{directed_distance, dyadic_root_approximant, hausdorff_distance, roots_of_unity};
use sci_core::tower::{run_pseudospectrum_tower, DictRule, N1Rule, Stabilization, TowerSchedule, TowerTrace};
use sci_core::koopman::LowerNormMethod;
use sci_core::{SpectralSet, SymbolicMap, TreeVersion};

use super::{Outcome, RunError};
use crate::config::{ExperimentConfig, ReductionParams, Task};
use crate::output::{Artifacts, Layer};

/// Largest dictionary depth the demo will assemble.
const MAX_DICT_DEPTH: usize = 20;
const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Serialize)]
struct ApproximantRow {
    r: u32,
    lambda: [f64; 2],
    error: f64,
    bound: f64,
    within_bound: bool,
    in_prediction: bool,
}

#[derive(Serialize)]
struct ReductionReport<'a> {
    name: &'a str,
    task: Task,
    version: TreeVersion,
    max_depth: usize,
    free_positions: usize,
    star_counts: Vec<usize>,
    witnesses: Vec<Option<String>>,
    dict_depth: usize,
    /// Cycle length -> number of cycles in the depth-`dict_depth` section.
    cycle_lengths: BTreeMap<usize, usize>,
    predicted: &'a SpectralSet,
    section_spectrum: &'a SpectralSet,
    top_roots_order: usize,
    top_roots_in_prediction: bool,
    epsilon: f64,
    mesh: f64,
    stabilized: bool,
    tower_set: &'a SpectralSet,
    hausdorff_tower_to_prediction: f64,
    tower_matches_prediction: bool,
    z0: [f64; 2],
    approximants: Vec<ApproximantRow>,
    failed: &'a [String],
    trace: &'a TowerTrace,
}

pub fn run(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Outcome, RunError> {
    if cfg.task != Task::ReductionDemo {
        return Err(RunError::config(format!("task {:?} is not handled by `sci reduction`", cfg.task)));
    }
    let params: ReductionParams = cfg.params()?;
    let m_top = params.max_depth;
    if m_top == 0 {
        return Err(RunError::config("parameters.max_depth must be positive"));
    }
    let d = params.dict_depth.unwrap_or(2 * m_top);
    if d == 0 || d > MAX_DICT_DEPTH {
        return Err(RunError::config(format!("dictionary depth {d} outside 1..={MAX_DICT_DEPTH}")));
    }
    if !(params.epsilon > 0.0) || !(params.grid_cap > 0.0) {
        return Err(RunError::config("need epsilon > 0 and grid_cap > 0"));
    }

    let tree = silver_tree(&params.a, &params.x, m_top)?;
    let ks = star_counts(&tree);
    let witnesses = star_priority_witnesses(&tree).into_iter().map(|w| w.map(|w| w.to_string())).collect();
    let free = m_top - params.a.range(..m_top).count();
    let f = TreeMap::new(tree.clone(), params.version)?;

    let sec = assemble_section(&f, d, f.info_depth(d))?;
    let cycles = cycle_decomposition(&sec)?;
    let mut cycle_lengths = BTreeMap::new();
    for l in cycles.lengths() {
        *cycle_lengths.entry(l).or_insert(0) += 1;
    }
    let lengths: Vec<usize> = cycle_lengths.keys().copied().collect();
    let section_spectrum = exact_cycle_spectrum(&lengths)?;
    let predicted = predicted_spectrum_tree(&tree, params.version, params.r_max)?;

    let k_top = ks.last().copied().unwrap_or(0);
    let top_order = 1usize << (k_top as u32).min(params.r_max);
    let top_in = directed_distance(&roots_of_unity(top_order)?, &predicted) <= MEMBERSHIP_TOL;

    let schedule = TowerSchedule {
        n2: params.n2.clone(),
        dict_depth: DictRule::Fixed { depth: d },
        n1_rule: N1Rule::Sweep,
        sweep_steps: params.sweep_steps,
        stab: Stabilization::default(),
        grid_cap: Some(params.grid_cap),
        method: LowerNormMethod::Auto,
    };
    schedule.validate()?;
    let tower = run_pseudospectrum_tower(&f, params.epsilon, params.p, &schedule)?;
    let d_h = hausdorff_distance(&tower.final_set, &predicted);
    let matches = d_h <= params.epsilon + tower.mesh;

    let z0 = Complex64::from_polar(1.0, 2.0 * PI * params.z0_turns);
    let mut approximants = Vec::new();
    for r in 1..=params.approximant_r {
        let (lambda, bound) = dyadic_root_approximant(z0, r)?;
        let error = (lambda - z0).norm();
        approximants.push(ApproximantRow {
            r,
            lambda: [lambda.re, lambda.im],
            error,
            bound,
            within_bound: error <= bound,
            in_prediction: predicted.distance_to(lambda) <= MEMBERSHIP_TOL,
        });
    }

    let mut failed = Vec::new();
    if k_top < free {
        failed.push("star_count_lower_bound".to_string());
    }
    if !top_in {
        failed.push("prediction_contains_top_roots".to_string());
    }
    if !matches {
        failed.push("tower_matches_prediction".to_string());
    }
    if approximants.iter().any(|a| !a.within_bound) {
        failed.push("approximant_error_bound".to_string());
    }

    out.json(
        "result.json",
        &ReductionReport {
            name: &cfg.name,
            task: cfg.task,
            version: params.version,
            max_depth: m_top,
            free_positions: free,
            star_counts: ks,
            witnesses,
            dict_depth: d,
            cycle_lengths,
            predicted: &predicted,
            section_spectrum: &section_spectrum,
            top_roots_order: top_order,
            top_roots_in_prediction: top_in,
            epsilon: params.epsilon,
            mesh: tower.mesh,
            stabilized: tower.stabilized,
            tower_set: &tower.final_set,
            hausdorff_tower_to_prediction: d_h,
            tower_matches_prediction: matches,
            z0: [z0.re, z0.im],
            approximants,
            failed: &failed,
            trace: &tower.trace,
        },
    )?;
    out.csv("residuals.csv", &tower.final_field.to_csv())?;
    out.svg(
        "spectrum.svg",
        &[
            Layer { label: "tower output", set: &tower.final_set, color: "#1f5fbf", radius: 1.6 },
            Layer { label: "prediction", set: &predicted, color: "#d04020", radius: 2.6 },
        ],
    )?;
    Ok(Outcome::combine(tower.stabilized, failed))
}
