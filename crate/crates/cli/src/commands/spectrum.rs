use serde::Serialize;

use sci_core::koopman::predicted_spectrum;
use sci_core::spectral_sets::{circle_grid, hausdorff_distance, DecreasingLimitReport};
use sci_core::tower::{run_pseudospectrum_tower, run_sigma_ap_tower, TowerTrace};
use sci_core::{Norm, SpectralSet};

use super::{Outcome, RunError};
use crate::config::{ExperimentConfig, SpectrumParams, Task};
use crate::output::{Artifacts, Layer};

#[derive(Serialize)]
struct Comparison {
    circle_n: usize,
    hausdorff_to_circle_grid: f64,
    prediction: Option<SpectralSet>,
    hausdorff_to_prediction: Option<f64>,
}

#[derive(Serialize)]
struct PseudospectrumReport<'a> {
    name: &'a str,
    task: Task,
    stabilized: bool,
    epsilon: f64,
    p: Norm,
    mesh: f64,
    final_set: &'a SpectralSet,
    comparison: Comparison,
    trace: &'a TowerTrace,
}

#[derive(Serialize)]
struct SigmaApReport<'a> {
    name: &'a str,
    task: Task,
    stabilized: bool,
    p: Norm,
    epsilons: Vec<f64>,
    sets: &'a [SpectralSet],
    final_set: &'a SpectralSet,
    diagnostic: &'a DecreasingLimitReport,
    comparison: Comparison,
    runs: &'a [TowerTrace],
}

fn compare(params: &SpectrumParams, set: &SpectralSet) -> Result<Comparison, RunError> {
    let circle = circle_grid(params.circle_n)?;
    let prediction = predicted_spectrum(&params.map, params.circle_n, params.r_max)?;
    Ok(Comparison {
        circle_n: params.circle_n,
        hausdorff_to_circle_grid: hausdorff_distance(set, &circle),
        hausdorff_to_prediction: prediction.as_ref().map(|p| hausdorff_distance(set, p)),
        prediction,
    })
}

pub fn run(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Outcome, RunError> {
    let params: SpectrumParams = cfg.params()?;
    let schedule = params.schedule()?;
    let f = params.map.build()?;
    match cfg.task {
        Task::Pseudospectrum => {
            let epsilon = params
                .epsilon
                .filter(|e| *e > 0.0)
                .ok_or_else(|| RunError::config("parameters.epsilon: a positive value is required"))?;
            let r = run_pseudospectrum_tower(f.as_ref(), epsilon, params.p, &schedule)?;
            let comparison = compare(&params, &r.final_set)?;
            out.json(
                "result.json",
                &PseudospectrumReport {
                    name: &cfg.name,
                    task: cfg.task,
                    stabilized: r.stabilized,
                    epsilon,
                    p: params.p,
                    mesh: r.mesh,
                    final_set: &r.final_set,
                    comparison,
                    trace: &r.trace,
                },
            )?;
            out.csv("residuals.csv", &r.final_field.to_csv())?;
            plot(out, &params, &r.final_set)?;
            Ok(if r.stabilized { Outcome::Stable } else { Outcome::Unstable })
        }
        Task::SigmaAp => {
            let r = run_sigma_ap_tower(f.as_ref(), params.p, &schedule, params.m_max)?;
            let comparison = compare(&params, &r.final_set)?;
            out.json(
                "result.json",
                &SigmaApReport {
                    name: &cfg.name,
                    task: cfg.task,
                    stabilized: r.stabilized,
                    p: params.p,
                    epsilons: (1..=params.m_max).map(|m| 1.0 / m as f64).collect(),
                    sets: &r.sets,
                    final_set: &r.final_set,
                    diagnostic: &r.diagnostic,
                    comparison,
                    runs: &r.runs,
                },
            )?;
            out.csv("residuals.csv", &r.final_field.to_csv())?;
            plot(out, &params, &r.final_set)?;
            Ok(if r.stabilized { Outcome::Stable } else { Outcome::Unstable })
        }
        other => Err(RunError::config(format!("task {other:?} is not handled by `sci spectrum`"))),
    }
}

fn plot(out: &mut Artifacts, params: &SpectrumParams, set: &SpectralSet) -> Result<(), RunError> {
    let prediction = predicted_spectrum(&params.map, params.circle_n, params.r_max)?;
    let mut layers = vec![Layer { label: "tower output", set, color: "#1f5fbf", radius: 1.6 }];
    if let Some(p) = &prediction {
        layers.push(Layer { label: "prediction", set: p, color: "#d04020", radius: 2.6 });
    }
    out.svg("spectrum.svg", &layers)?;
    Ok(())
}
