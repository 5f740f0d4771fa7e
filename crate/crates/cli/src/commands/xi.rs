use serde::Serialize;

use sci_core::xi::{run_xi_tower, threshold_random, xi_exact, OracleKind, OracleSpec, XiSchedule};

use super::{Outcome, RunError};
use crate::config::{ExperimentConfig, Task, XiParams};
use crate::output::Artifacts;

#[derive(Serialize)]
struct InstanceRow {
    index: usize,
    label: String,
    m: usize,
    ground_truth: Option<bool>,
    value: bool,
    stable: bool,
    agrees: Option<bool>,
    flips: Vec<(usize, usize)>,
    queries: usize,
    trace_file: String,
}

#[derive(Serialize)]
struct Agreement {
    with_ground_truth: usize,
    agreeing: usize,
    rate: Option<f64>,
    /// Thresholded instances whose stable output disagreed with brute force.
    thresholded_mismatches: Vec<usize>,
}

#[derive(Serialize)]
struct XiReport<'a> {
    name: &'a str,
    task: Task,
    window: usize,
    stabilized: bool,
    agreement: Agreement,
    instances: Vec<InstanceRow>,
}

fn label(spec: &OracleSpec) -> String {
    serde_json::to_value(spec)
        .ok()
        .and_then(|v| v.get("kind").and_then(|k| k.as_str()).map(str::to_string))
        .unwrap_or_default()
}

pub fn run(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Outcome, RunError> {
    if cfg.task != Task::XiTower {
        return Err(RunError::config(format!("task {:?} is not handled by `sci xi`", cfg.task)));
    }
    let params: XiParams = cfg.params()?;
    let mut oracles = Vec::new();
    for spec in &params.instances {
        oracles.push((label(spec), spec.build(params.codec)?));
    }
    if let Some(b) = &params.batch {
        let seed = params.seed.unwrap_or(b.seed);
        for i in 0..b.count {
            oracles.push(("threshold_random".into(), threshold_random(b.m, b.clamp, seed + i as u64, params.codec)?));
        }
    }
    if oracles.is_empty() {
        return Err(RunError::config("parameters: give at least one entry in `instances` or a `batch`"));
    }

    let mut rows = Vec::new();
    let mut stabilized = true;
    let mut mismatches = Vec::new();
    for (index, (lbl, oracle)) in oracles.iter().enumerate() {
        let m = oracle.m();
        let schedule = match &params.levels {
            Some(levels) => XiSchedule { levels: levels.clone(), window: params.window },
            None => XiSchedule::uniform(m, params.max_index, params.window),
        };
        let r = run_xi_tower(oracle, m, &schedule)?;
        // Thresholded truth is recomputed by brute force through the matrix.
        let truth = match oracle.kind() {
            OracleKind::Thresholded { .. } => Some(xi_exact(oracle, m)?),
            _ => oracle.ground_truth(),
        };
        let agrees = truth.map(|t| t == r.value);
        if matches!(oracle.kind(), OracleKind::Thresholded { .. }) && r.stable && agrees == Some(false) {
            mismatches.push(index);
        }
        stabilized &= r.stable;
        let trace_file = format!("trace_{index:03}.csv");
        out.csv(&trace_file, &r.trace_csv())?;
        rows.push(InstanceRow {
            index,
            label: lbl.clone(),
            m,
            ground_truth: truth,
            value: r.value,
            stable: r.stable,
            agrees,
            flips: r.flip_points(),
            queries: r.queries,
            trace_file,
        });
    }

    let with_truth = rows.iter().filter(|r| r.agrees.is_some()).count();
    let agreeing = rows.iter().filter(|r| r.agrees == Some(true)).count();
    let report = XiReport {
        name: &cfg.name,
        task: cfg.task,
        window: params.window,
        stabilized,
        agreement: Agreement {
            with_ground_truth: with_truth,
            agreeing,
            rate: (with_truth > 0).then(|| agreeing as f64 / with_truth as f64),
            thresholded_mismatches: mismatches.clone(),
        },
        instances: rows,
    };
    out.json("result.json", &report)?;

    let mut table = String::from("index,label,m,ground_truth,value,stable,agrees\n");
    for r in &report.instances {
        let opt = |b: Option<bool>| b.map_or(String::new(), |b| u8::from(b).to_string());
        table.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.index,
            r.label,
            r.m,
            opt(r.ground_truth),
            u8::from(r.value),
            u8::from(r.stable),
            opt(r.agrees)
        ));
    }
    out.csv("agreement.csv", &table)?;

    let failed = if mismatches.is_empty() { Vec::new() } else { vec!["xi_thresholded_agreement".to_string()] };
    Ok(Outcome::combine(stabilized, failed))
}
