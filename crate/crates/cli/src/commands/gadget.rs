use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::{json, Value};

use sci_core::dynamics::{
    check_measure_preservation, density_profile, displacement_sup, exhaustive_depth_cap, modulus_probe,
    star_counts, star_priority_witnesses, silver_tree, FiniteTree,
};
use sci_core::koopman::verify_character_eigenpair;
use sci_core::{Dyadic, MapDescriptor, SymbolicMap};

use super::{Outcome, RunError};
use crate::config::{ExperimentConfig, GadgetParams, Invariant, Task};
use crate::output::Artifacts;

const CHARACTER_TOL: f64 = 1e-12;

#[derive(Serialize)]
struct Check {
    name: Invariant,
    expected: bool,
    passed: bool,
    detail: Value,
}

#[derive(Serialize)]
struct GadgetReport<'a> {
    name: &'a str,
    task: Task,
    map: &'a MapDescriptor,
    depth: usize,
    exhaustive_cap: usize,
    checks: Vec<Check>,
    star_counts: Option<Vec<usize>>,
    witnesses: Option<Vec<Option<String>>>,
    failed: Vec<Invariant>,
}

fn default_expectations(map: &MapDescriptor) -> BTreeSet<Invariant> {
    use Invariant::*;
    match map {
        MapDescriptor::Identity => [MeasurePreserving, OneLipschitz, BoundedDensity].into(),
        MapDescriptor::Translation { .. } => {
            [MeasurePreserving, OneLipschitz, BoundedDensity, DisplacementBound, CharacterEigenpairs].into()
        }
        MapDescriptor::SingleToggle { .. } => [MeasurePreserving, BoundedDensity, DisplacementBound].into(),
        MapDescriptor::TreeMap { .. } | MapDescriptor::SilverTreeMap { .. } => [MeasurePreserving].into(),
        MapDescriptor::Constant { .. } | MapDescriptor::Composite { .. } => BTreeSet::new(),
    }
}

/// `(r, exhaustive depth)` for maps with a known displacement bound `2^-(r+1)`.
fn displacement_target(map: &MapDescriptor, depth: usize) -> Option<(u32, usize)> {
    match *map {
        MapDescriptor::Translation { r } => Some((r, depth.max(r as usize + 2))),
        MapDescriptor::SingleToggle { r, .. } => Some((r, 2 * r as usize + 4)),
        _ => None,
    }
}

fn tree_of(map: &MapDescriptor) -> Result<Option<FiniteTree>, RunError> {
    Ok(match map {
        MapDescriptor::TreeMap { tree, .. } => Some(tree.clone()),
        MapDescriptor::SilverTreeMap { a, x, max_depth, .. } => Some(silver_tree(a, x, *max_depth)?),
        _ => None,
    })
}

pub fn run(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Outcome, RunError> {
    if cfg.task != Task::GadgetCheck {
        return Err(RunError::config(format!("task {:?} is not handled by `sci gadget`", cfg.task)));
    }
    let params: GadgetParams = cfg.params()?;
    if params.depth == 0 {
        return Err(RunError::config("parameters.depth must be positive"));
    }
    let expect = params.expect.clone().unwrap_or_else(|| default_expectations(&params.map));
    let disp = displacement_target(&params.map, params.depth);
    if expect.contains(&Invariant::DisplacementBound) && disp.is_none() {
        return Err(RunError::config("displacement_bound only applies to translation and single_toggle maps"));
    }
    if expect.contains(&Invariant::CharacterEigenpairs) && !matches!(params.map, MapDescriptor::Translation { .. }) {
        return Err(RunError::config("character_eigenpairs only applies to translation maps"));
    }
    let f = params.map.build()?;
    let f: &dyn SymbolicMap = f.as_ref();
    let cap = exhaustive_depth_cap();
    let d = params.depth;
    let mut checks = Vec::new();

    let mp = check_measure_preservation(f, d, cap)?;
    checks.push(Check {
        name: Invariant::MeasurePreserving,
        expected: expect.contains(&Invariant::MeasurePreserving),
        passed: mp.preserving,
        detail: json!({ "depth": d, "input_depth": mp.input_depth, "max_deviation": mp.max_deviation.to_string() }),
    });

    let modulus = modulus_probe(f, d, cap)?;
    checks.push(Check {
        name: Invariant::OneLipschitz,
        expected: expect.contains(&Invariant::OneLipschitz),
        passed: modulus.is_one_lipschitz(),
        detail: json!({ "depth": modulus.depth, "rows": modulus.rows, "violations": modulus.violations() }),
    });

    let depths: Vec<usize> = (1..=d).collect();
    let density = density_profile(f, &depths, cap)?;
    checks.push(Check {
        name: Invariant::BoundedDensity,
        expected: expect.contains(&Invariant::BoundedDensity),
        passed: !density.unbounded_suspected,
        detail: json!({
            "sup_ratio": density.reports.iter().map(|r| r.sup_ratio.to_string()).collect::<Vec<_>>(),
            "inf_ratio": density.reports.iter().map(|r| r.inf_ratio.to_string()).collect::<Vec<_>>(),
        }),
    });

    if let Some((r, depth)) = disp {
        let sup = displacement_sup(f, depth, cap)?;
        let bound = Dyadic::pow2_neg(r as i32 + 1);
        checks.push(Check {
            name: Invariant::DisplacementBound,
            expected: expect.contains(&Invariant::DisplacementBound),
            passed: sup <= bound,
            detail: json!({ "depth": depth, "sup_displacement": sup.to_string(), "bound": bound.to_string() }),
        });
    }

    if let MapDescriptor::Translation { r } = params.map {
        let m_hi = (r as usize + 4).min(12);
        let mut worst = 0.0_f64;
        let mut cases = 0usize;
        for m in r as usize + 1..=m_hi {
            for k in 0..1u64 << m {
                worst = worst.max(verify_character_eigenpair(r, m, k)?);
                cases += 1;
            }
        }
        checks.push(Check {
            name: Invariant::CharacterEigenpairs,
            expected: expect.contains(&Invariant::CharacterEigenpairs),
            passed: worst <= CHARACTER_TOL,
            detail: json!({ "m_range": [r + 1, m_hi as u32], "cases": cases, "max_deviation": worst, "tol": CHARACTER_TOL }),
        });
    }

    let tree = tree_of(&params.map)?;
    let failed: Vec<Invariant> = checks.iter().filter(|c| c.expected && !c.passed).map(|c| c.name).collect();
    let report = GadgetReport {
        name: &cfg.name,
        task: cfg.task,
        map: &params.map,
        depth: d,
        exhaustive_cap: cap,
        star_counts: tree.as_ref().map(star_counts),
        witnesses: tree
            .as_ref()
            .map(|t| star_priority_witnesses(t).into_iter().map(|w| w.map(|w| w.to_string())).collect()),
        checks,
        failed: failed.clone(),
    };
    out.json("result.json", &report)?;

    let mut csv = String::from("invariant,expected,passed\n");
    for c in &report.checks {
        let name = serde_json::to_value(c.name).unwrap();
        csv.push_str(&format!("{},{},{}\n", name.as_str().unwrap(), c.expected, c.passed));
    }
    out.csv("checks.csv", &csv)?;

    let names = failed
        .iter()
        .map(|i| serde_json::to_value(i).unwrap().as_str().unwrap().to_string())
        .collect();
    Ok(Outcome::combine(true, names))
}
