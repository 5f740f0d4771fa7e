use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn sci(sub: &str, config: &Value, dir: &Path, extra: &[&str]) -> (Output, PathBuf) {
    let cfg = dir.join(format!("{sub}-config.json"));
    std::fs::write(&cfg, serde_json::to_string_pretty(config).unwrap()).unwrap();
    let out = dir.join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_sci"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .expect("binary runs");
    (output, out)
}

fn result(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("result.json")).unwrap()).unwrap()
}

fn identity_config() -> Value {
    json!({
        "name": "identity",
        "task": "pseudospectrum",
        "parameters": { "map": {"kind": "identity"}, "epsilon": 0.3, "n2": [4, 8, 16, 32], "n1_rule": "one_index" }
    })
}

#[test]
fn identity_writes_all_artifacts() {
    let tmp = TempDir::new().unwrap();
    let (o, out) = sci("spectrum", &identity_config(), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["result.json", "residuals.csv", "spectrum.svg"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let r = result(&out);
    assert!(!r["final_set"]["points"].as_array().unwrap().is_empty());
    assert_eq!(r["stabilized"], true);
}

#[test]
fn every_file_carries_hash_and_versions() {
    let tmp = TempDir::new().unwrap();
    let (_, out) = sci("spectrum", &identity_config(), tmp.path(), &[]);
    let r = result(&out);
    let hash = r["config_hash"].as_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    assert!(r["versions"]["sci_core"].is_string());
    for f in ["residuals.csv", "spectrum.svg"] {
        let text = std::fs::read_to_string(out.join(f)).unwrap();
        assert!(text.contains(&hash), "{f} lacks the config hash");
        assert!(text.contains("sci_core="), "{f} lacks versions");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let (_, out_a) = sci("spectrum", &identity_config(), a.path(), &[]);
    let (_, out_b) = sci("spectrum", &identity_config(), b.path(), &["--threads", "2"]);
    for f in ["result.json", "residuals.csv", "spectrum.svg"] {
        assert_eq!(std::fs::read(out_a.join(f)).unwrap(), std::fs::read(out_b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn translation_sigma_ap_reports_circle_distance() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "name": "tau1",
        "task": "sigma_ap",
        "parameters": { "map": {"kind": "translation", "r": 1}, "m_max": 3, "n2": [8, 16, 24, 32] }
    });
    let (o, out) = sci("spectrum", &cfg, tmp.path(), &[]);
    assert!(o.status.code() == Some(0) || o.status.code() == Some(2));
    let r = result(&out);
    let d = r["comparison"]["hausdorff_to_circle_grid"].as_f64().unwrap();
    assert!(d.is_finite() && d >= 0.0);
    assert_eq!(r["sets"].as_array().unwrap().len(), 3);
}

#[test]
fn invalid_config_exits_one_with_diagnostic() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = identity_config();
    cfg["parameters"]["epsilonn"] = json!(0.3);
    let (o, _) = sci("spectrum", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilonn"));

    let (o, _) = sci("gadget", &identity_config(), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1), "task mismatch must be a config error");

    let mut cfg = identity_config();
    cfg["parameters"]["n2"] = json!([8, 4]);
    let (o, _) = sci("spectrum", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn toggle_gadget_checks_displacement_bound() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "name": "toggle",
        "task": "gadget_check",
        "parameters": { "map": {"kind": "single_toggle", "n": 3, "r": 5} }
    });
    let (o, out) = sci("gadget", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(&out);
    let check = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "displacement_bound").unwrap().clone();
    assert_eq!(check["detail"]["bound"], "1/2^6");
    assert_eq!(check["detail"]["depth"], 14);
    assert_eq!(check["passed"], true);
}

#[test]
fn tree_gadget_emits_star_counts() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "name": "tree",
        "task": "gadget_check",
        "parameters": {
            "map": { "kind": "tree_map", "version": "odometer",
                     "tree": { "max_depth": 2, "levels": { "1": ["0", "1"], "2": ["00", "01", "10", "11"] } } },
            "depth": 6
        }
    });
    let (o, out) = sci("gadget", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(result(&out)["star_counts"], json!([1, 2]));
}

#[test]
fn failing_invariant_is_named() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "name": "constant",
        "task": "gadget_check",
        "parameters": { "map": {"kind": "constant", "point": "|0"}, "depth": 4, "expect": ["measure_preserving"] }
    });
    let (o, out) = sci("gadget", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("measure_preserving"));
    assert_eq!(result(&out)["failed"], json!(["measure_preserving"]));
}

#[test]
fn xi_thresholded_batch_agrees_with_brute_force() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "name": "xi-batch",
        "task": "xi_tower",
        "parameters": { "max_index": 10, "batch": { "count": 30, "m": 2, "T": 4, "seed": 3 } }
    });
    let (o, out) = sci("xi", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(&out);
    assert_eq!(r["agreement"]["with_ground_truth"], 30);
    assert_eq!(r["agreement"]["rate"], 1.0);
    assert!(out.join("agreement.csv").exists());
}

#[test]
fn xi_seed_override_changes_instances() {
    let cfg = json!({
        "name": "xi-seed",
        "task": "xi_tower",
        "parameters": { "max_index": 8, "batch": { "count": 6, "m": 3, "T": 3 } }
    });
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let (_, out_a) = sci("xi", &cfg, a.path(), &["--seed", "1"]);
    let (_, out_b) = sci("xi", &cfg, b.path(), &["--seed", "2"]);
    assert_ne!(result(&out_a)["config_hash"], result(&out_b)["config_hash"]);
}

#[test]
fn xi_delayed_flip_appears_in_trace() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "name": "xi-delayed",
        "task": "xi_tower",
        "parameters": { "max_index": 12, "instances": [ { "kind": "delayed", "m": 2, "flip_index": 7 } ] }
    });
    let (o, out) = sci("xi", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    let trace = std::fs::read_to_string(out.join("trace_000.csv")).unwrap();
    assert!(trace.lines().any(|l| l == "1,7,1,1"), "{trace}");
    assert_eq!(result(&out)["instances"][0]["flips"], json!([[1, 7]]));
}

#[test]
fn xi_constant_zero_is_zero() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "name": "xi-zero",
        "task": "xi_tower",
        "parameters": { "instances": [ { "kind": "constant", "m": 1, "value": false } ] }
    });
    let (o, out) = sci("xi", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(result(&out)["instances"][0]["value"], false);
}

#[test]
fn reduction_five_free_positions_contains_u32() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "name": "silver",
        "task": "reduction_demo",
        "parameters": { "a": [1, 3, 5], "x": "01010101", "max_depth": 8 }
    });
    let (o, out) = sci("reduction", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(&out);
    assert_eq!(r["free_positions"], 5);
    assert_eq!(r["top_roots_order"], 32);
    assert_eq!(r["top_roots_in_prediction"], true);
    assert_eq!(r["tower_matches_prediction"], true);
    let rows = r["approximants"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|a| a["within_bound"] == true));
}

#[test]
fn reduction_single_branch_predicts_one() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "name": "branch",
        "task": "reduction_demo",
        "parameters": { "a": [0, 1, 2, 3, 4], "x": "01101", "max_depth": 5, "version": "odometer" }
    });
    let (o, out) = sci("reduction", &cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(&out);
    assert_eq!(r["predicted"]["points"], json!([[1.0, 0.0]]));
    assert_eq!(r["tower_matches_prediction"], true);
}
