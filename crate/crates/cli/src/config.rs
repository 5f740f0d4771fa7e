//! Experiment configs: loading, schema checks and the canonical hash.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use sci_core::koopman::LowerNormMethod;
use sci_core::tower::{DictRule, N1Rule, Stabilization, TowerSchedule};
use sci_core::xi::{OracleSpec, TupleCodec};
use sci_core::{MapDescriptor, Norm, TreeVersion, Word};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<sci_core::Error> for ConfigError {
    fn from(e: sci_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Pseudospectrum,
    SigmaAp,
    GadgetCheck,
    XiTower,
    ReductionDemo,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: String,
    task: Task,
    #[serde(default)]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    parameters: Value,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub task: Task,
    pub output_dir: PathBuf,
    pub parameters: Value,
    /// sha256 of the canonical JSON, output directory excluded.
    pub hash: String,
}

fn default_norm() -> Norm {
    Norm::L2
}

/// Canonical form: keys sorted, no whitespace.
pub fn canonical_hash(v: &Value) -> String {
    // serde_json's map is ordered by key unless `preserve_order` is enabled.
    let text = serde_json::to_string(v).expect("values always serialize");
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl ExperimentConfig {
    pub fn load(path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let mut value: Value = serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("{}: invalid JSON: {e}", path.display())))?;
        // Only the decision-tower task draws random instances.
        let randomized = value.get("task").and_then(Value::as_str) == Some("xi_tower");
        if let (Some(s), true, Some(obj)) = (seed, randomized, value.as_object_mut()) {
            let params = obj.entry("parameters").or_insert_with(|| Value::Object(Default::default()));
            if let Some(p) = params.as_object_mut() {
                p.insert("seed".into(), Value::from(s));
            }
        }
        let raw: RawConfig = serde_json::from_value(value.clone()).map_err(|e| ConfigError(format!("config: {e}")))?;
        if let Some(obj) = value.as_object_mut() {
            obj.remove("output_dir");
        }
        let output_dir = out
            .map(Path::to_path_buf)
            .or(raw.output_dir)
            .unwrap_or_else(|| PathBuf::from("out").join(&raw.name));
        Ok(ExperimentConfig {
            name: raw.name,
            task: raw.task,
            output_dir,
            parameters: raw.parameters,
            hash: canonical_hash(&value),
        })
    }

    pub fn params<T: DeserializeOwned>(&self) -> Result<T, ConfigError> {
        serde_json::from_value(self.parameters.clone()).map_err(|e| ConfigError(format!("parameters: {e}")))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub map: MapDescriptor,
    #[serde(default = "default_norm")]
    pub p: Norm,
    /// Required for the pseudospectrum task.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Third-limit depth for the approximate point spectrum task.
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    pub n2: Vec<usize>,
    #[serde(default)]
    pub dict_depth: DictRule,
    #[serde(default)]
    pub n1_rule: N1Rule,
    #[serde(default = "default_sweep_steps")]
    pub sweep_steps: usize,
    #[serde(default)]
    pub stab: Stabilization,
    #[serde(default)]
    pub grid_cap: Option<f64>,
    #[serde(default)]
    pub method: LowerNormMethod,
    /// Resolution of the circle stand-in used for comparisons.
    #[serde(default = "default_circle_n")]
    pub circle_n: usize,
    #[serde(default = "default_r_max")]
    pub r_max: u32,
}

fn default_m_max() -> usize {
    4
}
fn default_sweep_steps() -> usize {
    4
}
fn default_circle_n() -> usize {
    64
}
fn default_r_max() -> u32 {
    8
}

impl SpectrumParams {
    pub fn schedule(&self) -> Result<TowerSchedule, ConfigError> {
        let s = TowerSchedule {
            n2: self.n2.clone(),
            dict_depth: self.dict_depth,
            n1_rule: self.n1_rule,
            sweep_steps: self.sweep_steps,
            stab: self.stab,
            grid_cap: self.grid_cap,
            method: self.method,
        };
        s.validate()?;
        if self.circle_n == 0 {
            return Err(ConfigError("parameters.circle_n must be positive".into()));
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    MeasurePreserving,
    OneLipschitz,
    BoundedDensity,
    DisplacementBound,
    CharacterEigenpairs,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadgetParams {
    pub map: MapDescriptor,
    /// Cylinder depth for the exhaustive checks.
    #[serde(default = "default_gadget_depth")]
    pub depth: usize,
    /// Invariants that must hold; defaults depend on the map kind.
    #[serde(default)]
    pub expect: Option<BTreeSet<Invariant>>,
}

fn default_gadget_depth() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiBatch {
    pub count: usize,
    pub m: usize,
    #[serde(rename = "T")]
    pub clamp: u64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiParams {
    #[serde(default)]
    pub codec: TupleCodec,
    #[serde(default = "default_window")]
    pub window: usize,
    /// Every level sweeps `1..=max_index` unless `levels` is given.
    #[serde(default = "default_max_index")]
    pub max_index: usize,
    #[serde(default)]
    pub levels: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub instances: Vec<OracleSpec>,
    #[serde(default)]
    pub batch: Option<XiBatch>,
    /// Overrides the batch seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_window() -> usize {
    3
}
fn default_max_index() -> usize {
    12
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionParams {
    /// Positions (0-based) pinned to `x`.
    pub a: BTreeSet<usize>,
    pub x: Word,
    pub max_depth: usize,
    #[serde(default = "default_version")]
    pub version: TreeVersion,
    #[serde(default = "default_red_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_norm")]
    pub p: Norm,
    /// Outer grid schedule.
    #[serde(default = "default_red_n2")]
    pub n2: Vec<usize>,
    #[serde(default = "default_red_cap")]
    pub grid_cap: f64,
    /// Defaults to twice the tree depth.
    #[serde(default)]
    pub dict_depth: Option<usize>,
    #[serde(default = "default_sweep_steps")]
    pub sweep_steps: usize,
    #[serde(default = "default_red_r_max")]
    pub r_max: u32,
    /// Target point as a fraction of a full turn.
    #[serde(default = "default_z0_turns")]
    pub z0_turns: f64,
    #[serde(default = "default_r_max")]
    pub approximant_r: u32,
}

fn default_version() -> TreeVersion {
    TreeVersion::Odometer
}
fn default_red_epsilon() -> f64 {
    0.1
}
fn default_red_n2() -> Vec<usize> {
    vec![24, 32, 48, 64]
}
fn default_red_cap() -> f64 {
    1.25
}
fn default_red_r_max() -> u32 {
    12
}
fn default_z0_turns() -> f64 {
    std::f64::consts::SQRT_2 - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_key_order_and_whitespace() {
        let a: Value = serde_json::from_str(r#"{"b":1,"a":[1,2]}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{ "a": [1, 2], "b": 1 }"#).unwrap();
        assert_eq!(canonical_hash(&a), canonical_hash(&b));
        assert_eq!(canonical_hash(&a).len(), 64);
    }

    #[test]
    fn unknown_parameter_is_rejected() {
        let v: Value = serde_json::from_str(r#"{"map":{"kind":"identity"},"n2":[4],"bogus":1}"#).unwrap();
        let err = serde_json::from_value::<SpectrumParams>(v).unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
    }
}
