//! Experiment configuration: strict JSON schema, dotted-path overrides,
//! and the resolved-config hash stamped into every metadata sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use orbiforest::forest::ForestBuilder;
use orbiforest::group::{GroupKind, GroupSpec};
use orbiforest::indist::IndistObservable;

use crate::CliError;

pub const DEFAULT_VERTEX_CAP: usize = 2_000_000;
pub const DEFAULT_POP_CAP: u64 = 1_000_000_000;
pub const DEFAULT_PATH_CAP: u64 = 1_000_000;

pub fn builder_name(b: ForestBuilder) -> &'static str {
    match b {
        ForestBuilder::Lerw => "lerw",
        ForestBuilder::Stacks => "stacks",
    }
}

/// A percolation-parameter grid: either explicit points or a range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Points(Vec<f64>),
    Range(GridRange),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let pts = match self {
            GridSpec::Points(v) => v.clone(),
            GridSpec::Range(r) => {
                if !r.step.is_finite() || r.step <= 0.0 {
                    return Err(CliError::config("p_grid.step must be positive"));
                }
                let mut v = Vec::new();
                let mut i = 0u32;
                loop {
                    let p = r.start + r.step * f64::from(i);
                    if p > r.stop + 1e-9 {
                        break;
                    }
                    v.push((p * 1e9).round() / 1e9);
                    i += 1;
                }
                v
            }
        };
        if pts.is_empty() {
            return Err(CliError::config("p_grid is empty"));
        }
        for w in pts.windows(2) {
            if w[0] >= w[1] {
                return Err(CliError::config("p_grid must be strictly increasing"));
            }
        }
        if pts[0] < 0.0 || *pts.last().expect("nonempty") > 1.0 {
            return Err(CliError::config("p_grid must lie within [0, 1]"));
        }
        Ok(pts)
    }
}

fn d_trials() -> u64 {
    100
}
fn d_delta() -> f64 {
    0.05
}
fn d_alpha() -> f64 {
    0.05
}
fn d_vertex_cap() -> usize {
    DEFAULT_VERTEX_CAP
}
fn d_pop_cap() -> u64 {
    DEFAULT_POP_CAP
}
fn d_path_cap() -> u64 {
    DEFAULT_PATH_CAP
}
fn d_resample() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupKind,
    pub generators: Vec<String>,
    #[serde(default)]
    pub radius: Option<u32>,
    #[serde(default)]
    pub radii: Option<Vec<u32>>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub p_grid: Option<GridSpec>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default = "d_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_delta")]
    pub delta_c: f64,
    #[serde(default = "d_delta")]
    pub delta_u: f64,
    #[serde(default = "d_alpha")]
    pub alpha: f64,
    #[serde(default = "d_vertex_cap")]
    pub vertex_cap: usize,
    #[serde(default = "d_pop_cap")]
    pub pop_cap: u64,
    #[serde(default = "d_path_cap")]
    pub path_cap: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub builder: ForestBuilder,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "d_resample")]
    pub resample: usize,
    #[serde(default)]
    pub observable: IndistObservable,
    #[serde(default)]
    pub ends_radii: Option<Vec<u32>>,
}

impl ExperimentConfig {
    pub fn spec(&self) -> Result<GroupSpec, CliError> {
        let labels: Vec<&str> = self.generators.iter().map(String::as_str).collect();
        GroupSpec::new(self.group.clone(), &labels).map_err(CliError::Core)
    }

    /// The single radius, for subcommands that need exactly one.
    pub fn one_radius(&self) -> Result<u32, CliError> {
        match (self.radius, self.radii.as_deref()) {
            (Some(r), None) => Ok(r),
            (None, Some([r])) => Ok(*r),
            (None, Some(_)) => Err(CliError::config(
                "this subcommand takes a single radius; use \"radius\"",
            )),
            (Some(_), Some(_)) => Err(CliError::config("give either \"radius\" or \"radii\"")),
            (None, None) => Err(CliError::config("missing \"radius\"")),
        }
    }

    pub fn all_radii(&self) -> Result<Vec<u32>, CliError> {
        match (self.radius, self.radii.clone()) {
            (Some(r), None) => Ok(vec![r]),
            (None, Some(rs)) if !rs.is_empty() => Ok(rs),
            (None, Some(_)) => Err(CliError::config("\"radii\" is empty")),
            (Some(_), Some(_)) => Err(CliError::config("give either \"radius\" or \"radii\"")),
            (None, None) => Err(CliError::config("missing \"radius\" or \"radii\"")),
        }
    }

    pub fn need_p(&self) -> Result<f64, CliError> {
        self.p.ok_or_else(|| CliError::config("missing \"p\""))
    }

    pub fn need_epsilon(&self) -> Result<f64, CliError> {
        self.epsilon.ok_or_else(|| CliError::config("missing \"epsilon\""))
    }

    fn validate(&self) -> Result<(), CliError> {
        let unit = |name: &str, v: Option<f64>| -> Result<(), CliError> {
            match v {
                Some(x) if !(0.0..=1.0).contains(&x) => {
                    Err(CliError::config(&format!("{name} = {x} outside [0, 1]")))
                }
                _ => Ok(()),
            }
        };
        unit("p", self.p)?;
        unit("epsilon", self.epsilon)?;
        unit("delta_c", Some(self.delta_c))?;
        unit("delta_u", Some(self.delta_u))?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::config(&format!(
                "alpha = {} outside (0, 1)",
                self.alpha
            )));
        }
        if self.trials == 0 {
            return Err(CliError::config("trials must be at least 1"));
        }
        if self.vertex_cap == 0 || self.pop_cap == 0 || self.path_cap == 0 {
            return Err(CliError::config("caps must be at least 1"));
        }
        if self.resample == 0 {
            return Err(CliError::config("resample must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(CliError::config("workers must be at least 1"));
        }
        if let Some(g) = &self.p_grid {
            g.points()?;
        }
        Ok(())
    }
}

/// A parsed config together with the exact resolved JSON it came from and
/// that JSON's hash. Overrides are applied to the JSON tree before the
/// strict parse, so unknown keys are rejected wherever they come from.
#[derive(Debug)]
pub struct Loaded {
    pub config: ExperimentConfig,
    pub sha256: String,
}

pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(&format!("cannot read {}: {e}", path.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(&format!("config is not valid JSON: {e}")))?;
    for (key, raw) in overrides {
        apply_override(&mut value, key, raw)?;
    }
    let config: ExperimentConfig = serde_json::from_value(value.clone())
        .map_err(|e| CliError::config(&format!("config rejected: {e}")))?;
    config.validate()?;
    // The hash covers exactly the experiment parameters: where results go
    // and how many workers computed them must not change a single output
    // byte, so those fields stay out.
    if let Some(map) = value.as_object_mut() {
        map.remove("workers");
        map.remove("out");
    }
    // serde_json maps iterate in sorted key order, so this is canonical.
    let canonical =
        serde_json::to_string(&value).map_err(|e| CliError::config(&e.to_string()))?;
    let sha256 = hex_digest(canonical.as_bytes());
    Ok(Loaded { config, sha256 })
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Set `value[a][b][c] = parsed(raw)` for an override key "a.b.c",
/// creating intermediate objects as needed. The raw text is parsed as a
/// JSON value when possible and falls back to a plain string.
fn apply_override(
    value: &mut serde_json::Value,
    key: &str,
    raw: &str,
) -> Result<(), CliError> {
    let leaf: serde_json::Value =
        serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.into()));
    let mut cursor = value;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(&format!("malformed override key {key:?}")));
    }
    for part in &parts[..parts.len() - 1] {
        let obj = cursor.as_object_mut().ok_or_else(|| {
            CliError::config(&format!("override {key:?} descends into a non-object"))
        })?;
        cursor = obj
            .entry(part.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    let obj = cursor.as_object_mut().ok_or_else(|| {
        CliError::config(&format!("override {key:?} descends into a non-object"))
    })?;
    obj.insert(parts[parts.len() - 1].to_string(), leaf);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_config(dir: &tempfile::TempDir, body: &str) -> PathBuf {
        let p = dir.path().join("config.json");
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_config(
            &dir,
            r#"{"group":{"kind":"free","rank":2},"generators":["a","b"],"radius":9}"#,
        );
        let loaded = load(&p, &[]).unwrap();
        let c = loaded.config;
        assert_eq!(c.radius, Some(9));
        assert_eq!(c.trials, 100);
        assert_eq!(c.delta_c, 0.05);
        assert_eq!(c.alpha, 0.05);
        assert_eq!(c.vertex_cap, 2_000_000);
        assert_eq!(c.pop_cap, 1_000_000_000);
        assert_eq!(c.path_cap, 1_000_000);
        assert_eq!(c.builder, ForestBuilder::Lerw);
        assert_eq!(loaded.sha256.len(), 64);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_config(
            &dir,
            r#"{"group":{"kind":"free","rank":2},"generators":["a","b"],"radius":3,"surprise":1}"#,
        );
        let err = load(&p, &[]).unwrap_err();
        assert!(format!("{err}").contains("surprise"));
        // Unknown keys introduced by an override are rejected the same way.
        let p2 = write_config(
            &dir,
            r#"{"group":{"kind":"free","rank":2},"generators":["a","b"],"radius":3}"#,
        );
        let err = load(&p2, &[("bogus".into(), "1".into())]).unwrap_err();
        assert!(format!("{err}").contains("bogus"));
    }

    #[test]
    fn dotted_overrides_reach_nested_fields() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_config(
            &dir,
            r#"{"group":{"kind":"free","rank":2},"generators":["a","b"],"radius":3}"#,
        );
        let loaded = load(
            &p,
            &[
                ("group.rank".into(), "1".into()),
                ("generators".into(), r#"["x"]"#.into()),
                ("p".into(), "0.4".into()),
                ("builder".into(), "stacks".into()),
            ],
        )
        .unwrap();
        assert_eq!(loaded.config.group, GroupKind::Free { rank: 1 });
        assert_eq!(loaded.config.generators, vec!["x".to_string()]);
        assert_eq!(loaded.config.p, Some(0.4));
        assert_eq!(loaded.config.builder, ForestBuilder::Stacks);
    }

    #[test]
    fn overrides_change_the_hash_and_are_order_insensitive_in_keys() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_config(
            &dir,
            r#"{"group":{"kind":"free","rank":2},"generators":["a","b"],"radius":3}"#,
        );
        let base = load(&p, &[]).unwrap().sha256;
        let with = load(&p, &[("p".into(), "0.4".into())]).unwrap().sha256;
        assert_ne!(base, with);
        // The same resolved config hashes identically however it was written.
        let p2 = write_config(
            &dir,
            r#"{"radius":3,"generators":["a","b"],"group":{"rank":2,"kind":"free"}}"#,
        );
        assert_eq!(load(&p2, &[]).unwrap().sha256, base);
    }

    #[test]
    fn out_of_range_values_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_config(
            &dir,
            r#"{"group":{"kind":"free","rank":2},"generators":["a","b"],"radius":3,"p":1.5}"#,
        );
        let err = load(&p, &[]).unwrap_err();
        assert!(format!("{err}").contains("p = 1.5"));
        let p2 = write_config(
            &dir,
            r#"{"group":{"kind":"free","rank":2},"generators":["a","b"],"radius":3,"trials":0}"#,
        );
        assert!(load(&p2, &[]).is_err());
    }

    #[test]
    fn grid_range_expands_to_rounded_points() {
        let g = GridSpec::Range(GridRange { start: 0.1, stop: 0.3, step: 0.1 });
        assert_eq!(g.points().unwrap(), vec![0.1, 0.2, 0.3]);
        let bad = GridSpec::Points(vec![0.3, 0.2]);
        assert!(bad.points().is_err());
    }
}
