//! Layered config resolution: parse YAML documents, deep-merge override
//! layers and `key=value` pairs, then deserialize strictly.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_yaml::Value;

use super::schema::ConfigSchema;
use crate::error::{Error, Result};
use crate::util::fnv1a64;

/// A fully merged, schema-validated configuration with its canonical
/// serialization and stable content hash.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub schema: ConfigSchema,
    pub canonical_yaml: String,
    pub hash: u64,
}

impl ResolvedConfig {
    pub fn seed(&self) -> u64 {
        self.schema.training.random_seed
    }
}

fn parse_yaml(text: &str, origin: &str) -> Result<Value> {
    serde_yaml::from_str(text)
        .map_err(|e| Error::Config(format!("failed to parse {origin}: {e}")))
}

/// Recursive key-level merge; scalars and sequences replace wholesale.
fn deep_merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Mapping(b), Value::Mapping(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => deep_merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Apply one dotted-path override, parsing the value as a YAML scalar.
fn apply_kv(root: &mut Value, pair: &str) -> Result<()> {
    let (path, raw) = pair.split_once('=').ok_or_else(|| {
        Error::Config(format!("override {pair:?} must have the form key.path=value"))
    })?;
    let value = parse_yaml(raw, &format!("override value {raw:?}"))?;
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("override key {path:?} has an empty segment")));
    }
    for part in &parts[..parts.len() - 1] {
        let map = node.as_mapping_mut().ok_or_else(|| {
            Error::Config(format!("override key {path:?}: {part:?} is not a section"))
        })?;
        let key = Value::String(part.to_string());
        node = map.entry(key).or_insert_with(|| Value::Mapping(Default::default()));
    }
    let map = node.as_mapping_mut().ok_or_else(|| {
        Error::Config(format!("override key {path:?}: parent is not a section"))
    })?;
    map.insert(Value::String(parts[parts.len() - 1].to_string()), value);
    Ok(())
}

/// Resolve a base document plus override layers (later wins) plus dotted
/// `key=value` pairs. Unknown keys and type mismatches are hard errors at
/// the final strict deserialization.
pub fn resolve_config(base: &str, overlays: &[&str], kv: &[String]) -> Result<ResolvedConfig> {
    let mut merged = parse_yaml(base, "base config")?;
    if !merged.is_mapping() {
        return Err(Error::Config("base config must be a mapping".into()));
    }
    for (i, layer) in overlays.iter().enumerate() {
        let v = parse_yaml(layer, &format!("override layer {}", i + 1))?;
        deep_merge(&mut merged, v);
    }
    for pair in kv {
        apply_kv(&mut merged, pair)?;
    }
    let schema: ConfigSchema = serde_yaml::from_value(merged)
        .map_err(|e| Error::Config(format!("config rejected: {e}")))?;
    schema.validate()?;
    let canonical_yaml = serde_yaml::to_string(&schema)
        .map_err(|e| Error::Config(format!("config serialization failed: {e}")))?;
    let hash = fnv1a64(canonical_yaml.as_bytes());
    Ok(ResolvedConfig { schema, canonical_yaml, hash })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

/// File-based resolution: the first path is the base, later paths override.
pub fn resolve_config_from_files(paths: &[&Path], kv: &[String]) -> Result<ResolvedConfig> {
    if paths.is_empty() {
        return Err(Error::Config("at least one config file is required".into()));
    }
    let base = read(paths[0])?;
    let overlays: Vec<String> =
        paths[1..].iter().map(|p| read(p)).collect::<Result<Vec<_>>>()?;
    let refs: Vec<&str> = overlays.iter().map(|s| s.as_str()).collect();
    resolve_config(&base, &refs, kv)
}

/// Dotted-path snapshot of a resolved config, for diffing.
pub fn flatten_config(cfg: &ResolvedConfig) -> Result<BTreeMap<String, String>> {
    let value: Value = serde_yaml::from_str(&cfg.canonical_yaml)
        .map_err(|e| Error::Config(format!("canonical yaml reparse failed: {e}")))?;
    let mut out = BTreeMap::new();
    flatten_value(&value, String::new(), &mut out);
    Ok(out)
}

fn flatten_value(v: &Value, prefix: String, out: &mut BTreeMap<String, String>) {
    match v {
        Value::Mapping(m) => {
            for (k, val) in m {
                let key = k.as_str().map(|s| s.to_string()).unwrap_or_else(|| format!("{k:?}"));
                let next =
                    if prefix.is_empty() { key } else { format!("{prefix}.{key}") };
                flatten_value(val, next, out);
            }
        }
        other => {
            out.insert(prefix, serde_yaml::to_string(other).unwrap_or_default());
        }
    }
}

/// Dotted keys whose values differ between two resolved configs.
pub fn config_diff(a: &ResolvedConfig, b: &ResolvedConfig) -> Result<Vec<String>> {
    let fa = flatten_config(a)?;
    let fb = flatten_config(b)?;
    let mut keys: Vec<String> = Vec::new();
    for key in fa.keys().chain(fb.keys()) {
        if fa.get(key) != fb.get(key) && !keys.contains(key) {
            keys.push(key.clone());
        }
    }
    keys.sort();
    Ok(keys)
}

/// Validate every shipped config file: parse, resolve over the base, and
/// hash stably across two resolutions.
pub fn validate_corpus(configs_dir: &Path) -> Result<Vec<(String, u64)>> {
    let base_path = configs_dir.join("base.yaml");
    let base = read(&base_path)?;
    let mut report = Vec::new();
    let resolved_base = resolve_config(&base, &[], &[])?;
    report.push(("base.yaml".to_string(), resolved_base.hash));
    let mut paths: Vec<std::path::PathBuf> = Vec::new();
    collect_yaml_files(configs_dir, &mut paths)?;
    paths.sort();
    for path in paths {
        if path == base_path {
            continue;
        }
        let text = read(&path)?;
        let once = resolve_config(&base, &[&text], &[])?;
        let twice = resolve_config(&base, &[&text], &[])?;
        if once.hash != twice.hash {
            return Err(Error::Config(format!(
                "unstable hash for {}: {} vs {}",
                path.display(),
                once.hash,
                twice.hash
            )));
        }
        let name = path
            .strip_prefix(configs_dir)
            .unwrap_or(&path)
            .to_string_lossy()
            .into_owned();
        report.push((name, once.hash));
    }
    Ok(report)
}

fn collect_yaml_files(dir: &Path, out: &mut Vec<std::path::PathBuf>) -> Result<()> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir.display().to_string(), e))?;
        let path = entry.path();
        if path.is_dir() {
            collect_yaml_files(&path, out)?;
        } else if path.extension().map(|e| e == "yaml" || e == "yml").unwrap_or(false) {
            out.push(path);
        }
    }
    Ok(())
}
