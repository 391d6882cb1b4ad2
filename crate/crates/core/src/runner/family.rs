//! Experiment-family drivers: each family perturbs exactly one config axis
//! and runs every variant under otherwise identical settings.

use std::path::Path;

use super::artifacts::RunArtifacts;
use super::train::{run_training, TrainSummary};
use crate::config::{resolve_config, ResolvedConfig};
use crate::error::{Error, Result};
use crate::reward::COMPONENT_KEYS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Reward ablation r1..r7 (cumulative component schedule).
    E01,
    /// Action space: simplified vs extended.
    E02,
    /// Scaling availability: none, pyramid-only, martingale-only, both.
    E03,
}

impl Family {
    pub fn parse(name: &str) -> Result<Family> {
        match name.to_ascii_lowercase().as_str() {
            "e01" => Ok(Family::E01),
            "e02" => Ok(Family::E02),
            "e03" => Ok(Family::E03),
            other => Err(Error::Config(format!("unknown experiment family {other:?}"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Family::E01 => "e01_reward_ablation",
            Family::E02 => "e02_action_space",
            Family::E03 => "e03_scaling",
        }
    }
}

/// Per-variant key=value override sets. Every variant touches only its
/// declared keys so resolved-config diffs stay minimal and auditable.
pub fn family_variants(family: Family) -> Vec<(String, Vec<String>)> {
    match family {
        Family::E01 => (1..=7u32)
            .map(|v| {
                let enabled_count = if v == 7 { COMPONENT_KEYS.len() } else { v as usize };
                let kv = COMPONENT_KEYS
                    .iter()
                    .enumerate()
                    .map(|(i, key)| {
                        format!("reward.components.{key}.enabled={}", i < enabled_count)
                    })
                    .collect();
                (format!("r{v}"), kv)
            })
            .collect(),
        Family::E02 => vec![
            ("extended".to_string(), vec!["environment.actions.mode=extended".to_string()]),
            ("simplified".to_string(), vec!["environment.actions.mode=simplified".to_string()]),
        ],
        Family::E03 => vec![
            ("s1_no_scaling", false, false),
            ("s2_pyramid", true, false),
            ("s3_martingale", false, true),
            ("s4_both", true, true),
        ]
        .into_iter()
        .map(|(name, pyr, mart)| {
            (
                name.to_string(),
                vec![
                    format!("environment.risk.allow_pyramid={pyr}"),
                    format!("environment.risk.allow_martingale={mart}"),
                ],
            )
        })
        .collect(),
    }
}

/// Resolve one family variant over a base config.
pub fn resolve_variant(base: &ResolvedConfig, kv: &[String]) -> Result<ResolvedConfig> {
    resolve_config(&base.canonical_yaml, &[], kv)
}

/// Run every variant of a family; artifacts land under
/// `out_root/<family label>/<variant>`.
pub fn run_experiment_family(
    family: Family,
    base: &ResolvedConfig,
    out_root: &Path,
) -> Result<Vec<(String, RunArtifacts, TrainSummary)>> {
    let family_root = out_root.join(family.label());
    let mut results = Vec::new();
    for (variant, kv) in family_variants(family) {
        let cfg = resolve_variant(base, &kv)?;
        let (artifacts, summary) = run_training(&cfg, &family_root, &variant)?;
        results.push((variant, artifacts, summary));
    }
    Ok(results)
}
