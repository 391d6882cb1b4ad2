//! Reward configuration: component gates/weights, thresholds, clipping,
//! and the cumulative ablation schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const COMPONENT_COUNT: usize = 11;

/// Canonical component order. Evaluation, weighting, summation, and trace
/// layout all follow this order exactly.
pub const COMPONENT_KEYS: [&str; COMPONENT_COUNT] = [
    "profit",
    "holding",
    "volatility",
    "drawdown",
    "transaction",
    "overtrading",
    "pyramid_penalty",
    "martingale_penalty",
    "margin",
    "liquidation",
    "constraint",
];

/// Baseline weights, aligned with [`COMPONENT_KEYS`].
pub const DEFAULT_WEIGHTS: [f64; COMPONENT_COUNT] =
    [1.0, 0.03, 0.01, 0.05, 0.10, 0.02, 0.05, 0.12, 0.05, 2.0, 0.10];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentToggle {
    pub enabled: bool,
    pub weight: f64,
}

/// Trigger thresholds shared by the penalty formulas. All are config keys
/// so ablations can probe them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardThresholds {
    /// Holding bonus requires drawdown below this level.
    pub holding_drawdown_max: f64,
    /// Drawdown increments beyond this level are penalized 5x.
    pub severe_drawdown: f64,
    /// Trades allowed inside the overtrading window before the penalty arms.
    pub overtrade_allowance: f64,
    /// Margin utilization above this level incurs the quadratic penalty.
    pub margin_utilization_soft: f64,
}

impl Default for RewardThresholds {
    fn default() -> Self {
        RewardThresholds {
            holding_drawdown_max: 0.05,
            severe_drawdown: 0.20,
            overtrade_allowance: 10.0,
            margin_utilization_soft: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Clip the raw weighted sum into [clip_min, clip_max]. The default.
    ClipOnly,
    /// Standardize by running moments before clipping.
    RunningNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    /// Gates and weights in canonical order.
    pub components: [ComponentToggle; COMPONENT_COUNT],
    pub thresholds: RewardThresholds,
    pub mode: NormalizationMode,
    pub clip_min: f64,
    pub clip_max: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        let mut components = [ComponentToggle { enabled: true, weight: 0.0 }; COMPONENT_COUNT];
        for (c, w) in components.iter_mut().zip(DEFAULT_WEIGHTS) {
            c.weight = w;
        }
        RewardConfig {
            components,
            thresholds: RewardThresholds::default(),
            mode: NormalizationMode::ClipOnly,
            clip_min: -1.0,
            clip_max: 1.0,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clip_min >= self.clip_max {
            return Err(Error::Config(format!(
                "reward clip bounds must satisfy clip_min < clip_max, got [{}, {}]",
                self.clip_min, self.clip_max
            )));
        }
        Ok(())
    }

    pub fn toggle(&self, key: &str) -> Option<&ComponentToggle> {
        COMPONENT_KEYS.iter().position(|k| *k == key).map(|i| &self.components[i])
    }
}

/// Cumulative ablation schedule: r1 enables profit only; r2 through r6 add
/// one component each in canonical order; r7 enables all eleven.
pub fn make_ablation_config(variant: u32) -> Result<RewardConfig> {
    if !(1..=7).contains(&variant) {
        return Err(Error::Config(format!("unknown reward variant r{variant}")));
    }
    let mut cfg = RewardConfig::default();
    let enabled_count = if variant == 7 { COMPONENT_COUNT } else { variant as usize };
    for (i, c) in cfg.components.iter_mut().enumerate() {
        c.enabled = i < enabled_count;
    }
    Ok(cfg)
}
