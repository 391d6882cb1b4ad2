//! The typed configuration schema and its mapping onto runtime objects.
//! Every struct denies unknown fields so typos fail loudly at resolve time.

use serde::{Deserialize, Serialize};

use crate::agent::{AdamConfig, AgentKind, EpsilonSchedule};
use crate::data::{FeatureConfig, Regime, SynthSpec};
use crate::env::{ActionMode, EnvConfig};
use crate::error::{Error, Result};
use crate::exec::{FrictionConfig, RiskConfig};
use crate::reward::{
    ComponentToggle, NormalizationMode, RewardConfig, RewardThresholds, COMPONENT_COUNT,
    COMPONENT_KEYS, DEFAULT_WEIGHTS,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub family: String,
    pub variant: String,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection { family: "base".into(), variant: "base".into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSyncUnit {
    EnvSteps,
    LearnSteps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentTraining {
    pub total_timesteps: u64,
    pub learn_start_steps: u64,
    pub learn_frequency: u64,
    pub batch_size: usize,
    pub gamma: f64,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub huber_delta: f64,
    pub grad_clip_norm: f64,
    pub replay_capacity: usize,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay_steps: u64,
    pub target_sync_interval: u64,
    pub target_sync_unit: TargetSyncUnit,
    pub eval_interval: u64,
}

impl Default for AgentTraining {
    fn default() -> Self {
        AgentTraining {
            total_timesteps: 1_000_000,
            learn_start_steps: 10_000,
            learn_frequency: 4,
            batch_size: 128,
            gamma: 0.99,
            learning_rate: 2.5e-4,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            huber_delta: 1.0,
            grad_clip_norm: 10.0,
            replay_capacity: 40_000,
            epsilon_start: 1.0,
            epsilon_end: 0.01,
            epsilon_decay_steps: 30_000,
            target_sync_interval: 2_000,
            target_sync_unit: TargetSyncUnit::EnvSteps,
            eval_interval: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub hidden_dims: Vec<usize>,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection { hidden_dims: vec![512, 512, 256] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentSection {
    pub name: AgentKind,
    pub model: ModelSection,
    pub training: AgentTraining,
}

impl Default for AgentSection {
    fn default() -> Self {
        AgentSection {
            name: AgentKind::DoubleDqn,
            model: ModelSection::default(),
            training: AgentTraining::default(),
        }
    }
}

/// Per-component gate with an optional weight; omitted weights fall back to
/// the baseline value for that component.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComponentSchema {
    pub enabled: bool,
    pub weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardComponentsSection {
    pub profit: ComponentSchema,
    pub holding: ComponentSchema,
    pub volatility: ComponentSchema,
    pub drawdown: ComponentSchema,
    pub transaction: ComponentSchema,
    pub overtrading: ComponentSchema,
    pub pyramid_penalty: ComponentSchema,
    pub martingale_penalty: ComponentSchema,
    pub margin: ComponentSchema,
    pub liquidation: ComponentSchema,
    pub constraint: ComponentSchema,
}

impl Default for RewardComponentsSection {
    fn default() -> Self {
        let on = ComponentSchema { enabled: true, weight: None };
        RewardComponentsSection {
            profit: on,
            holding: on,
            volatility: on,
            drawdown: on,
            transaction: on,
            overtrading: on,
            pyramid_penalty: on,
            martingale_penalty: on,
            margin: on,
            liquidation: on,
            constraint: on,
        }
    }
}

impl RewardComponentsSection {
    /// Canonical-order view.
    pub fn ordered(&self) -> [ComponentSchema; COMPONENT_COUNT] {
        [
            self.profit,
            self.holding,
            self.volatility,
            self.drawdown,
            self.transaction,
            self.overtrading,
            self.pyramid_penalty,
            self.martingale_penalty,
            self.margin,
            self.liquidation,
            self.constraint,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardSection {
    pub components: RewardComponentsSection,
    pub thresholds: RewardThresholds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardNormalizationSection {
    pub mode: NormalizationMode,
    pub clip_min: f64,
    pub clip_max: f64,
}

impl Default for RewardNormalizationSection {
    fn default() -> Self {
        RewardNormalizationSection {
            mode: NormalizationMode::ClipOnly,
            clip_min: -1.0,
            clip_max: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActionsSection {
    pub mode: ActionMode,
}

impl Default for ActionsSection {
    fn default() -> Self {
        ActionsSection { mode: ActionMode::Extended }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Synthetic,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticSection {
    pub regime: Regime,
    pub n_bars: usize,
    pub start_price: f64,
    pub drift_per_bar: f64,
    pub volatility_per_bar: f64,
    pub mean_reversion_rate: f64,
    pub mean_price: f64,
    pub intrabar_range_pips: f64,
    pub volume_base: f64,
    pub start: chrono::DateTime<chrono::Utc>,
}

impl Default for SyntheticSection {
    fn default() -> Self {
        let s = SynthSpec::default();
        SyntheticSection {
            regime: s.regime,
            n_bars: 5_000,
            start_price: s.start_price,
            drift_per_bar: s.drift_per_bar,
            volatility_per_bar: s.volatility_per_bar,
            mean_reversion_rate: s.mean_reversion_rate,
            mean_price: s.mean_price,
            intrabar_range_pips: s.intrabar_range_pips,
            volume_base: s.volume_base,
            start: s.start,
        }
    }
}

impl SyntheticSection {
    pub fn to_spec(&self, pip_size: f64) -> SynthSpec {
        SynthSpec {
            regime: self.regime,
            start_price: self.start_price,
            drift_per_bar: self.drift_per_bar,
            volatility_per_bar: self.volatility_per_bar,
            mean_reversion_rate: self.mean_reversion_rate,
            mean_price: self.mean_price,
            intrabar_range_pips: self.intrabar_range_pips,
            pip_size,
            volume_base: self.volume_base,
            start: self.start,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub source: DataSource,
    pub csv_path: Option<String>,
    pub pair: String,
    pub train_fraction: f64,
    pub features: FeatureConfig,
    pub synthetic: SyntheticSection,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            source: DataSource::Synthetic,
            csv_path: None,
            pair: "EURUSD".into(),
            train_fraction: 0.8,
            features: FeatureConfig::default(),
            synthetic: SyntheticSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentSection {
    pub actions: ActionsSection,
    pub window: usize,
    pub initial_capital: f64,
    pub overtrading_window: usize,
    pub volatility_window: usize,
    pub max_episode_steps: Option<usize>,
    pub frictions: FrictionConfig,
    pub risk: RiskConfig,
    pub data: DataSection,
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        let env = EnvConfig::default();
        EnvironmentSection {
            actions: ActionsSection::default(),
            window: env.window,
            initial_capital: env.initial_capital,
            overtrading_window: env.overtrading_window,
            volatility_window: env.volatility_window,
            max_episode_steps: None,
            frictions: env.frictions,
            risk: env.risk,
            data: DataSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingSection {
    pub random_seed: u64,
}

impl Default for TrainingSection {
    fn default() -> Self {
        TrainingSection { random_seed: 42 }
    }
}

/// The full document.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigSchema {
    pub experiment: ExperimentSection,
    pub agent: AgentSection,
    pub reward: RewardSection,
    pub reward_normalization: RewardNormalizationSection,
    pub environment: EnvironmentSection,
    pub training: TrainingSection,
}

impl ConfigSchema {
    /// Runtime environment config.
    pub fn env_config(&self) -> EnvConfig {
        let e = &self.environment;
        EnvConfig {
            action_mode: e.actions.mode,
            window: e.window,
            initial_capital: e.initial_capital,
            overtrading_window: e.overtrading_window,
            volatility_window: e.volatility_window,
            max_episode_steps: e.max_episode_steps,
            frictions: e.frictions,
            risk: e.risk,
        }
    }

    /// Runtime reward config with baseline weights for omitted entries.
    pub fn reward_config(&self) -> RewardConfig {
        let ordered = self.reward.components.ordered();
        let mut components = [ComponentToggle { enabled: false, weight: 0.0 }; COMPONENT_COUNT];
        for i in 0..COMPONENT_COUNT {
            components[i] = ComponentToggle {
                enabled: ordered[i].enabled,
                weight: ordered[i].weight.unwrap_or(DEFAULT_WEIGHTS[i]),
            };
        }
        RewardConfig {
            components,
            thresholds: self.reward.thresholds,
            mode: self.reward_normalization.mode,
            clip_min: self.reward_normalization.clip_min,
            clip_max: self.reward_normalization.clip_max,
        }
    }

    pub fn adam_config(&self) -> AdamConfig {
        let t = &self.agent.training;
        AdamConfig {
            learning_rate: t.learning_rate,
            beta1: t.adam_beta1,
            beta2: t.adam_beta2,
            epsilon: t.adam_epsilon,
        }
    }

    pub fn epsilon_schedule(&self) -> EpsilonSchedule {
        let t = &self.agent.training;
        EpsilonSchedule {
            start: t.epsilon_start,
            end: t.epsilon_end,
            decay_steps: t.epsilon_decay_steps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.env_config().validate()?;
        self.reward_config().validate()?;
        self.environment.data.features.validate()?;
        let t = &self.agent.training;
        if t.batch_size == 0 || t.replay_capacity == 0 {
            return Err(Error::Config("batch_size and replay_capacity must be positive".into()));
        }
        if t.learn_frequency == 0 || t.target_sync_interval == 0 || t.eval_interval == 0 {
            return Err(Error::Config("cadence intervals must be positive".into()));
        }
        if !(0.0..=1.0).contains(&t.gamma) {
            return Err(Error::Config(format!("gamma must lie in [0, 1], got {}", t.gamma)));
        }
        if self.agent.model.hidden_dims.is_empty()
            || self.agent.model.hidden_dims.contains(&0)
        {
            return Err(Error::Config("hidden_dims must be non-empty and positive".into()));
        }
        if !(self.environment.data.train_fraction > 0.0
            && self.environment.data.train_fraction <= 1.0)
        {
            return Err(Error::Config(format!(
                "train_fraction must lie in (0, 1], got {}",
                self.environment.data.train_fraction
            )));
        }
        // Component keys stay aligned with the canonical order.
        debug_assert_eq!(COMPONENT_KEYS.len(), COMPONENT_COUNT);
        Ok(())
    }
}
