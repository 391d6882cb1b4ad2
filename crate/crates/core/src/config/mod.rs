//! Configuration: strict schema, layered override resolution, stable
//! content hashing, and corpus validation.
//!
//! Files are YAML documents with sections `experiment`, `agent`, `reward`,
//! `reward_normalization`, `environment`, and `training`. Overrides merge
//! at the key level (later wins); unknown keys are hard errors.

mod resolve;
mod schema;

pub use resolve::{
    config_diff, flatten_config, resolve_config, resolve_config_from_files, validate_corpus,
    ResolvedConfig,
};
pub use schema::{
    AgentSection, AgentTraining, ComponentSchema, ConfigSchema, DataSection, DataSource,
    EnvironmentSection, ExperimentSection, ModelSection, RewardNormalizationSection,
    RewardSection, SyntheticSection, TargetSyncUnit, TrainingSection,
};
