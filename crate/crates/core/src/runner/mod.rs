//! Orchestration: config-driven training runs, experiment families, seed
//! fan-out, and artifact management.

mod artifacts;
mod family;
mod setup;
mod train;

pub use artifacts::{
    EpisodeRecord, EvalRecord, JsonlWriter, RewardTraceRecord, RunArtifacts, StepLogRecord,
};
pub use family::{family_variants, resolve_variant, run_experiment_family, Family};
pub use setup::{build_bars, build_env, build_env_data, build_prepared, build_run_setup, RunSetup};
pub use train::{run_training, TrainSummary};

pub use crate::seeding::seed_all;
