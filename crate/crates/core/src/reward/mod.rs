//! Decomposable reward: eleven components computed in a fixed canonical
//! order, gated per config, weighted, summed, clipped, and fully traced.

mod components;
mod config;
mod engine;

pub use components::{compute_components, TransitionTrace};
pub use config::{
    make_ablation_config, ComponentToggle, NormalizationMode, RewardConfig, RewardThresholds,
    COMPONENT_COUNT, COMPONENT_KEYS, DEFAULT_WEIGHTS,
};
pub use engine::{aggregate, ComponentRecord, RewardEngine, RewardTrace};
