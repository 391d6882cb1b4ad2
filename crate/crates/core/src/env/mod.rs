//! Agent-facing trading environment.

mod action;
mod breach;
mod core;
mod mask;
mod obs;

pub use action::{Action, ActionMode, LegalMask, SimpleAction, EXTENDED_ACTIONS};
pub use breach::Breach;
pub use core::{EndReason, EnvConfig, EnvData, StepInfo, StepResult, TradingEnv};
pub use mask::{adapt_simplified, compute_extended_mask, compute_legal_mask};
pub use obs::{build_observation, flat_dim, portfolio_vector, Observation, D_PORT};
