//! Friction-aware FX trading laboratory.
//!
//! A deterministic, config-driven stack for studying value-based trading
//! agents under realistic execution frictions:
//!
//! - [`data`] — OHLCV ingestion, causal feature engineering, train-only
//!   scaling, and seeded synthetic series generation.
//! - [`exec`] — order execution at next-bar open with spread/slippage/
//!   commission, rollover financing, margin accounting, and liquidation.
//! - [`reward`] — an 11-component decomposable reward with enable gates,
//!   fixed weights, clipping, and a full per-step trace.
//! - [`env`] — the agent-facing environment: windowed observations,
//!   legal-action masking, and the observe/decide/fill/mark timing contract.
//! - [`agent`] — MLP Q-network with manual differentiation, Adam, Huber
//!   loss, mask-aware exploration, replay, and DQN/DDQN targets.
//! - [`runner`] — config resolution, seed fan-out, the training loop, and
//!   experiment-family drivers with structured artifacts.
//! - [`eval`] — deterministic rollouts, the metric battery, and rule-based
//!   benchmark strategies under identical simulator semantics.
//! - [`verify`] — the executable anti-lookahead conformance suite.

pub mod agent;
pub mod config;
pub mod data;
pub mod env;
pub mod error;
pub mod eval;
pub mod exec;
pub mod reward;
pub mod runner;
pub mod seeding;
pub mod util;
pub mod verify;

pub use config::{ConfigSchema, ResolvedConfig};
pub use data::{Bar, DatasetSplit, FeatureFrame, ScalerParams, SynthSpec};
pub use env::{Action, ActionMode, EnvConfig, LegalMask, Observation, SimpleAction, TradingEnv};
pub use error::{Error, Result};
pub use eval::{EquityCurve, MetricsReport, TradeRecord};
pub use exec::{FrictionConfig, PortfolioState, Position, RiskConfig, StepOutcome};
pub use reward::{RewardConfig, RewardTrace};
pub use verify::ConformanceReport;
