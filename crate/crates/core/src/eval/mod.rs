//! Deterministic evaluation: rollouts, the metric battery, trade records,
//! benchmark strategies, and result export.

mod metrics;
mod policies;
mod report;
mod rollout;
mod trades;

pub use metrics::{compute_metrics, EquityCurve, MetricsReport, ANNUALIZATION};
pub use policies::{
    benchmark_policy, BenchmarkKind, BuyAndHoldPolicy, GreedyPolicy, HoldPolicy,
    MeanReversionPolicy, MomentumPolicy, Policy, PolicyCtx, RandomPolicy,
};
pub use report::{emit_report, write_curve};
pub use rollout::{rollout, RolloutResult};
pub use trades::{extract_trades, TradeRecord};
