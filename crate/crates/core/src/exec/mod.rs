//! Execution and portfolio accounting.
//!
//! Orders proposed at the close of bar `t` fill at `open_{t+1}` with
//! side-aware spread and adverse slippage, pay commission on entry legs,
//! accrue rollover financing at the configured UTC hour (tripled on
//! Wednesdays), and are marked to `close_{t+1}`. Margin, drawdown, and
//! forced-liquidation rules apply after every mark.

mod engine;
mod types;

pub use engine::{
    apply_rollover, check_liquidation, execute, extended_action_legal, mark_to_market,
    quote_and_fill, required_margin, BarWindow, Side,
};
pub use types::{
    CostTrace, Direction, FrictionConfig, PortfolioState, Position, RiskConfig, StepOutcome,
    LOT_UNITS,
};
