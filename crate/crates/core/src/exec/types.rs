//! Account-state and configuration types for the execution engine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Units of base currency per standard lot.
pub const LOT_UNITS: f64 = 100_000.0;

/// Tolerance for lot-size comparisons (lots are multiples of base_lot, but
/// accumulate in floating point).
pub const LOT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Long,
    Short,
    Flat,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Long => 1.0,
            Direction::Short => -1.0,
            Direction::Flat => 0.0,
        }
    }
}

/// Open exposure with scaling-depth counters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub direction: Direction,
    pub lots: f64,
    pub avg_entry_price: f64,
    pub pyramid_depth: u32,
    pub martingale_depth: u32,
}

impl Position {
    pub fn flat() -> Self {
        Position {
            direction: Direction::Flat,
            lots: 0.0,
            avg_entry_price: 0.0,
            pyramid_depth: 0,
            martingale_depth: 0,
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.direction, Direction::Flat)
    }
}

/// Account ground truth. `equity = cash + unrealized_pnl` after every mark,
/// and `free_margin = equity - used_margin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioState {
    pub cash: f64,
    pub equity: f64,
    /// Cumulative realized PnL from closed lots (price-based, gross of
    /// commission and rollover, which flow through cash separately).
    pub realized_pnl: f64,
    pub unrealized_pnl: f64,
    pub used_margin: f64,
    pub free_margin: f64,
    /// used_margin / equity clamped to [0, 1].
    pub margin_utilization: f64,
    pub position: Position,
    pub peak_equity: f64,
    pub current_drawdown: f64,
    pub liquidated: bool,
    /// Price of the most recent mark-to-market; decision-time margin
    /// estimates use it so legality is a pure function of this state.
    pub mark_price: f64,
    pub initial_capital: f64,
}

impl PortfolioState {
    pub fn new(initial_capital: f64, mark_price: f64) -> Self {
        PortfolioState {
            cash: initial_capital,
            equity: initial_capital,
            realized_pnl: 0.0,
            unrealized_pnl: 0.0,
            used_margin: 0.0,
            free_margin: initial_capital,
            margin_utilization: 0.0,
            position: Position::flat(),
            peak_equity: initial_capital,
            current_drawdown: 0.0,
            liquidated: false,
            mark_price,
            initial_capital,
        }
    }
}

/// Deterministic market frictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrictionConfig {
    /// Full quoted spread; half is applied on each side of the open.
    pub spread_pips: f64,
    /// Adverse deterministic slippage per fill.
    pub slippage_pips: f64,
    /// Charged once per lot on entry legs; exits are free, so a round trip
    /// pays exactly this amount per lot.
    pub commission_per_lot: f64,
    pub pip_size: f64,
    pub long_swap_pips_per_day: f64,
    pub short_swap_pips_per_day: f64,
    pub rollover_hour_utc: u32,
}

impl Default for FrictionConfig {
    fn default() -> Self {
        FrictionConfig {
            spread_pips: 1.0,
            slippage_pips: 0.5,
            commission_per_lot: 3.5,
            pip_size: 1.0e-4,
            long_swap_pips_per_day: -0.5,
            short_swap_pips_per_day: -0.3,
            rollover_hour_utc: 22,
        }
    }
}

impl FrictionConfig {
    pub fn frictionless() -> Self {
        FrictionConfig {
            spread_pips: 0.0,
            slippage_pips: 0.0,
            commission_per_lot: 0.0,
            long_swap_pips_per_day: 0.0,
            short_swap_pips_per_day: 0.0,
            ..FrictionConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.spread_pips < 0.0
            || self.slippage_pips < 0.0
            || self.commission_per_lot < 0.0
            || self.pip_size <= 0.0
        {
            return Err(Error::Config("friction magnitudes must be non-negative".into()));
        }
        if self.rollover_hour_utc > 23 {
            return Err(Error::Config(format!(
                "rollover_hour_utc must lie in 0..=23, got {}",
                self.rollover_hour_utc
            )));
        }
        Ok(())
    }
}

/// Leverage, margin, liquidation, and scaling-depth limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RiskConfig {
    pub max_leverage: f64,
    /// Forced liquidation when equity falls below this fraction of
    /// used margin.
    pub maintenance_margin_ratio: f64,
    /// Forced liquidation when equity falls below this fraction of
    /// initial capital.
    pub liquidation_equity_fraction: f64,
    pub depth_cap: u32,
    pub base_lot: f64,
    pub reduce_fraction: f64,
    /// Legality switches for the scaling action families.
    pub allow_pyramid: bool,
    pub allow_martingale: bool,
}

impl Default for RiskConfig {
    fn default() -> Self {
        RiskConfig {
            max_leverage: 30.0,
            maintenance_margin_ratio: 0.5,
            liquidation_equity_fraction: 0.25,
            depth_cap: 3,
            base_lot: 0.1,
            reduce_fraction: 0.5,
            allow_pyramid: true,
            allow_martingale: true,
        }
    }
}

impl RiskConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_leverage <= 0.0 {
            return Err(Error::Config("max_leverage must be positive".into()));
        }
        for (name, v) in [
            ("maintenance_margin_ratio", self.maintenance_margin_ratio),
            ("liquidation_equity_fraction", self.liquidation_equity_fraction),
            ("reduce_fraction", self.reduce_fraction),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        if self.base_lot <= 0.0 {
            return Err(Error::Config("base_lot must be positive".into()));
        }
        Ok(())
    }

    /// Worst-case combined exposure under the depth caps; used to normalize
    /// the lots entry of the portfolio observation vector.
    pub fn max_lots(&self) -> f64 {
        let pyramid_total = self.base_lot * self.depth_cap as f64;
        let martingale_total = self.base_lot * ((1u64 << (self.depth_cap + 1)) as f64 - 2.0);
        self.base_lot + pyramid_total + martingale_total
    }
}

/// Per-step cost attribution in account currency. Spread, slippage, and
/// commission are non-negative; rollover is signed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostTrace {
    pub spread_cost: f64,
    pub slippage_cost: f64,
    pub commission: f64,
    pub rollover: f64,
}

/// Result of executing one action over one bar transition.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub next_state: PortfolioState,
    pub executed_action: crate::env::Action,
    pub violation: bool,
    pub liquidation_event: bool,
    pub cost_trace: CostTrace,
    pub realized_delta: f64,
    pub unrealized_delta: f64,
    /// Fill price of the order leg(s), when any traded.
    pub fill_price: Option<f64>,
    /// Total lots traded this step (entry and exit legs both count).
    pub traded_lots: f64,
}
