//! The eleven component formulas. Every value is dimensionless; disabled
//! components are exactly zero.

use super::config::{RewardConfig, COMPONENT_COUNT};
use crate::env::Action;
use crate::exec::{CostTrace, PortfolioState};

/// Everything one step exposes to the reward engine.
#[derive(Debug, Clone)]
pub struct TransitionTrace {
    pub prev: PortfolioState,
    pub next: PortfolioState,
    pub executed: Action,
    pub proposed_id: usize,
    pub cost: CostTrace,
    pub violation: bool,
    pub liquidation_event: bool,
    /// Trading steps among the last `overtrading_window` steps.
    pub recent_trade_count: usize,
    pub overtrading_window: usize,
    /// Recent per-step equity returns, oldest first, current step included.
    pub equity_returns: Vec<f64>,
    pub depth_cap: u32,
}

/// Compute the gated component vector in canonical order.
pub fn compute_components(trace: &TransitionTrace, cfg: &RewardConfig) -> [f64; COMPONENT_COUNT] {
    let th = &cfg.thresholds;
    let mut c = [0.0f64; COMPONENT_COUNT];
    let gate = |i: usize| cfg.components[i].enabled;

    // 0: profit — step-wise post-cost equity return.
    if gate(0) && trace.prev.equity > 0.0 {
        c[0] = (trace.next.equity - trace.prev.equity) / trace.prev.equity;
    }
    // 1: holding — bonus while the open position stays profitable under
    // low drawdown.
    if gate(1)
        && !trace.next.position.is_flat()
        && trace.next.unrealized_pnl > 0.0
        && trace.next.current_drawdown < th.holding_drawdown_max
    {
        c[1] = 1.0;
    }
    // 2: volatility — short-horizon equity-return dispersion.
    if gate(2) {
        c[2] = -crate::util::mean_std(&trace.equity_returns).1;
    }
    // 3: drawdown — incremental, 5x beyond the severe threshold.
    if gate(3) {
        let increment = (trace.next.current_drawdown - trace.prev.current_drawdown).max(0.0);
        let scale =
            if trace.next.current_drawdown > th.severe_drawdown { 5.0 } else { 1.0 };
        c[3] = -increment * scale;
    }
    // 4: transaction — all step costs normalized by prior equity.
    if gate(4) && trace.prev.equity > 0.0 {
        let total = trace.cost.spread_cost
            + trace.cost.slippage_cost
            + trace.cost.commission
            + trace.cost.rollover.abs();
        c[4] = -total / trace.prev.equity;
    }
    // 5: overtrading — bounded penalty above the allowance.
    if gate(5) && trace.overtrading_window > 0 {
        let excess = (trace.recent_trade_count as f64 - th.overtrade_allowance).max(0.0);
        c[5] = -(excess / trace.overtrading_window as f64).min(1.0);
    }
    // 6: pyramiding — depth-aware, on the add step only.
    if gate(6)
        && matches!(trace.executed, Action::PyramidLong | Action::PyramidShort)
        && trace.depth_cap > 0
    {
        c[6] = -(trace.next.position.pyramid_depth as f64 / trace.depth_cap as f64);
    }
    // 7: martingale — depth-aware, on the add step only; the stronger
    // coefficient lives in the weight.
    if gate(7)
        && matches!(trace.executed, Action::MartingaleLong | Action::MartingaleShort)
        && trace.depth_cap > 0
    {
        c[7] = -(trace.next.position.martingale_depth as f64 / trace.depth_cap as f64);
    }
    // 8: margin utilization — quadratic above the soft threshold, scaled so
    // full utilization maps to -1.
    if gate(8) {
        let s = th.margin_utilization_soft;
        let over = (trace.next.margin_utilization - s).max(0.0);
        let denom = (1.0 - s) * (1.0 - s);
        if denom > 0.0 {
            c[8] = -(over * over) / denom;
        }
    }
    // 9: liquidation.
    if gate(9) && trace.liquidation_event {
        c[9] = -1.0;
    }
    // 10: constraint violation.
    if gate(10) && trace.violation {
        c[10] = -1.0;
    }
    c
}


#[cfg(test)]
mod tests {
    use super::testutil::{null_trace, with_depths};
    use super::*;

    fn full() -> RewardConfig {
        RewardConfig::default()
    }

    #[test]
    fn null_step_is_all_zero() {
        let c = compute_components(&null_trace(), &full());
        assert!(c.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn liquidation_component_fires() {
        let mut t = null_trace();
        t.liquidation_event = true;
        let c = compute_components(&t, &full());
        assert_eq!(c[9], -1.0);
        // Weighted at 2.0 the term is -2.0.
        assert_eq!(full().components[9].weight * c[9], -2.0);
    }

    #[test]
    fn violation_component_fires() {
        let mut t = null_trace();
        t.violation = true;
        let c = compute_components(&t, &full());
        assert_eq!(c[10], -1.0);
        assert!((full().components[10].weight * c[10] + 0.10).abs() < 1e-15);
    }

    #[test]
    fn disabled_components_are_exactly_zero() {
        let mut t = null_trace();
        t.violation = true;
        t.liquidation_event = true;
        t.next.equity = 101_000.0;
        let mut cfg = full();
        for c in cfg.components.iter_mut() {
            c.enabled = false;
        }
        let c = compute_components(&t, &cfg);
        assert!(c.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn profit_is_equity_return() {
        let mut t = null_trace();
        t.next.equity = 100_200.0;
        let c = compute_components(&t, &full());
        assert!((c[0] - 0.002).abs() < 1e-15);
    }

    #[test]
    fn drawdown_severe_regime_is_5x() {
        let mut t = null_trace();
        t.prev.current_drawdown = 0.10;
        t.next.current_drawdown = 0.12;
        let mild = compute_components(&t, &full())[3];
        assert!((mild + 0.02).abs() < 1e-12);
        t.prev.current_drawdown = 0.21;
        t.next.current_drawdown = 0.23;
        let severe = compute_components(&t, &full())[3];
        assert!((severe + 0.10).abs() < 1e-12);
    }

    #[test]
    fn margin_penalty_maps_full_utilization_to_minus_one() {
        let mut t = null_trace();
        t.next.margin_utilization = 1.0;
        assert_eq!(compute_components(&t, &full())[8], -1.0);
        t.next.margin_utilization = 0.5;
        assert_eq!(compute_components(&t, &full())[8], 0.0);
        t.next.margin_utilization = 0.75;
        assert!((compute_components(&t, &full())[8] + 0.25).abs() < 1e-12);
    }

    #[test]
    fn overtrading_arms_above_allowance() {
        let mut t = null_trace();
        t.recent_trade_count = 10;
        assert_eq!(compute_components(&t, &full())[5], 0.0);
        t.recent_trade_count = 35;
        assert!((compute_components(&t, &full())[5] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn scaling_penalties_fire_on_add_steps_only() {
        let t = with_depths(2, 0, Action::PyramidLong);
        let c = compute_components(&t, &full());
        assert!((c[6] + 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(c[7], 0.0);
        // Same depths but a HOLD step: no scaling penalty.
        let t = with_depths(2, 0, Action::Hold);
        let c = compute_components(&t, &full());
        assert_eq!(c[6], 0.0);
    }

    #[test]
    fn martingale_to_pyramid_weighted_ratio_is_2_4() {
        let cfg = full();
        for depth in 1..=3u32 {
            let p = compute_components(&with_depths(depth, 0, Action::PyramidLong), &cfg)[6]
                * cfg.components[6].weight;
            let m = compute_components(&with_depths(0, depth, Action::MartingaleLong), &cfg)[7]
                * cfg.components[7].weight;
            assert!((m.abs() / p.abs() - 2.4).abs() < 1e-12);
        }
    }

    #[test]
    fn holding_requires_profit_and_low_drawdown() {
        let mut t = with_depths(0, 0, Action::Hold);
        t.next.unrealized_pnl = 5.0;
        t.next.current_drawdown = 0.01;
        assert_eq!(compute_components(&t, &full())[1], 1.0);
        t.next.current_drawdown = 0.06;
        assert_eq!(compute_components(&t, &full())[1], 0.0);
        t.next.current_drawdown = 0.01;
        t.next.unrealized_pnl = -5.0;
        assert_eq!(compute_components(&t, &full())[1], 0.0);
    }
}
