//! The execution engine: legality, fills, action semantics, rollover,
//! mark-to-market, and liquidation, in a fixed order per step.

use chrono::{DateTime, Datelike, Timelike, Utc, Weekday};

use super::types::{
    CostTrace, Direction, FrictionConfig, PortfolioState, Position, RiskConfig, StepOutcome,
    LOT_EPS, LOT_UNITS,
};
use crate::env::{Action, LegalMask};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Buy,
    Sell,
}

/// Prices needed to settle one step: decide at `close_t`, fill at
/// `open_next`, mark at `close_next`.
#[derive(Debug, Clone, Copy)]
pub struct BarWindow {
    pub close_t: f64,
    pub open_next: f64,
    pub close_next: f64,
    pub ts_next: DateTime<Utc>,
}

/// Side-aware quoted price: half the spread plus deterministic slippage,
/// both adverse to the taker.
pub fn quote_and_fill(side: Side, open_next: f64, f: &FrictionConfig) -> f64 {
    let adj = (f.spread_pips / 2.0 + f.slippage_pips) * f.pip_size;
    match side {
        Side::Buy => open_next + adj,
        Side::Sell => open_next - adj,
    }
}

/// Margin reserved for a position of `lots` at `price`.
pub fn required_margin(lots: f64, price: f64, r: &RiskConfig) -> f64 {
    lots * LOT_UNITS * price / r.max_leverage
}

fn martingale_add_lots(state: &PortfolioState, r: &RiskConfig) -> f64 {
    // Doubling schedule: the add at depth d (1-based) is 2^d * base_lot.
    r.base_lot * (1u64 << (state.position.martingale_depth + 1)) as f64
}

/// Single source of truth for extended-action legality. Pure function of
/// the decision-time state and the risk limits; margin estimates use the
/// state's own mark price.
pub fn extended_action_legal(state: &PortfolioState, r: &RiskConfig, action: Action) -> bool {
    if state.liquidated {
        return action == Action::Hold;
    }
    let pos = &state.position;
    let fits = |lots: f64| required_margin(lots, state.mark_price, r) <= state.free_margin;
    match action {
        Action::Hold => true,
        Action::OpenLong | Action::OpenShort => pos.is_flat() && fits(r.base_lot),
        Action::PyramidLong => {
            r.allow_pyramid
                && pos.direction == Direction::Long
                && pos.pyramid_depth < r.depth_cap
                && fits(r.base_lot)
        }
        Action::PyramidShort => {
            r.allow_pyramid
                && pos.direction == Direction::Short
                && pos.pyramid_depth < r.depth_cap
                && fits(r.base_lot)
        }
        Action::MartingaleLong => {
            r.allow_martingale
                && pos.direction == Direction::Long
                && pos.martingale_depth < r.depth_cap
                && state.unrealized_pnl < 0.0
                && fits(martingale_add_lots(state, r))
        }
        Action::MartingaleShort => {
            r.allow_martingale
                && pos.direction == Direction::Short
                && pos.martingale_depth < r.depth_cap
                && state.unrealized_pnl < 0.0
                && fits(martingale_add_lots(state, r))
        }
        Action::Reduce | Action::Close => !pos.is_flat(),
        Action::Reverse => {
            // Closing at the mark frees all margin and leaves equity
            // unchanged, so the opposite base lot must fit within equity.
            !pos.is_flat() && required_margin(r.base_lot, state.mark_price, r) <= state.equity
        }
    }
}

/// Rollover financing applied to the settled bar when its timestamp hits
/// the configured UTC hour; tripled on Wednesdays. No-op when flat.
pub fn apply_rollover(
    state: &PortfolioState,
    ts: DateTime<Utc>,
    f: &FrictionConfig,
) -> (PortfolioState, f64) {
    if ts.hour() != f.rollover_hour_utc || state.position.is_flat() {
        return (state.clone(), 0.0);
    }
    let swap_pips = match state.position.direction {
        Direction::Long => f.long_swap_pips_per_day,
        Direction::Short => f.short_swap_pips_per_day,
        Direction::Flat => 0.0,
    };
    let mult = if ts.weekday() == Weekday::Wed { 3.0 } else { 1.0 };
    let amount = swap_pips * f.pip_size * state.position.lots * LOT_UNITS * mult;
    let mut next = state.clone();
    next.cash += amount;
    (next, amount)
}

/// Revalue the open position at `close_next` and refresh equity, margins,
/// peak equity, and drawdown.
pub fn mark_to_market(state: &PortfolioState, close_next: f64) -> PortfolioState {
    let mut next = state.clone();
    let pos = &next.position;
    next.unrealized_pnl = if pos.is_flat() {
        0.0
    } else {
        pos.direction.sign() * (close_next - pos.avg_entry_price) * pos.lots * LOT_UNITS
    };
    next.equity = next.cash + next.unrealized_pnl;
    next.free_margin = next.equity - next.used_margin;
    next.margin_utilization = if next.equity > 0.0 {
        (next.used_margin / next.equity).clamp(0.0, 1.0)
    } else if next.used_margin > 0.0 {
        1.0
    } else {
        0.0
    };
    if next.equity > next.peak_equity {
        next.peak_equity = next.equity;
    }
    next.current_drawdown = if next.peak_equity > 0.0 {
        ((next.peak_equity - next.equity) / next.peak_equity).max(0.0)
    } else {
        0.0
    };
    next.mark_price = close_next;
    next
}

/// True when equity violates the liquidation floor or the maintenance rule.
pub fn check_liquidation(state: &PortfolioState, r: &RiskConfig, initial_capital: f64) -> bool {
    state.equity < r.liquidation_equity_fraction * initial_capital
        || state.equity < r.maintenance_margin_ratio * state.used_margin
}

struct TradeLedger {
    cost: CostTrace,
    realized: f64,
    traded_lots: f64,
    fill_price: Option<f64>,
}

impl TradeLedger {
    fn new() -> Self {
        TradeLedger {
            cost: CostTrace::default(),
            realized: 0.0,
            traded_lots: 0.0,
            fill_price: None,
        }
    }

    fn book_friction(&mut self, lots: f64, f: &FrictionConfig) {
        self.cost.spread_cost += (f.spread_pips / 2.0) * f.pip_size * lots * LOT_UNITS;
        self.cost.slippage_cost += f.slippage_pips * f.pip_size * lots * LOT_UNITS;
        self.traded_lots += lots;
    }
}

fn entry_side(direction: Direction) -> Side {
    match direction {
        Direction::Long => Side::Buy,
        _ => Side::Sell,
    }
}

fn exit_side(direction: Direction) -> Side {
    match direction {
        Direction::Long => Side::Sell,
        _ => Side::Buy,
    }
}

fn open_lots(
    state: &mut PortfolioState,
    ledger: &mut TradeLedger,
    direction: Direction,
    lots: f64,
    fill: f64,
    f: &FrictionConfig,
) {
    let pos = &mut state.position;
    if pos.is_flat() {
        pos.direction = direction;
        pos.lots = lots;
        pos.avg_entry_price = fill;
    } else {
        debug_assert_eq!(pos.direction, direction);
        let total = pos.lots + lots;
        pos.avg_entry_price = (pos.avg_entry_price * pos.lots + fill * lots) / total;
        pos.lots = total;
    }
    let commission = f.commission_per_lot * lots;
    state.cash -= commission;
    ledger.cost.commission += commission;
    ledger.book_friction(lots, f);
    ledger.fill_price = Some(fill);
}

fn close_lots(
    state: &mut PortfolioState,
    ledger: &mut TradeLedger,
    lots: f64,
    fill: f64,
    f: &FrictionConfig,
    with_frictions: bool,
) {
    let pos = &mut state.position;
    let realized = pos.direction.sign() * (fill - pos.avg_entry_price) * lots * LOT_UNITS;
    state.cash += realized;
    state.realized_pnl += realized;
    ledger.realized += realized;
    pos.lots -= lots;
    if pos.lots <= LOT_EPS {
        *pos = Position::flat();
    }
    if with_frictions {
        ledger.book_friction(lots, f);
    } else {
        // Forced close at the raw mark: no spread/slippage embedded.
        ledger.traded_lots += lots;
    }
    ledger.fill_price = Some(fill);
}

/// Execute one proposed action over one bar transition.
///
/// Order of operations: legality coercion, pre-trade feasibility, fill at
/// `open_next`, action semantics with commission on entry legs, rollover at
/// the configured hour, mark to `close_next`, then the liquidation rule.
pub fn execute(
    state: &PortfolioState,
    proposed: Action,
    bars: &BarWindow,
    f: &FrictionConfig,
    r: &RiskConfig,
    mask: &LegalMask,
) -> Result<StepOutcome> {
    for (name, p) in
        [("close_t", bars.close_t), ("open_next", bars.open_next), ("close_next", bars.close_next)]
    {
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::Data(format!("non-finite or non-positive {name} price: {p}")));
        }
    }

    let mut executed = proposed;
    let mut violation = false;
    if !mask.is_legal(proposed.id()) {
        executed = Action::Hold;
        violation = true;
    }
    // Pre-trade feasibility on the decision-time state. Redundant with a
    // freshly computed mask, but catches stale masks.
    if executed != Action::Hold && !extended_action_legal(state, r, executed) {
        executed = Action::Hold;
        violation = true;
    }

    let mut next = state.clone();
    let mut ledger = TradeLedger::new();
    let pos_direction = state.position.direction;
    let pos_lots = state.position.lots;

    match executed {
        Action::Hold => {}
        Action::OpenLong | Action::OpenShort => {
            let direction =
                if executed == Action::OpenLong { Direction::Long } else { Direction::Short };
            let fill = quote_and_fill(entry_side(direction), bars.open_next, f);
            open_lots(&mut next, &mut ledger, direction, r.base_lot, fill, f);
        }
        Action::PyramidLong | Action::PyramidShort => {
            let fill = quote_and_fill(entry_side(pos_direction), bars.open_next, f);
            open_lots(&mut next, &mut ledger, pos_direction, r.base_lot, fill, f);
            next.position.pyramid_depth += 1;
        }
        Action::MartingaleLong | Action::MartingaleShort => {
            let add = martingale_add_lots(state, r);
            let fill = quote_and_fill(entry_side(pos_direction), bars.open_next, f);
            open_lots(&mut next, &mut ledger, pos_direction, add, fill, f);
            next.position.martingale_depth += 1;
        }
        Action::Reduce => {
            let granular =
                ((pos_lots * r.reduce_fraction + LOT_EPS) / r.base_lot).floor() * r.base_lot;
            // Below one base lot the reduction degenerates to a full close.
            let lots = if granular < r.base_lot - LOT_EPS { pos_lots } else { granular };
            let fill = quote_and_fill(exit_side(pos_direction), bars.open_next, f);
            close_lots(&mut next, &mut ledger, lots.min(pos_lots), fill, f, true);
        }
        Action::Close => {
            let fill = quote_and_fill(exit_side(pos_direction), bars.open_next, f);
            close_lots(&mut next, &mut ledger, pos_lots, fill, f, true);
        }
        Action::Reverse => {
            // Close leg and opposite open leg share the same side, hence the
            // same side-aware fill anchored at open_next.
            let fill = quote_and_fill(exit_side(pos_direction), bars.open_next, f);
            close_lots(&mut next, &mut ledger, pos_lots, fill, f, true);
            let new_direction = match pos_direction {
                Direction::Long => Direction::Short,
                _ => Direction::Long,
            };
            open_lots(&mut next, &mut ledger, new_direction, r.base_lot, fill, f);
        }
    }

    next.used_margin = if next.position.is_flat() {
        0.0
    } else {
        required_margin(next.position.lots, next.position.avg_entry_price, r)
    };

    let (after_rollover, rollover) = apply_rollover(&next, bars.ts_next, f);
    ledger.cost.rollover = rollover;
    next = after_rollover;

    next = mark_to_market(&next, bars.close_next);

    let mut liquidation_event = false;
    if !state.liquidated && check_liquidation(&next, r, state.initial_capital) {
        // Forced full close at the mark; exit legs pay no commission.
        if !next.position.is_flat() {
            let lots = next.position.lots;
            close_lots(&mut next, &mut ledger, lots, bars.close_next, f, false);
            next.used_margin = 0.0;
            next = mark_to_market(&next, bars.close_next);
        }
        next.liquidated = true;
        liquidation_event = true;
    }

    Ok(StepOutcome {
        executed_action: executed,
        violation,
        liquidation_event,
        cost_trace: ledger.cost,
        realized_delta: next.realized_pnl - state.realized_pnl,
        unrealized_delta: next.unrealized_pnl - state.unrealized_pnl,
        fill_price: ledger.fill_price,
        traded_lots: ledger.traded_lots,
        next_state: next,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn ts(weekday_offset: i64, hour: u32) -> DateTime<Utc> {
        // 2022-01-03 is a Monday.
        Utc.with_ymd_and_hms(2022, 1, 3, hour, 0, 0).unwrap()
            + chrono::Duration::days(weekday_offset)
    }

    fn window(open_next: f64, close_next: f64) -> BarWindow {
        BarWindow { close_t: open_next, open_next, close_next, ts_next: ts(0, 1) }
    }

    fn full_mask() -> LegalMask {
        LegalMask::new(vec![true; 10])
    }

    fn state() -> PortfolioState {
        PortfolioState::new(100_000.0, 1.10)
    }

    #[test]
    fn fill_arithmetic() {
        let f = FrictionConfig::default();
        let buy = quote_and_fill(Side::Buy, 1.10000, &f);
        let sell = quote_and_fill(Side::Sell, 1.10000, &f);
        assert!((buy - 1.10010).abs() < 1e-12);
        assert!((sell - 1.09990).abs() < 1e-12);
    }

    #[test]
    fn frictionless_fill_is_identity() {
        let f = FrictionConfig::frictionless();
        assert_eq!(quote_and_fill(Side::Buy, 1.2345, &f), 1.2345);
        assert_eq!(quote_and_fill(Side::Sell, 1.2345, &f), 1.2345);
    }

    #[test]
    fn open_long_books_commission_and_fill() {
        let f = FrictionConfig::default();
        let r = RiskConfig::default();
        let out =
            execute(&state(), Action::OpenLong, &window(1.10000, 1.10000), &f, &r, &full_mask())
                .unwrap();
        let pos = out.next_state.position;
        assert_eq!(pos.direction, Direction::Long);
        assert!((pos.lots - 0.1).abs() < 1e-12);
        assert!((pos.avg_entry_price - 1.10010).abs() < 1e-12);
        assert!((out.cost_trace.commission - 0.35).abs() < 1e-12);
        assert_eq!(out.fill_price, Some(pos.avg_entry_price));
        assert!(!out.violation);
    }

    #[test]
    fn illegal_proposal_coerces_to_hold() {
        let f = FrictionConfig::default();
        let r = RiskConfig::default();
        let st = state();
        // Flat position: PYRAMID_LONG is illegal per the legality table.
        let mask = crate::env::compute_extended_mask(&st, &r);
        let out =
            execute(&st, Action::PyramidLong, &window(1.10, 1.10), &f, &r, &mask).unwrap();
        assert_eq!(out.executed_action, Action::Hold);
        assert!(out.violation);
        assert_eq!(out.next_state.position, Position::flat());
        assert_eq!(out.traded_lots, 0.0);
    }

    /// Brute-force PnL oracle: lots * 100,000 * price delta.
    #[test]
    fn close_realizes_price_delta() {
        let f = FrictionConfig::default();
        let r = RiskConfig::default();
        let mut st = state();
        st.position =
            Position { direction: Direction::Long, lots: 0.1, avg_entry_price: 1.10010,
                pyramid_depth: 0, martingale_depth: 0 };
        st.used_margin = required_margin(0.1, 1.10010, &r);
        let out =
            execute(&st, Action::Close, &window(1.11010, 1.11010), &f, &r, &full_mask()).unwrap();
        // Sell fill 1.11000 after 1 pip of friction; delta 99 pips on 0.1 lot.
        let expected = (1.11000 - 1.10010) * 0.1 * LOT_UNITS;
        assert!((out.realized_delta - expected).abs() < 1e-9, "{}", out.realized_delta);
        assert!((out.realized_delta - 99.0).abs() < 1e-9);
        assert!(out.next_state.position.is_flat());
    }

    #[test]
    fn rollover_tuesday_and_triple_wednesday() {
        let f = FrictionConfig::default();
        let mut st = state();
        st.position = Position { direction: Direction::Long, lots: 0.1, avg_entry_price: 1.1,
            pyramid_depth: 0, martingale_depth: 0 };
        // Tuesday 22:00 UTC.
        let (next, amt) = apply_rollover(&st, ts(1, 22), &f);
        assert!((amt + 0.50).abs() < 1e-12);
        assert!((next.cash - (st.cash - 0.50)).abs() < 1e-12);
        // Wednesday 22:00 UTC: triple.
        let (_, amt3) = apply_rollover(&st, ts(2, 22), &f);
        assert!((amt3 + 1.50).abs() < 1e-12);
        // Off-hour: no-op.
        let (_, amt0) = apply_rollover(&st, ts(1, 21), &f);
        assert_eq!(amt0, 0.0);
    }

    #[test]
    fn rollover_noop_when_flat() {
        let f = FrictionConfig::default();
        let (next, amt) = apply_rollover(&state(), ts(1, 22), &f);
        assert_eq!(amt, 0.0);
        assert_eq!(next.cash, 100_000.0);
    }

    #[test]
    fn mark_to_market_signs() {
        let mut st = state();
        st.position = Position { direction: Direction::Long, lots: 0.1, avg_entry_price: 1.1000,
            pyramid_depth: 0, martingale_depth: 0 };
        let marked = mark_to_market(&st, 1.1010);
        assert!((marked.unrealized_pnl - 10.0).abs() < 1e-9);
        assert_eq!(marked.equity, marked.cash + marked.unrealized_pnl);

        st.position.direction = Direction::Short;
        let marked = mark_to_market(&st, 1.1010);
        assert!((marked.unrealized_pnl + 10.0).abs() < 1e-9);

        st.position = Position::flat();
        let marked = mark_to_market(&st, 1.1010);
        assert_eq!(marked.unrealized_pnl, 0.0);
        assert_eq!(marked.equity, marked.cash);
    }

    #[test]
    fn liquidation_thresholds() {
        let r = RiskConfig::default();
        let mut st = state();
        st.equity = 24_999.0;
        assert!(check_liquidation(&st, &r, 100_000.0));
        st.equity = 100_000.0;
        st.used_margin = 0.0;
        assert!(!check_liquidation(&st, &r, 100_000.0));
        st.equity = 400.0;
        st.used_margin = 1_000.0;
        assert!(check_liquidation(&st, &r, 1_000.0));
    }

    #[test]
    fn frictionless_round_trip_is_zero_pnl() {
        let f = FrictionConfig::frictionless();
        let r = RiskConfig::default();
        let st = state();
        let mask = crate::env::compute_extended_mask(&st, &r);
        let out = execute(&st, Action::OpenLong, &window(1.10, 1.10), &f, &r, &mask).unwrap();
        let st2 = out.next_state;
        let mask2 = crate::env::compute_extended_mask(&st2, &r);
        let out2 = execute(&st2, Action::Close, &window(1.10, 1.10), &f, &r, &mask2).unwrap();
        assert_eq!(out2.next_state.realized_pnl, 0.0);
        assert_eq!(out2.next_state.equity, 100_000.0);
        assert_eq!(out2.next_state.cash, 100_000.0);
    }

    #[test]
    fn reverse_pays_frictions_on_both_legs() {
        let f = FrictionConfig::default();
        let r = RiskConfig::default();
        let mut st = state();
        st.position = Position { direction: Direction::Long, lots: 0.1, avg_entry_price: 1.1,
            pyramid_depth: 1, martingale_depth: 0 };
        st.used_margin = required_margin(0.1, 1.1, &r);
        st = mark_to_market(&st, 1.10);
        let out = execute(&st, Action::Reverse, &window(1.10, 1.10), &f, &r, &full_mask())
            .unwrap();
        let pos = out.next_state.position;
        assert_eq!(pos.direction, Direction::Short);
        assert!((pos.lots - 0.1).abs() < 1e-12);
        assert_eq!(pos.pyramid_depth, 0);
        // Both legs traded => 0.2 lots of spread/slippage, one entry commission.
        assert!((out.traded_lots - 0.2).abs() < 1e-12);
        assert!((out.cost_trace.commission - 0.35).abs() < 1e-12);
    }

    #[test]
    fn reduce_halves_then_acts_as_close_at_base_lot() {
        let f = FrictionConfig::frictionless();
        let r = RiskConfig::default();
        let mut st = state();
        st.position = Position { direction: Direction::Long, lots: 0.2, avg_entry_price: 1.1,
            pyramid_depth: 1, martingale_depth: 0 };
        st.used_margin = required_margin(0.2, 1.1, &r);
        st = mark_to_market(&st, 1.10);
        let out = execute(&st, Action::Reduce, &window(1.10, 1.10), &f, &r, &full_mask())
            .unwrap();
        assert!((out.next_state.position.lots - 0.1).abs() < 1e-12);
        // A second reduce on the base lot closes the position entirely.
        let st2 = out.next_state.clone();
        let out2 = execute(&st2, Action::Reduce, &window(1.10, 1.10), &f, &r, &full_mask())
            .unwrap();
        assert!(out2.next_state.position.is_flat());
    }

    #[test]
    fn martingale_doubles_and_requires_adverse_move() {
        let f = FrictionConfig::frictionless();
        let r = RiskConfig::default();
        let st = state();
        let mask = crate::env::compute_extended_mask(&st, &r);
        let out = execute(&st, Action::OpenLong, &window(1.10, 1.10), &f, &r, &mask).unwrap();
        let flatish = out.next_state;
        // No adverse movement yet: martingale is illegal.
        assert!(!extended_action_legal(&flatish, &r, Action::MartingaleLong));
        // Mark below entry: now legal, and the add is 0.2 lots.
        let adverse = mark_to_market(&flatish, 1.09);
        assert!(extended_action_legal(&adverse, &r, Action::MartingaleLong));
        let mask2 = crate::env::compute_extended_mask(&adverse, &r);
        let out2 =
            execute(&adverse, Action::MartingaleLong, &window(1.09, 1.09), &f, &r, &mask2)
                .unwrap();
        assert!((out2.next_state.position.lots - 0.3).abs() < 1e-12);
        assert_eq!(out2.next_state.position.martingale_depth, 1);
    }

    #[test]
    fn accounting_identity_and_cash_paths_over_random_actions() {
        use rand::Rng;
        use rand::SeedableRng;
        let f = FrictionConfig::default();
        let r = RiskConfig::default();
        let mut rng = rand_pcg::Pcg64::seed_from_u64(11);
        let mut st = state();
        let mut price = 1.10;
        let mut commissions = 0.0;
        let mut rollovers = 0.0;
        let mut realized = 0.0;
        for step in 0..3000 {
            let mask = crate::env::compute_extended_mask(&st, &r);
            let legal = mask.legal_ids();
            let a = Action::from_id(legal[rng.gen_range(0..legal.len())]).unwrap();
            let open_next = price * (1.0 + 0.0004 * (rng.gen::<f64>() - 0.5));
            let close_next = open_next * (1.0 + 0.0008 * (rng.gen::<f64>() - 0.5));
            let bars = BarWindow {
                close_t: price,
                open_next,
                close_next,
                ts_next: ts(step % 5, (step % 24) as u32),
            };
            let out = execute(&st, a, &bars, &f, &r, &mask).unwrap();
            assert_eq!(out.next_state.equity, out.next_state.cash + out.next_state.unrealized_pnl);
            assert!(out.next_state.position.pyramid_depth <= r.depth_cap);
            assert!(out.next_state.position.martingale_depth <= r.depth_cap);
            assert!(
                out.next_state.used_margin
                    <= out.next_state.equity.max(0.0) * r.max_leverage + 1e-9
            );
            commissions += out.cost_trace.commission;
            rollovers += out.cost_trace.rollover;
            realized += out.realized_delta;
            st = out.next_state;
            price = close_next;
            if st.liquidated {
                break;
            }
        }
        let recon = realized + st.unrealized_pnl + rollovers - commissions;
        assert!(
            ((st.equity - st.initial_capital) - recon).abs() < 1e-6,
            "reconciliation off: {} vs {}",
            st.equity - st.initial_capital,
            recon
        );
    }

    #[test]
    fn liquidated_state_only_holds() {
        let f = FrictionConfig::default();
        let r = RiskConfig::default();
        let mut st = state();
        st.liquidated = true;
        for a in crate::env::EXTENDED_ACTIONS {
            assert_eq!(extended_action_legal(&st, &r, a), a == Action::Hold);
        }
        let mask = crate::env::compute_extended_mask(&st, &r);
        let out = execute(&st, Action::OpenLong, &window(1.1, 1.1), &f, &r, &mask).unwrap();
        assert_eq!(out.executed_action, Action::Hold);
        assert!(out.violation);
    }

    #[test]
    fn non_finite_prices_are_data_errors() {
        let f = FrictionConfig::default();
        let r = RiskConfig::default();
        let mut w = window(1.1, 1.1);
        w.open_next = f64::NAN;
        assert!(matches!(
            execute(&state(), Action::Hold, &w, &f, &r, &full_mask()),
            Err(Error::Data(_))
        ));
    }
}
