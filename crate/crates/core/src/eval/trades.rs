//! Trade extraction: one record per position cycle (entry to flat), built
//! from the per-step log.

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::env::StepInfo;

/// One position round trip. `gross_realized` is price-based PnL only;
/// commission and rollover are carried separately so reconciliation can
/// re-derive equity. Cycles still open at the end of a rollout close
/// virtually at the final mark with `open_at_end` set.
#[derive(Debug, Clone, Serialize)]
pub struct TradeRecord {
    pub open_timestamp: DateTime<Utc>,
    pub open_price: f64,
    pub close_timestamp: DateTime<Utc>,
    pub close_price: f64,
    /// +1 long, -1 short.
    pub direction: i8,
    /// Total lots entered over the cycle (initial plus scaling adds).
    pub lots_entered: f64,
    pub gross_realized: f64,
    pub commission: f64,
    pub rollover: f64,
    /// gross_realized - commission + rollover, plus the final unrealized
    /// mark for cycles open at the end.
    pub net_pnl: f64,
    pub open_at_end: bool,
}

#[derive(Debug)]
struct OpenCycle {
    open_timestamp: DateTime<Utc>,
    open_price: f64,
    direction: i8,
    lots_entered: f64,
    gross_realized: f64,
    commission: f64,
    rollover: f64,
}

impl OpenCycle {
    fn start(s: &StepInfo) -> Self {
        OpenCycle {
            open_timestamp: s.timestamp,
            open_price: s.fill_price.unwrap_or(0.0),
            direction: s.direction,
            lots_entered: s.lots,
            gross_realized: 0.0,
            commission: 0.0,
            rollover: 0.0,
        }
    }

    fn finish(self, last: &StepInfo, open_at_end: bool, final_unrealized: f64) -> TradeRecord {
        let tail = if open_at_end { final_unrealized } else { 0.0 };
        TradeRecord {
            open_timestamp: self.open_timestamp,
            open_price: self.open_price,
            close_timestamp: last.timestamp,
            close_price: last.fill_price.unwrap_or(0.0),
            direction: self.direction,
            lots_entered: self.lots_entered,
            gross_realized: self.gross_realized,
            commission: self.commission,
            rollover: self.rollover,
            net_pnl: self.gross_realized + tail - self.commission + self.rollover,
            open_at_end,
        }
    }
}

/// Fold a step log into position cycles. Steps must be in order and carry
/// post-step position state.
pub fn extract_trades(steps: &[StepInfo], final_unrealized: f64) -> Vec<TradeRecord> {
    let mut trades = Vec::new();
    let mut open: Option<OpenCycle> = None;
    let mut prev_lots = 0.0f64;
    for s in steps {
        match open.as_mut() {
            None => {
                if s.lots > 0.0 {
                    let mut cycle = OpenCycle::start(s);
                    cycle.commission = s.cost_trace.commission;
                    cycle.rollover = s.cost_trace.rollover;
                    cycle.gross_realized = s.realized_delta;
                    open = Some(cycle);
                }
            }
            Some(cycle) => {
                if s.direction != 0 && s.direction != cycle.direction {
                    // Reversal: realized PnL closes the old cycle; the entry
                    // commission and any rollover belong to the new one.
                    let mut done = open.take().unwrap();
                    done.gross_realized += s.realized_delta;
                    trades.push(done.finish(s, false, 0.0));
                    let mut fresh = OpenCycle::start(s);
                    fresh.commission = s.cost_trace.commission;
                    fresh.rollover = s.cost_trace.rollover;
                    open = Some(fresh);
                } else {
                    if s.lots > prev_lots {
                        cycle.lots_entered += s.lots - prev_lots;
                    }
                    cycle.gross_realized += s.realized_delta;
                    cycle.commission += s.cost_trace.commission;
                    cycle.rollover += s.cost_trace.rollover;
                    if s.lots == 0.0 {
                        let done = open.take().unwrap();
                        trades.push(done.finish(s, false, 0.0));
                    }
                }
            }
        }
        prev_lots = s.lots;
    }
    if let Some(cycle) = open.take() {
        if let Some(last) = steps.last() {
            trades.push(cycle.finish(last, true, final_unrealized));
        }
    }
    trades
}
