//! The metric battery over equity curves, trade records, and step logs.
//! Single streaming pass; hourly FX annualization (24 x 252 periods/year).

use chrono::{DateTime, Utc};
use serde::Serialize;

use super::trades::TradeRecord;
use crate::env::StepInfo;

/// Hourly periods per trading year for a 24/5 market.
pub const ANNUALIZATION: f64 = 24.0 * 252.0;

/// Ordered (timestamp, equity) samples; the first point is the initial
/// capital at the reset bar.
#[derive(Debug, Clone)]
pub struct EquityCurve {
    pub points: Vec<(DateTime<Utc>, f64)>,
}

impl EquityCurve {
    pub fn new(start: DateTime<Utc>, initial: f64) -> Self {
        EquityCurve { points: vec![(start, initial)] }
    }

    pub fn push(&mut self, ts: DateTime<Utc>, equity: f64) {
        self.points.push((ts, equity));
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn equities(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|(_, e)| *e)
    }

    pub fn final_equity(&self) -> f64 {
        self.points.last().map(|(_, e)| *e).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub cumulative_return: f64,
    pub annualized_return: f64,
    pub annualized_vol: f64,
    pub sharpe: f64,
    pub sortino: f64,
    pub max_drawdown: f64,
    pub win_rate: f64,
    pub turnover: f64,
    pub trade_count: usize,
    pub liquidation_count: usize,
    pub avg_pyramid_depth: f64,
    pub avg_martingale_depth: f64,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str = "cumulative_return,annualized_return,annualized_vol,\
sharpe,sortino,max_drawdown,win_rate,turnover,trade_count,liquidation_count,\
avg_pyramid_depth,avg_martingale_depth";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.cumulative_return,
            self.annualized_return,
            self.annualized_vol,
            self.sharpe,
            self.sortino,
            self.max_drawdown,
            self.win_rate,
            self.turnover,
            self.trade_count,
            self.liquidation_count,
            self.avg_pyramid_depth,
            self.avg_martingale_depth
        )
    }
}

/// Streaming metric computation: one pass over the curve for return
/// moments and drawdown, one pass over steps for activity statistics.
///
/// Conventions: per-step simple returns; population standard deviation;
/// Sortino downside = RMS of negative returns over all steps; zero
/// volatility maps ratios to 0; risk-free rate 0; turnover counts both
/// entry and exit legs in lots.
pub fn compute_metrics(
    curve: &EquityCurve,
    trades: &[TradeRecord],
    steps: &[StepInfo],
) -> MetricsReport {
    let e0 = curve.points.first().map(|(_, e)| *e).unwrap_or(0.0);
    let et = curve.final_equity();
    let cumulative_return = if e0 > 0.0 { et / e0 - 1.0 } else { 0.0 };

    // Welford moments + downside accumulator + running-peak drawdown.
    let mut n = 0u64;
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut downside_sq = 0.0f64;
    let mut peak = f64::NEG_INFINITY;
    let mut max_drawdown = 0.0f64;
    let mut prev: Option<f64> = None;
    for e in curve.equities() {
        if let Some(p) = prev {
            let r = if p > 0.0 { e / p - 1.0 } else { 0.0 };
            n += 1;
            let d = r - mean;
            mean += d / n as f64;
            m2 += d * (r - mean);
            if r < 0.0 {
                downside_sq += r * r;
            }
        }
        prev = Some(e);
        if e > peak {
            peak = e;
        }
        if peak > 0.0 {
            let dd = (peak - e) / peak;
            if dd > max_drawdown {
                max_drawdown = dd;
            }
        }
    }
    let std = if n > 0 { (m2 / n as f64).sqrt() } else { 0.0 };
    let downside = if n > 0 { (downside_sq / n as f64).sqrt() } else { 0.0 };
    let annualized_return = mean * ANNUALIZATION;
    let annualized_vol = std * ANNUALIZATION.sqrt();
    let sharpe = if std > 0.0 { mean / std * ANNUALIZATION.sqrt() } else { 0.0 };
    let sortino = if downside > 0.0 { mean / downside * ANNUALIZATION.sqrt() } else { 0.0 };

    let mut turnover = 0.0;
    let mut liquidation_count = 0;
    let mut pyr_sum = 0.0;
    let mut mart_sum = 0.0;
    for s in steps {
        turnover += s.traded_lots;
        if s.liquidation_event {
            liquidation_count += 1;
        }
        pyr_sum += s.pyramid_depth as f64;
        mart_sum += s.martingale_depth as f64;
    }
    let steps_n = steps.len().max(1) as f64;

    let wins = trades.iter().filter(|t| t.net_pnl > 0.0).count();
    let win_rate = if trades.is_empty() { 0.0 } else { wins as f64 / trades.len() as f64 };

    MetricsReport {
        cumulative_return,
        annualized_return,
        annualized_vol,
        sharpe,
        sortino,
        max_drawdown,
        win_rate,
        turnover,
        trade_count: trades.len(),
        liquidation_count,
        avg_pyramid_depth: pyr_sum / steps_n,
        avg_martingale_depth: mart_sum / steps_n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn curve_of(equities: &[f64]) -> EquityCurve {
        let t0 = Utc.with_ymd_and_hms(2022, 1, 3, 0, 0, 0).unwrap();
        let mut c = EquityCurve::new(t0, equities[0]);
        for (i, &e) in equities.iter().enumerate().skip(1) {
            c.push(t0 + chrono::Duration::hours(i as i64), e);
        }
        c
    }

    #[test]
    fn max_drawdown_brute_force_fixture() {
        // Peak 110, trough 99: (110 - 99) / 110 = 10%.
        let m = compute_metrics(&curve_of(&[100.0, 110.0, 99.0, 105.0]), &[], &[]);
        assert!((m.max_drawdown - 0.10).abs() < 1e-12);
        // Brute force over all prefix maxima agrees.
        let eq = [100.0, 110.0, 99.0, 105.0];
        let mut brute: f64 = 0.0;
        for i in 0..eq.len() {
            let peak = eq[..=i].iter().cloned().fold(f64::MIN, f64::max);
            brute = brute.max((peak - eq[i]) / peak);
        }
        assert!((m.max_drawdown - brute).abs() < 1e-15);
    }

    #[test]
    fn constant_curve_degenerates_to_zero() {
        let m = compute_metrics(&curve_of(&[100.0, 100.0, 100.0]), &[], &[]);
        assert_eq!(m.sharpe, 0.0);
        assert_eq!(m.sortino, 0.0);
        assert_eq!(m.max_drawdown, 0.0);
        assert_eq!(m.cumulative_return, 0.0);
        assert_eq!(m.win_rate, 0.0);
    }

    #[test]
    fn single_winning_trade() {
        let t0 = Utc.with_ymd_and_hms(2022, 1, 3, 0, 0, 0).unwrap();
        let trade = TradeRecord {
            open_timestamp: t0,
            open_price: 1.1,
            close_timestamp: t0 + chrono::Duration::hours(5),
            close_price: 1.2,
            direction: 1,
            lots_entered: 0.1,
            gross_realized: 1000.0,
            commission: 0.35,
            rollover: 0.0,
            net_pnl: 999.65,
            open_at_end: false,
        };
        let m = compute_metrics(&curve_of(&[100.0, 101.0]), &[trade], &[]);
        assert_eq!(m.trade_count, 1);
        assert_eq!(m.win_rate, 1.0);
    }

    #[test]
    fn cumulative_return_is_endpoint_ratio() {
        let m = compute_metrics(&curve_of(&[100.0, 120.0, 90.0, 130.0]), &[], &[]);
        assert!((m.cumulative_return - 0.30).abs() < 1e-12);
    }
}
