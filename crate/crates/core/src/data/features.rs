//! Causal feature engineering over OHLCV bars.
//!
//! Two deterministic namespaces with a fixed column order shared by every
//! run: the technical block (moving averages, RSI, MACD, Bollinger bands,
//! log return, rolling volatility) followed by the microstructure block
//! (spread proxy, price-change proxy, realized-volatility proxy, session
//! label). Every value at row `t` is a function of bars `0..=t` only.

use chrono::{DateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};

use super::bar::Bar;
use crate::error::{Error, Result};

/// Rows discarded from the head of each slice so every indicator is fully
/// warmed up before the first emitted row: longest lookback (50) plus the
/// observation window (24).
pub const FEATURE_WARMUP: usize = 74;

/// Column-count switches for the multi-part indicators. Defaults emit the
/// full 19-column canonical set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureConfig {
    /// 1 emits only the MACD line; 3 adds signal and histogram.
    pub macd_columns: usize,
    /// 1 emits only the Bollinger midline; 3 adds upper and lower bands.
    pub bollinger_columns: usize,
    /// Lookback of the price-change proxy, in bars.
    pub price_change_horizon: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { macd_columns: 3, bollinger_columns: 3, price_change_horizon: 1 }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.macd_columns, 1 | 3) {
            return Err(Error::Config(format!(
                "features.macd_columns must be 1 or 3, got {}",
                self.macd_columns
            )));
        }
        if !matches!(self.bollinger_columns, 1 | 3) {
            return Err(Error::Config(format!(
                "features.bollinger_columns must be 1 or 3, got {}",
                self.bollinger_columns
            )));
        }
        if self.price_change_horizon == 0 || self.price_change_horizon > 50 {
            return Err(Error::Config(format!(
                "features.price_change_horizon must lie in 1..=50, got {}",
                self.price_change_horizon
            )));
        }
        Ok(())
    }

    /// Canonical ordered column names for this configuration.
    pub fn names(&self) -> Vec<String> {
        let mut names: Vec<String> = vec![
            "sma_10".into(),
            "sma_20".into(),
            "sma_50".into(),
            "ema_10".into(),
            "ema_20".into(),
            "ema_50".into(),
            "rsi_14".into(),
            "macd_line".into(),
        ];
        if self.macd_columns == 3 {
            names.push("macd_signal".into());
            names.push("macd_hist".into());
        }
        names.push("bb_mid".into());
        if self.bollinger_columns == 3 {
            names.push("bb_upper".into());
            names.push("bb_lower".into());
        }
        names.push("log_return".into());
        names.push("rolling_vol".into());
        names.push("spread_proxy".into());
        names.push("price_change".into());
        names.push("realized_vol".into());
        names.push("session".into());
        names
    }

    pub fn width(&self) -> usize {
        13 + self.macd_columns + self.bollinger_columns
    }
}

/// Row-major feature matrix with canonical column names and per-row
/// timestamps. Windows of consecutive rows are contiguous slices.
#[derive(Debug, Clone)]
pub struct FeatureFrame {
    pub names: Vec<String>,
    pub timestamps: Vec<DateTime<Utc>>,
    pub width: usize,
    values: Vec<f64>,
}

impl FeatureFrame {
    pub fn new(names: Vec<String>) -> Self {
        let width = names.len();
        FeatureFrame { names, timestamps: Vec::new(), width, values: Vec::new() }
    }

    pub fn push_row(&mut self, ts: DateTime<Utc>, row: &[f64]) {
        debug_assert_eq!(row.len(), self.width);
        self.timestamps.push(ts);
        self.values.extend_from_slice(row);
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    /// Contiguous slice of the `len` rows ending at (and including) `end`.
    pub fn window(&self, end: usize, len: usize) -> &[f64] {
        let start = end + 1 - len;
        &self.values[start * self.width..(end + 1) * self.width]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn append(&mut self, other: &FeatureFrame) {
        debug_assert_eq!(self.width, other.width);
        self.timestamps.extend_from_slice(&other.timestamps);
        self.values.extend_from_slice(&other.values);
    }
}

/// UTC trading-session label scaled to [0, 1]: Asia 22–07, London 07–13,
/// New York 13–21, off-session otherwise, encoded 0..3 then divided by 3.
fn session_label(ts: &DateTime<Utc>) -> f64 {
    let h = ts.hour();
    let label = if !(7..22).contains(&h) {
        0.0
    } else if h < 13 {
        1.0
    } else if h < 21 {
        2.0
    } else {
        3.0
    };
    label / 3.0
}

/// Incremental causal indicator state. One `push` per bar; readings at any
/// point reflect only the bars pushed so far.
struct IndicatorState {
    closes: Vec<f64>,
    log_returns: Vec<f64>,
    ema10: Ema,
    ema20: Ema,
    ema50: Ema,
    ema12: Ema,
    ema26: Ema,
    macd_signal: Ema,
    rsi: WilderRsi,
    macd_line: f64,
}

impl IndicatorState {
    fn new() -> Self {
        IndicatorState {
            closes: Vec::new(),
            log_returns: Vec::new(),
            ema10: Ema::new(10),
            ema20: Ema::new(20),
            ema50: Ema::new(50),
            ema12: Ema::new(12),
            ema26: Ema::new(26),
            macd_signal: Ema::new(9),
            rsi: WilderRsi::new(14),
            macd_line: 0.0,
        }
    }

    fn push(&mut self, close: f64) {
        if let Some(&prev) = self.closes.last() {
            self.log_returns.push((close / prev).ln());
        }
        self.closes.push(close);
        self.ema10.push(close);
        self.ema20.push(close);
        self.ema50.push(close);
        self.ema12.push(close);
        self.ema26.push(close);
        self.macd_line = self.ema12.value() - self.ema26.value();
        self.macd_signal.push(self.macd_line);
        self.rsi.push(close);
    }

    fn sma(&self, period: usize) -> f64 {
        let n = self.closes.len();
        let w = &self.closes[n - period..];
        w.iter().sum::<f64>() / period as f64
    }

    fn close_std(&self, period: usize) -> f64 {
        let n = self.closes.len();
        let w = &self.closes[n - period..];
        crate::util::mean_std(w).1
    }

    fn rolling_vol(&self, period: usize) -> f64 {
        let n = self.log_returns.len();
        if n == 0 {
            return 0.0;
        }
        let take = period.min(n);
        crate::util::mean_std(&self.log_returns[n - take..]).1
    }

    fn realized_vol(&self, period: usize) -> f64 {
        let n = self.log_returns.len();
        if n == 0 {
            return 0.0;
        }
        let take = period.min(n);
        let w = &self.log_returns[n - take..];
        (w.iter().map(|r| r * r).sum::<f64>() / take as f64).sqrt()
    }
}

/// EMA seeded with the first observation.
struct Ema {
    alpha: f64,
    value: f64,
    seeded: bool,
}

impl Ema {
    fn new(period: usize) -> Self {
        Ema { alpha: 2.0 / (period as f64 + 1.0), value: 0.0, seeded: false }
    }

    fn push(&mut self, v: f64) {
        if self.seeded {
            self.value = self.alpha * v + (1.0 - self.alpha) * self.value;
        } else {
            self.value = v;
            self.seeded = true;
        }
    }

    fn value(&self) -> f64 {
        self.value
    }
}

/// Wilder-smoothed RSI. The flat-series degenerate case (zero average gain
/// and zero average loss) maps to the neutral 50.
struct WilderRsi {
    period: usize,
    prev: Option<f64>,
    seen_diffs: usize,
    gain_sum: f64,
    loss_sum: f64,
    avg_gain: f64,
    avg_loss: f64,
}

impl WilderRsi {
    fn new(period: usize) -> Self {
        WilderRsi {
            period,
            prev: None,
            seen_diffs: 0,
            gain_sum: 0.0,
            loss_sum: 0.0,
            avg_gain: 0.0,
            avg_loss: 0.0,
        }
    }

    fn push(&mut self, close: f64) {
        if let Some(prev) = self.prev {
            let diff = close - prev;
            let (gain, loss) = if diff >= 0.0 { (diff, 0.0) } else { (0.0, -diff) };
            self.seen_diffs += 1;
            let p = self.period as f64;
            if self.seen_diffs <= self.period {
                self.gain_sum += gain;
                self.loss_sum += loss;
                if self.seen_diffs == self.period {
                    self.avg_gain = self.gain_sum / p;
                    self.avg_loss = self.loss_sum / p;
                }
            } else {
                self.avg_gain = (self.avg_gain * (p - 1.0) + gain) / p;
                self.avg_loss = (self.avg_loss * (p - 1.0) + loss) / p;
            }
        }
        self.prev = Some(close);
    }

    fn value(&self) -> f64 {
        if self.seen_diffs < self.period {
            return 50.0;
        }
        if self.avg_loss == 0.0 && self.avg_gain == 0.0 {
            return 50.0;
        }
        if self.avg_loss == 0.0 {
            return 100.0;
        }
        let rs = self.avg_gain / self.avg_loss;
        100.0 - 100.0 / (1.0 + rs)
    }
}

fn build_rows(
    context: &[Bar],
    slice: &[Bar],
    cfg: &FeatureConfig,
    emit_from: usize,
) -> Result<FeatureFrame> {
    cfg.validate()?;
    let mut state = IndicatorState::new();
    let mut frame = FeatureFrame::new(cfg.names());
    let total = context.len() + slice.len();
    let mut row = vec![0.0f64; cfg.width()];
    for i in 0..total {
        let bar = if i < context.len() { &context[i] } else { &slice[i - context.len()] };
        state.push(bar.close);
        if i < emit_from {
            continue;
        }
        let mut k = 0;
        let mut put = |v: f64| {
            row[k] = v;
            k += 1;
        };
        put(state.sma(10));
        put(state.sma(20));
        put(state.sma(50));
        put(state.ema10.value());
        put(state.ema20.value());
        put(state.ema50.value());
        put(state.rsi.value());
        put(state.macd_line);
        if cfg.macd_columns == 3 {
            put(state.macd_signal.value());
            put(state.macd_line - state.macd_signal.value());
        }
        let bb_mid = state.sma(20);
        let bb_std = state.close_std(20);
        put(bb_mid);
        if cfg.bollinger_columns == 3 {
            put(bb_mid + 2.0 * bb_std);
            put(bb_mid - 2.0 * bb_std);
        }
        put(state.log_returns.last().copied().unwrap_or(0.0));
        put(state.rolling_vol(20));
        // Microstructure block.
        let spread_proxy = if bar.close != 0.0 { (bar.high - bar.low) / bar.close } else { 0.0 };
        put(spread_proxy);
        let h = cfg.price_change_horizon;
        let n = state.closes.len();
        put(if n > h { bar.close - state.closes[n - 1 - h] } else { 0.0 });
        put(state.realized_vol(20));
        put(session_label(&bar.timestamp));
        debug_assert_eq!(k, cfg.width());
        frame.push_row(bar.timestamp, &row);
    }
    Ok(frame)
}

/// Engineer the canonical feature set over a bar slice, discarding the
/// warm-up head so every emitted row is fully determined.
pub fn compute_features(bars: &[Bar], cfg: &FeatureConfig) -> Result<FeatureFrame> {
    if bars.len() <= FEATURE_WARMUP {
        return Err(Error::Data(format!(
            "insufficient data: need more than {FEATURE_WARMUP} bars for feature warm-up, got {}",
            bars.len()
        )));
    }
    build_rows(&[], bars, cfg, FEATURE_WARMUP)
}

/// Engineer features for `slice`, warming indicators up on the tail of
/// `context` (the preceding slice) instead of consuming `slice` rows.
/// Emits exactly one row per bar of `slice`.
pub fn compute_features_with_context(
    context: &[Bar],
    slice: &[Bar],
    cfg: &FeatureConfig,
) -> Result<FeatureFrame> {
    if context.len() < FEATURE_WARMUP {
        return Err(Error::Data(format!(
            "insufficient context: need at least {FEATURE_WARMUP} bars, got {}",
            context.len()
        )));
    }
    if slice.is_empty() {
        return Err(Error::Data("empty slice for feature computation".into()));
    }
    build_rows(context, slice, cfg, context.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn flat_bars(n: usize, price: f64) -> Vec<Bar> {
        (0..n)
            .map(|i| Bar {
                timestamp: Utc.with_ymd_and_hms(2022, 1, 3, 0, 0, 0).unwrap()
                    + chrono::Duration::hours(i as i64),
                open: price,
                high: price,
                low: price,
                close: price,
                volume: 1.0,
            })
            .collect()
    }

    fn idx(frame: &FeatureFrame, name: &str) -> usize {
        frame.names.iter().position(|n| n == name).unwrap()
    }

    #[test]
    fn canonical_width_and_names() {
        let cfg = FeatureConfig::default();
        assert_eq!(cfg.width(), 19);
        assert_eq!(cfg.names().len(), 19);
        assert_eq!(cfg.names()[0], "sma_10");
        assert_eq!(cfg.names()[18], "session");
    }

    #[test]
    fn constant_series_degenerate_values() {
        let bars = flat_bars(120, 1.25);
        let frame = compute_features(&bars, &FeatureConfig::default()).unwrap();
        assert_eq!(frame.len(), 120 - FEATURE_WARMUP);
        let r = frame.row(0);
        assert_eq!(r[idx(&frame, "rsi_14")], 50.0);
        assert_eq!(r[idx(&frame, "log_return")], 0.0);
        assert_eq!(r[idx(&frame, "rolling_vol")], 0.0);
        assert_eq!(r[idx(&frame, "spread_proxy")], 0.0);
        assert_eq!(r[idx(&frame, "sma_10")], 1.25);
        assert_eq!(r[idx(&frame, "ema_50")], 1.25);
    }

    #[test]
    fn spread_proxy_arithmetic() {
        let mut bars = flat_bars(120, 1.2005);
        let last = bars.len() - 1;
        bars[last].high = 1.2010;
        bars[last].low = 1.2000;
        let frame = compute_features(&bars, &FeatureConfig::default()).unwrap();
        let got = frame.row(frame.len() - 1)[idx(&frame, "spread_proxy")];
        let expected = (1.2010 - 1.2000) / 1.2005;
        assert!((got - expected).abs() < 1e-12, "got {got}, want {expected}");
        assert!((got - 8.33e-4).abs() < 1e-5);
    }

    /// Brute-force rolling mean over every window as an independent oracle
    /// for the incremental SMA.
    #[test]
    fn sma_matches_bruteforce_oracle() {
        let mut bars = flat_bars(130, 1.0);
        for (i, b) in bars.iter_mut().enumerate() {
            let c = 1.0 + 0.001 * ((i as f64) * 0.7).sin() + 0.0001 * i as f64;
            b.open = c;
            b.high = c + 0.0005;
            b.low = c - 0.0005;
            b.close = c;
        }
        let frame = compute_features(&bars, &FeatureConfig::default()).unwrap();
        let closes: Vec<f64> = bars.iter().map(|b| b.close).collect();
        for (row_i, bar_i) in (FEATURE_WARMUP..bars.len()).enumerate() {
            for (name, period) in [("sma_10", 10usize), ("sma_20", 20), ("sma_50", 50)] {
                let brute: f64 =
                    closes[bar_i + 1 - period..=bar_i].iter().sum::<f64>() / period as f64;
                let got = frame.row(row_i)[idx(&frame, name)];
                assert!((got - brute).abs() < 1e-12, "{name} at {bar_i}: {got} vs {brute}");
            }
        }
    }

    #[test]
    fn sma3_of_1234_is_3() {
        // SMA(3) over [1,2,3,4] at the last element = (2+3+4)/3 = 3.
        let closes = [1.0, 2.0, 3.0, 4.0];
        let brute: f64 = closes[1..].iter().sum::<f64>() / 3.0;
        assert_eq!(brute, 3.0);
        let mut st = IndicatorState::new();
        for c in closes {
            st.push(c);
        }
        assert_eq!(st.sma(3), 3.0);
    }

    #[test]
    fn insufficient_data_is_an_error() {
        let bars = flat_bars(FEATURE_WARMUP, 1.0);
        assert!(compute_features(&bars, &FeatureConfig::default()).is_err());
    }

    /// Truncation equivalence: recomputing on the series cut at t yields the
    /// identical row at t — no future bar is consulted.
    #[test]
    fn leakage_truncation_equivalence() {
        let spec = super::super::SynthSpec::default();
        let bars = super::super::generate_synthetic(&spec, 160, 11).unwrap();
        let cfg = FeatureConfig::default();
        let full = compute_features(&bars, &cfg).unwrap();
        for cut in [FEATURE_WARMUP + 1, FEATURE_WARMUP + 20, bars.len() - 5, bars.len()] {
            let part = compute_features(&bars[..cut], &cfg).unwrap();
            let last = part.len() - 1;
            assert!(
                crate::util::bits_eq(part.row(last), full.row(last)),
                "row at cut {cut} differs from full-series row"
            );
        }
    }

    #[test]
    fn ordering_is_stable_across_runs() {
        let spec = super::super::SynthSpec::default();
        let bars = super::super::generate_synthetic(&spec, 120, 3).unwrap();
        let a = compute_features(&bars, &FeatureConfig::default()).unwrap();
        let b = compute_features(&bars, &FeatureConfig::default()).unwrap();
        assert_eq!(a.names, b.names);
        assert!(crate::util::bits_eq(a.values(), b.values()));
    }

    #[test]
    fn context_based_rows_match_full_series() {
        let spec = super::super::SynthSpec::default();
        let bars = super::super::generate_synthetic(&spec, 200, 5).unwrap();
        let cfg = FeatureConfig::default();
        let full = compute_features(&bars, &cfg).unwrap();
        let (ctx, tail) = bars.split_at(150);
        let frame = compute_features_with_context(ctx, tail, &cfg).unwrap();
        assert_eq!(frame.len(), tail.len());
        // Row for bar 150 in both computations must agree exactly.
        let full_row = full.row(150 - FEATURE_WARMUP);
        assert!(crate::util::bits_eq(frame.row(0), full_row));
    }

    #[test]
    fn session_bands() {
        let mk = |h| Utc.with_ymd_and_hms(2022, 1, 3, h, 0, 0).unwrap();
        assert_eq!(session_label(&mk(23)), 0.0);
        assert_eq!(session_label(&mk(3)), 0.0);
        assert_eq!(session_label(&mk(8)), 1.0 / 3.0);
        assert_eq!(session_label(&mk(15)), 2.0 / 3.0);
        assert_eq!(session_label(&mk(21)), 1.0);
    }

    #[test]
    fn reduced_column_variants() {
        let cfg =
            FeatureConfig { macd_columns: 1, bollinger_columns: 1, price_change_horizon: 1 };
        assert_eq!(cfg.width(), 15);
        let bars = flat_bars(100, 1.0);
        let frame = compute_features(&bars, &cfg).unwrap();
        assert_eq!(frame.width, 15);
        assert!(!frame.names.contains(&"macd_signal".to_string()));
        assert!(!frame.names.contains(&"bb_upper".to_string()));
    }
}
