//! Seeded synthetic OHLCV generation for desk-scale experiments.
//!
//! Three regimes over hourly weekday timestamps: a geometric random walk,
//! a deterministic trend plus noise, and a mean-reverting process on log
//! price. Bars satisfy the OHLC invariants by construction and the whole
//! series is a pure function of (spec, n, seed).

use chrono::{DateTime, Datelike, Duration, TimeZone, Utc, Weekday};
use rand::Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use super::bar::Bar;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Geometric random walk: log-price increments drift + vol * z.
    RandomWalk,
    /// Deterministic log-price drift plus optional noise.
    Trend,
    /// Mean reversion of log price toward log(mean_price).
    MeanRevert,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSpec {
    pub regime: Regime,
    pub start_price: f64,
    /// Per-bar log-price drift.
    pub drift_per_bar: f64,
    /// Per-bar log-return standard deviation.
    pub volatility_per_bar: f64,
    /// Pull strength toward `mean_price` (mean-revert regime only).
    pub mean_reversion_rate: f64,
    pub mean_price: f64,
    /// Average intra-bar high/low extension around the body, in pips.
    pub intrabar_range_pips: f64,
    pub pip_size: f64,
    pub volume_base: f64,
    /// First bar timestamp (advanced hourly, skipping weekends).
    pub start: DateTime<Utc>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            regime: Regime::Trend,
            start_price: 1.10,
            drift_per_bar: 2.0e-5,
            volatility_per_bar: 6.0e-4,
            mean_reversion_rate: 0.05,
            mean_price: 1.10,
            intrabar_range_pips: 3.0,
            pip_size: 1.0e-4,
            volume_base: 1000.0,
            start: Utc.with_ymd_and_hms(2022, 1, 3, 0, 0, 0).unwrap(),
        }
    }
}

fn next_weekday_hour(ts: DateTime<Utc>) -> DateTime<Utc> {
    let mut t = ts + Duration::hours(1);
    while matches!(t.weekday(), Weekday::Sat | Weekday::Sun) {
        t += Duration::hours(1);
    }
    t
}

/// Generate `n` hourly weekday bars. Deterministic for a given (spec, n, seed).
pub fn generate_synthetic(spec: &SynthSpec, n: usize, seed: u64) -> Result<Vec<Bar>> {
    generate_synthetic_with(spec, n, &mut Pcg64::seed_from_u64(seed))
}

/// Same as [`generate_synthetic`] but drawing from a caller-owned stream.
pub fn generate_synthetic_with(
    spec: &SynthSpec,
    n: usize,
    rng: &mut Pcg64,
) -> Result<Vec<Bar>> {
    if spec.start_price <= 0.0 || spec.mean_price <= 0.0 {
        return Err(Error::Config("synthetic prices must be positive".into()));
    }
    if spec.volatility_per_bar < 0.0 || spec.intrabar_range_pips < 0.0 {
        return Err(Error::Config("synthetic noise magnitudes must be non-negative".into()));
    }
    let mut bars = Vec::with_capacity(n);
    let mut ts = spec.start;
    while matches!(ts.weekday(), Weekday::Sat | Weekday::Sun) {
        ts = next_weekday_hour(ts);
    }
    let mut log_price = spec.start_price.ln();
    let mut prev_close = spec.start_price;
    for i in 0..n {
        let z: f64 = StandardNormal.sample(rng);
        let close = match spec.regime {
            Regime::RandomWalk => {
                log_price += spec.drift_per_bar + spec.volatility_per_bar * z;
                log_price.exp()
            }
            // Noise rides on a deterministic log-price path; deviations do
            // not accumulate the way random-walk increments do.
            Regime::Trend => {
                let trend = spec.start_price.ln() + spec.drift_per_bar * (i as f64 + 1.0);
                log_price = trend + spec.volatility_per_bar * z;
                log_price.exp()
            }
            Regime::MeanRevert => {
                log_price += spec.mean_reversion_rate * (spec.mean_price.ln() - log_price)
                    + spec.volatility_per_bar * z;
                log_price.exp()
            }
        };
        let open = prev_close;
        let body_high = open.max(close);
        let body_low = open.min(close);
        // Wick extension is non-negative noise; zero when range is zero.
        let wick = spec.intrabar_range_pips * spec.pip_size;
        let up: f64 = if wick > 0.0 { rng.gen::<f64>() * wick } else { 0.0 };
        let down: f64 = if wick > 0.0 { rng.gen::<f64>() * wick } else { 0.0 };
        let high = body_high + up;
        let low = (body_low - down).max(spec.pip_size);
        let volume = spec.volume_base * (0.5 + rng.gen::<f64>());
        bars.push(Bar { timestamp: ts, open, high, low, close, volume });
        prev_close = close;
        ts = next_weekday_hour(ts);
    }
    Ok(bars)
}
