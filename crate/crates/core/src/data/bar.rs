//! OHLCV bar type, deduplication, and the chronological split.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One hourly OHLCV record with a UTC timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub timestamp: DateTime<Utc>,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: f64,
}

impl Bar {
    /// Schema check: finite fields, low ≤ min(open, close) ≤ max(open, close) ≤ high,
    /// positive prices, non-negative volume.
    pub fn validate(&self) -> Result<()> {
        let vals = [self.open, self.high, self.low, self.close, self.volume];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite field in bar at {}", self.timestamp)));
        }
        if self.open <= 0.0 || self.high <= 0.0 || self.low <= 0.0 || self.close <= 0.0 {
            return Err(Error::Data(format!("non-positive price in bar at {}", self.timestamp)));
        }
        if self.volume < 0.0 {
            return Err(Error::Data(format!("negative volume in bar at {}", self.timestamp)));
        }
        let body_low = self.open.min(self.close);
        let body_high = self.open.max(self.close);
        if self.low > body_low || self.high < body_high {
            return Err(Error::Data(format!(
                "OHLC invariant violated at {}: open {} high {} low {} close {}",
                self.timestamp, self.open, self.high, self.low, self.close
            )));
        }
        Ok(())
    }
}

/// Chronological train/heldout partition of a bar series.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: Vec<Bar>,
    pub heldout: Vec<Bar>,
    pub split_index: usize,
}

/// Keep one bar per timestamp, retaining the last occurrence in input order.
/// Input must already be sorted ascending (stable), so within a group of
/// equal timestamps the last element is the last occurrence from the file.
pub fn dedup_last(bars: &[Bar]) -> Vec<Bar> {
    let mut out: Vec<Bar> = Vec::with_capacity(bars.len());
    for bar in bars {
        match out.last_mut() {
            Some(prev) if prev.timestamp == bar.timestamp => *prev = *bar,
            _ => out.push(*bar),
        }
    }
    out
}

/// Split `floor(n * train_fraction)` leading bars into the train member.
/// No shuffling; train strictly precedes heldout in time.
pub fn chronological_split(bars: &[Bar], train_fraction: f64) -> Result<DatasetSplit> {
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(Error::Config(format!(
            "train_fraction must lie in (0, 1], got {train_fraction}"
        )));
    }
    if bars.len() < 2 {
        return Err(Error::Data(format!("need at least 2 bars to split, got {}", bars.len())));
    }
    let split_index = ((bars.len() as f64) * train_fraction).floor() as usize;
    let split_index = split_index.min(bars.len());
    Ok(DatasetSplit {
        train: bars[..split_index].to_vec(),
        heldout: bars[split_index..].to_vec(),
        split_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    pub(crate) fn bar_at(hour_offset: i64, close: f64) -> Bar {
        let ts = Utc.with_ymd_and_hms(2022, 1, 3, 0, 0, 0).unwrap()
            + chrono::Duration::hours(hour_offset);
        Bar { timestamp: ts, open: close, high: close, low: close, close, volume: 1.0 }
    }

    #[test]
    fn dedup_keeps_last_occurrence() {
        let mut a = bar_at(10, 1.1);
        let mut b = bar_at(10, 1.2);
        a.open = 1.1;
        b.open = 1.2;
        let out = dedup_last(&[a, b]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].close, 1.2);
    }

    #[test]
    fn dedup_identity_without_duplicates() {
        let bars: Vec<Bar> = (0..5).map(|i| bar_at(i, 1.0 + i as f64 * 0.01)).collect();
        assert_eq!(dedup_last(&bars), bars);
    }

    #[test]
    fn dedup_three_duplicates_hand_enumerated() {
        // Five-row fixture enumerated by hand: ts {0,1,1,1,2}; the 1-group
        // keeps its final row, so the output is rows {0, 3rd-of-1, 2}.
        let rows = vec![
            bar_at(0, 1.00),
            bar_at(1, 1.01),
            bar_at(1, 1.02),
            bar_at(1, 1.03),
            bar_at(2, 1.04),
        ];
        let out = dedup_last(&rows);
        assert_eq!(out.len(), rows.len() - 2);
        assert_eq!(out[0].close, 1.00);
        assert_eq!(out[1].close, 1.03);
        assert_eq!(out[2].close, 1.04);
    }

    #[test]
    fn dedup_is_idempotent() {
        let rows = vec![bar_at(0, 1.0), bar_at(1, 1.1), bar_at(1, 1.2), bar_at(2, 1.3)];
        let once = dedup_last(&rows);
        let twice = dedup_last(&once);
        assert_eq!(once, twice);
    }

    #[test]
    fn split_80_20() {
        let bars: Vec<Bar> = (0..25_000).map(|i| bar_at(i, 1.1)).collect();
        let split = chronological_split(&bars, 0.8).unwrap();
        assert_eq!(split.train.len(), 20_000);
        assert_eq!(split.heldout.len(), 5_000);
        assert_eq!(split.split_index, 20_000);
    }

    #[test]
    fn split_full_train() {
        let bars: Vec<Bar> = (0..10).map(|i| bar_at(i, 1.1)).collect();
        let split = chronological_split(&bars, 1.0).unwrap();
        assert_eq!(split.train.len(), 10);
        assert!(split.heldout.is_empty());
    }

    #[test]
    fn split_boundary_is_strict() {
        let bars: Vec<Bar> = (0..10).map(|i| bar_at(i, 1.1)).collect();
        let split = chronological_split(&bars, 0.5).unwrap();
        assert_eq!(split.train.len(), 5);
        assert_eq!(split.heldout.len(), 5);
        let max_train = split.train.iter().map(|b| b.timestamp).max().unwrap();
        let min_heldout = split.heldout.iter().map(|b| b.timestamp).min().unwrap();
        assert!(max_train < min_heldout);
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let bars: Vec<Bar> = (0..10).map(|i| bar_at(i, 1.1)).collect();
        assert!(matches!(chronological_split(&bars, 0.0), Err(Error::Config(_))));
        assert!(matches!(chronological_split(&bars, 1.5), Err(Error::Config(_))));
    }

    #[test]
    fn bar_schema_rejects_high_below_low() {
        let mut bad = bar_at(0, 1.1);
        bad.high = 1.0;
        bad.low = 1.2;
        assert!(bad.validate().is_err());
    }
}
