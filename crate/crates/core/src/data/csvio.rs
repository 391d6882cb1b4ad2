//! CSV interchange for bars, feature frames, and scaler parameters.
//!
//! Fixed schema: header `timestamp,open,high,low,close,volume`, ISO-8601
//! UTC timestamps, one bar per line.

use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, Utc};

use super::bar::Bar;
use super::features::FeatureFrame;
use crate::error::{Error, Result};

pub const OHLCV_HEADER: &str = "timestamp,open,high,low,close,volume";

fn parse_ts(raw: &str, line: usize) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(raw)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| Error::Data(format!("line {line}: bad timestamp {raw:?}: {e}")))
}

fn parse_num(raw: &str, field: &str, line: usize) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| Error::Data(format!("line {line}: field {field} is not numeric: {raw:?}")))
}

/// Load, validate, UTC-normalize, sort ascending (stable), and dedup a bar
/// series from a CSV file. `pair` is carried into error messages only.
pub fn load_ohlcv(path: &Path, pair: &str) -> Result<Vec<Bar>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Data(format!("{pair}: empty input file {}", path.display())))?;
    if header.trim() != OHLCV_HEADER {
        return Err(Error::Data(format!(
            "{pair}: line 1: expected header {OHLCV_HEADER:?}, got {header:?}"
        )));
    }
    let mut bars = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1; // 1-based for messages
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Data(format!(
                "{pair}: line {line}: expected 6 fields, got {}",
                fields.len()
            )));
        }
        let bar = Bar {
            timestamp: parse_ts(fields[0], line)?,
            open: parse_num(fields[1], "open", line)?,
            high: parse_num(fields[2], "high", line)?,
            low: parse_num(fields[3], "low", line)?,
            close: parse_num(fields[4], "close", line)?,
            volume: parse_num(fields[5], "volume", line)?,
        };
        bar.validate().map_err(|e| Error::Data(format!("{pair}: line {line}: {e}")))?;
        bars.push(bar);
    }
    if bars.is_empty() {
        return Err(Error::Data(format!("{pair}: no data rows in {}", path.display())));
    }
    // Stable sort preserves file order within equal timestamps, which is
    // what the downstream last-occurrence dedup policy needs.
    bars.sort_by_key(|b| b.timestamp);
    Ok(bars)
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent.display().to_string(), e))?;
        }
    }
    fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn write_ohlcv_csv(path: &Path, bars: &[Bar]) -> Result<()> {
    let mut f = create(path)?;
    let mut out = String::with_capacity(bars.len() * 64);
    out.push_str(OHLCV_HEADER);
    out.push('\n');
    for b in bars {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            b.timestamp.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            b.open,
            b.high,
            b.low,
            b.close,
            b.volume
        ));
    }
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Feature artifact: `timestamp,<canonical names...>` header then one row
/// per feature row at full float precision.
pub fn write_feature_csv(path: &Path, frame: &FeatureFrame) -> Result<()> {
    let mut f = create(path)?;
    let mut out = String::new();
    out.push_str("timestamp");
    for name in &frame.names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..frame.len() {
        out.push_str(&frame.timestamps[i].to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
        for v in frame.row(i) {
            out.push(',');
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path.display().to_string(), e))
}
