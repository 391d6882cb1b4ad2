//! Per-feature standardization with train-only parameter estimation.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::features::FeatureFrame;
use crate::error::{Error, Result};

/// Floor applied to the per-feature standard deviation so constant columns
/// scale to zero instead of dividing by zero.
pub const STD_FLOOR: f64 = 1e-8;

/// Per-feature mean and (floored) standard deviation, population convention.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerParams {
    pub names: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Estimate scaling parameters from a feature frame. Callers are expected
/// to pass the training slice only.
pub fn fit_scaler(frame: &FeatureFrame) -> Result<ScalerParams> {
    if frame.len() < 2 {
        return Err(Error::Data(format!(
            "insufficient data: scaler needs at least 2 rows, got {}",
            frame.len()
        )));
    }
    let d = frame.width;
    let n = frame.len() as f64;
    let mut mean = vec![0.0f64; d];
    for i in 0..frame.len() {
        for (m, v) in mean.iter_mut().zip(frame.row(i)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = vec![0.0f64; d];
    for i in 0..frame.len() {
        for (j, v) in frame.row(i).iter().enumerate() {
            let dlt = v - mean[j];
            var[j] += dlt * dlt;
        }
    }
    let std = var.iter().map(|v| (v / n).sqrt().max(STD_FLOOR)).collect();
    Ok(ScalerParams { names: frame.names.clone(), mean, std })
}

/// Standardize a frame with previously fitted parameters. Never mutates the
/// parameters; width mismatches are schema errors.
pub fn apply_scaler(frame: &FeatureFrame, params: &ScalerParams) -> Result<FeatureFrame> {
    if frame.width != params.mean.len() {
        return Err(Error::Data(format!(
            "scaler width mismatch: frame has {} columns, params have {}",
            frame.width,
            params.mean.len()
        )));
    }
    let mut out = frame.clone();
    let width = out.width;
    for (i, v) in out.values_mut().iter_mut().enumerate() {
        let j = i % width;
        *v = (*v - params.mean[j]) / params.std[j];
    }
    Ok(out)
}

impl ScalerParams {
    /// Invert the transform (for round-trip audits).
    pub fn unscale_value(&self, col: usize, v: f64) -> f64 {
        v * self.std[col] + self.mean[col]
    }

    /// Flat key-value audit file: one `name mean std` line per feature.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = String::from("feature mean std\n");
        for i in 0..self.names.len() {
            text.push_str(&format!("{} {} {}\n", self.names[i], self.mean[i], self.std[i]));
        }
        let mut f =
            fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        f.write_all(text.as_bytes()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<ScalerParams> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut names = Vec::new();
        let mut mean = Vec::new();
        let mut std = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Data(format!("scaler file line {}: bad record", i + 1)));
            }
            names.push(parts[0].to_string());
            mean.push(parts[1].parse().map_err(|_| {
                Error::Data(format!("scaler file line {}: bad mean", i + 1))
            })?);
            std.push(parts[2].parse().map_err(|_| {
                Error::Data(format!("scaler file line {}: bad std", i + 1))
            })?);
        }
        Ok(ScalerParams { names, mean, std })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn frame_from(cols: &[&str], rows: &[Vec<f64>]) -> FeatureFrame {
        let mut f = FeatureFrame::new(cols.iter().map(|s| s.to_string()).collect());
        for (i, r) in rows.iter().enumerate() {
            let ts = Utc.with_ymd_and_hms(2022, 1, 3, 0, 0, 0).unwrap()
                + chrono::Duration::hours(i as i64);
            f.push_row(ts, r);
        }
        f
    }

    #[test]
    fn hand_computed_moments() {
        // Column [1, 3]: mean 2, population stdev 1.
        let f = frame_from(&["a"], &[vec![1.0], vec![3.0]]);
        let p = fit_scaler(&f).unwrap();
        assert_eq!(p.mean[0], 2.0);
        assert_eq!(p.std[0], 1.0);
    }

    #[test]
    fn constant_column_floors_and_scales_to_zero() {
        let f = frame_from(&["a"], &[vec![5.0], vec![5.0], vec![5.0]]);
        let p = fit_scaler(&f).unwrap();
        assert_eq!(p.std[0], STD_FLOOR);
        let scaled = apply_scaler(&f, &p).unwrap();
        for i in 0..scaled.len() {
            assert_eq!(scaled.row(i)[0], 0.0);
        }
    }

    #[test]
    fn apply_arithmetic() {
        let f = frame_from(&["a"], &[vec![3.0], vec![2.0]]);
        let p = ScalerParams { names: vec!["a".into()], mean: vec![2.0], std: vec![1.0] };
        let out = apply_scaler(&f, &p).unwrap();
        assert_eq!(out.row(0)[0], 1.0);
        assert_eq!(out.row(1)[0], 0.0);
    }

    #[test]
    fn roundtrip_recovers_input() {
        let rows: Vec<Vec<f64>> =
            (0..20).map(|i| vec![1.0 + i as f64 * 0.37, -5.0 + i as f64]).collect();
        let f = frame_from(&["a", "b"], &rows);
        let p = fit_scaler(&f).unwrap();
        let scaled = apply_scaler(&f, &p).unwrap();
        for i in 0..f.len() {
            for j in 0..2 {
                let back = p.unscale_value(j, scaled.row(i)[j]);
                assert!((back - f.row(i)[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transform_never_mutates_params() {
        let f = frame_from(&["a"], &[vec![1.0], vec![2.0], vec![9.0]]);
        let p = fit_scaler(&f).unwrap();
        let snapshot = p.clone();
        let other = frame_from(&["a"], &[vec![100.0], vec![-40.0]]);
        let _ = apply_scaler(&other, &p).unwrap();
        assert_eq!(p, snapshot);
    }

    #[test]
    fn width_mismatch_is_schema_error() {
        let f = frame_from(&["a", "b"], &[vec![1.0, 2.0]]);
        let p = ScalerParams { names: vec!["a".into()], mean: vec![0.0], std: vec![1.0] };
        assert!(apply_scaler(&f, &p).is_err());
    }

    #[test]
    fn save_load_roundtrip() {
        let f = frame_from(&["a", "b"], &[vec![1.0, -2.0], vec![3.5, 0.25]]);
        let p = fit_scaler(&f).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scaler.txt");
        p.save(&path).unwrap();
        let q = ScalerParams::load(&path).unwrap();
        assert_eq!(p, q);
    }
}
