//! Machine-readable result export: metrics tables and equity-curve series.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::metrics::{EquityCurve, MetricsReport};
use crate::error::{Error, Result};

fn create(path: &Path) -> Result<fs::File> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent.display().to_string(), e))?;
        }
    }
    fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))
}

/// CSV table keyed by run/variant label, one row per report, columns fixed
/// to the MetricsReport field list.
pub fn emit_report(reports: &[(String, MetricsReport)], dest: &Path) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::Contract("emit_report needs at least one report".into()));
    }
    let mut out = String::new();
    out.push_str("run,");
    out.push_str(MetricsReport::CSV_HEADER);
    out.push('\n');
    for (label, report) in reports {
        out.push_str(label);
        out.push(',');
        out.push_str(&report.csv_row());
        out.push('\n');
    }
    let mut f = create(dest)?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(dest.display().to_string(), e))
}

/// Curve series file: `step,timestamp,equity` per row.
pub fn write_curve(curve: &EquityCurve, dest: &Path) -> Result<()> {
    let mut out = String::from("step,timestamp,equity\n");
    for (i, (ts, equity)) in curve.points.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            i,
            ts.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            equity
        ));
    }
    let mut f = create(dest)?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(dest.display().to_string(), e))
}
