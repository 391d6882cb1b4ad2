//! Run directories and newline-delimited structured logs.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::env::{EndReason, StepInfo};
use crate::error::{Error, Result};
use crate::reward::RewardTrace;

/// Canonical artifact layout of one run. Directories are never reused: a
/// name collision gets a numeric suffix.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub resolved_config: PathBuf,
    pub step_log: PathBuf,
    pub episode_log: PathBuf,
    pub reward_trace_log: PathBuf,
    pub eval_log: PathBuf,
    pub checkpoints: PathBuf,
    pub final_checkpoint: PathBuf,
    pub metrics_report: PathBuf,
    pub equity_curve: PathBuf,
    pub scaler_params: PathBuf,
}

impl RunArtifacts {
    pub fn create(root: &Path, label: &str) -> Result<Self> {
        let mut dir = root.join(label);
        let mut suffix = 0u32;
        while dir.exists() {
            suffix += 1;
            dir = root.join(format!("{label}-{suffix}"));
        }
        fs::create_dir_all(&dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let checkpoints = dir.join("checkpoints");
        fs::create_dir_all(&checkpoints)
            .map_err(|e| Error::io(checkpoints.display().to_string(), e))?;
        Ok(RunArtifacts {
            resolved_config: dir.join("resolved_config.yaml"),
            step_log: dir.join("step_log.jsonl"),
            episode_log: dir.join("episode_log.jsonl"),
            reward_trace_log: dir.join("reward_trace_log.jsonl"),
            eval_log: dir.join("eval_log.jsonl"),
            final_checkpoint: checkpoints.join("final.ckpt"),
            metrics_report: dir.join("metrics_report.csv"),
            equity_curve: dir.join("equity_curve.csv"),
            scaler_params: dir.join("scaler_params.txt"),
            checkpoints,
            dir,
        })
    }

    /// True when every artifact a successful run must leave behind exists.
    pub fn is_complete(&self) -> bool {
        [
            &self.resolved_config,
            &self.step_log,
            &self.episode_log,
            &self.reward_trace_log,
            &self.eval_log,
            &self.final_checkpoint,
            &self.metrics_report,
            &self.equity_curve,
        ]
        .iter()
        .all(|p| p.exists())
    }
}

/// One line of the step log. Key names are part of the external interface.
#[derive(Serialize)]
pub struct StepLogRecord<'a> {
    pub step: u64,
    pub episode: u64,
    pub timestamp: chrono::DateTime<chrono::Utc>,
    pub proposed_action: usize,
    pub executed_action: usize,
    pub violation: bool,
    pub liquidation_event: bool,
    pub reward: f64,
    pub epsilon: f64,
    pub loss: Option<f64>,
    pub cost_trace: &'a crate::exec::CostTrace,
    pub realized_delta: f64,
    pub unrealized_delta: f64,
    pub fill_price: Option<f64>,
    pub traded_lots: f64,
    pub equity: f64,
    pub used_margin: f64,
    pub free_margin: f64,
    pub direction: i8,
    pub lots: f64,
    pub pyramid_depth: u32,
    pub martingale_depth: u32,
    pub mask_next: &'a [u8],
    pub done: bool,
}

impl<'a> StepLogRecord<'a> {
    pub fn from_info(
        step: u64,
        episode: u64,
        info: &'a StepInfo,
        reward: f64,
        epsilon: f64,
        loss: Option<f64>,
        done: bool,
    ) -> Self {
        StepLogRecord {
            step,
            episode,
            timestamp: info.timestamp,
            proposed_action: info.proposed_action,
            executed_action: info.executed_action,
            violation: info.violation,
            liquidation_event: info.liquidation_event,
            reward,
            epsilon,
            loss,
            cost_trace: &info.cost_trace,
            realized_delta: info.realized_delta,
            unrealized_delta: info.unrealized_delta,
            fill_price: info.fill_price,
            traded_lots: info.traded_lots,
            equity: info.equity,
            used_margin: info.used_margin,
            free_margin: info.free_margin,
            direction: info.direction,
            lots: info.lots,
            pyramid_depth: info.pyramid_depth,
            martingale_depth: info.martingale_depth,
            mask_next: &info.mask_next,
            done,
        }
    }
}

#[derive(Serialize)]
pub struct RewardTraceRecord<'a> {
    pub step: u64,
    #[serde(flatten)]
    pub trace: &'a RewardTrace,
}

#[derive(Serialize)]
pub struct EpisodeRecord {
    pub episode: u64,
    pub start_step: u64,
    pub end_step: u64,
    pub steps: u64,
    pub end_reason: EndReason,
    pub final_equity: f64,
    pub cumulative_return: f64,
}

#[derive(Serialize)]
pub struct EvalRecord {
    pub at_step: u64,
    pub steps: usize,
    pub final_equity: f64,
    pub cumulative_return: f64,
    pub sharpe: f64,
    pub max_drawdown: f64,
    pub turnover: f64,
    pub trade_count: usize,
    pub violations: usize,
}

/// Buffered JSONL writer with deterministic formatting.
pub struct JsonlWriter {
    path: PathBuf,
    out: BufWriter<fs::File>,
}

impl JsonlWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let f = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(JsonlWriter { path: path.to_path_buf(), out: BufWriter::with_capacity(1 << 16, f) })
    }

    pub fn write<T: Serialize>(&mut self, record: &T) -> Result<()> {
        let line = serde_json::to_string(record)
            .map_err(|e| Error::Contract(format!("log serialization failed: {e}")))?;
        self.out
            .write_all(line.as_bytes())
            .and_then(|_| self.out.write_all(b"\n"))
            .map_err(|e| Error::io(self.path.display().to_string(), e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(self.path.display().to_string(), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collision_gets_a_suffix() {
        let root = tempfile::tempdir().unwrap();
        let a = RunArtifacts::create(root.path(), "run").unwrap();
        let b = RunArtifacts::create(root.path(), "run").unwrap();
        assert_ne!(a.dir, b.dir);
        assert!(b.dir.to_string_lossy().ends_with("run-1"));
        assert!(a.dir.exists() && b.dir.exists());
    }

    #[test]
    fn jsonl_lines_are_valid_json() {
        let root = tempfile::tempdir().unwrap();
        let path = root.path().join("x.jsonl");
        let mut w = JsonlWriter::create(&path).unwrap();
        w.write(&EvalRecord {
            at_step: 0,
            steps: 10,
            final_equity: 100_000.0,
            cumulative_return: 0.0,
            sharpe: 0.0,
            max_drawdown: 0.0,
            turnover: 0.0,
            trade_count: 0,
            violations: 0,
        })
        .unwrap();
        w.finish().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(v["at_step"], 0);
        assert_eq!(v["final_equity"], 100000.0);
    }
}
