//! Aggregation: weight, sum in canonical order, clip, and trace.

use serde::Serialize;

use super::components::{compute_components, TransitionTrace};
use super::config::{NormalizationMode, RewardConfig, COMPONENT_COUNT, COMPONENT_KEYS};

/// Per-component record: raw value, weight, weighted term, enable gate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentRecord {
    pub key: &'static str,
    pub raw: f64,
    pub weight: f64,
    pub weighted: f64,
    pub enabled: bool,
}

/// Full per-step reward trace in canonical component order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewardTrace {
    pub components: Vec<ComponentRecord>,
    pub raw_sum: f64,
    /// Input of the clip stage (differs from raw_sum only under running
    /// normalization).
    pub clip_input: f64,
    pub clipped: f64,
    pub clip_hit: bool,
}

/// Weight, sum in canonical order, and clip a component vector.
pub fn aggregate(components: &[f64; COMPONENT_COUNT], cfg: &RewardConfig) -> (f64, RewardTrace) {
    let mut records = Vec::with_capacity(COMPONENT_COUNT);
    let mut raw_sum = 0.0;
    for i in 0..COMPONENT_COUNT {
        let toggle = cfg.components[i];
        let weighted = toggle.weight * components[i];
        raw_sum += weighted;
        records.push(ComponentRecord {
            key: COMPONENT_KEYS[i],
            raw: components[i],
            weight: toggle.weight,
            weighted,
            enabled: toggle.enabled,
        });
    }
    let clipped = raw_sum.clamp(cfg.clip_min, cfg.clip_max);
    let trace = RewardTrace {
        components: records,
        raw_sum,
        clip_input: raw_sum,
        clipped,
        clip_hit: clipped != raw_sum,
    };
    (clipped, trace)
}

/// Running mean/std of the raw reward for the optional normalization mode.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunningNorm {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningNorm {
    fn normalize_then_update(&mut self, raw: f64) -> f64 {
        // Standardize against moments of prior steps only, then fold the
        // current value in; the first step passes through unchanged.
        let normalized = if self.count >= 2 {
            let std = (self.m2 / self.count as f64).sqrt().max(1e-8);
            (raw - self.mean) / std
        } else {
            raw
        };
        self.count += 1;
        let delta = raw - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (raw - self.mean);
        normalized
    }
}

/// Stateful evaluator owned by one environment instance.
#[derive(Debug, Clone)]
pub struct RewardEngine {
    cfg: RewardConfig,
    norm: RunningNorm,
}

impl RewardEngine {
    pub fn new(cfg: RewardConfig) -> Self {
        RewardEngine { cfg, norm: RunningNorm::default() }
    }

    pub fn config(&self) -> &RewardConfig {
        &self.cfg
    }

    pub fn evaluate(&mut self, trace: &TransitionTrace) -> (f64, RewardTrace) {
        let components = compute_components(trace, &self.cfg);
        let (reward, mut rtrace) = aggregate(&components, &self.cfg);
        match self.cfg.mode {
            NormalizationMode::ClipOnly => (reward, rtrace),
            NormalizationMode::RunningNorm => {
                let normalized = self.norm.normalize_then_update(rtrace.raw_sum);
                let clipped = normalized.clamp(self.cfg.clip_min, self.cfg.clip_max);
                rtrace.clip_input = normalized;
                rtrace.clipped = clipped;
                rtrace.clip_hit = clipped != normalized;
                (clipped, rtrace)
            }
        }
    }
}
