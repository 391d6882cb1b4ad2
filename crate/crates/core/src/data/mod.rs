//! Market data: ingestion, validation, splitting, feature engineering with
//! train-only scaling, and seeded synthetic series generation.
//!
//! All transformations are causal: a feature row at time `t` is a function
//! of bars at or before `t` only, and scaling parameters are fitted on the
//! training slice alone and reused everywhere else.

mod bar;
mod csvio;
mod features;
mod scaler;
mod synth;

pub use bar::{chronological_split, dedup_last, Bar, DatasetSplit};
pub use csvio::{load_ohlcv, write_feature_csv, write_ohlcv_csv};
pub use features::{
    compute_features, compute_features_with_context, FeatureConfig, FeatureFrame, FEATURE_WARMUP,
};
pub use scaler::{apply_scaler, fit_scaler, ScalerParams};
pub use synth::{generate_synthetic, generate_synthetic_with, Regime, SynthSpec};

use crate::error::Result;

/// Feature frames plus the scaler they were produced with. The heldout
/// member, when present, is transformed with the train-fitted parameters.
pub struct PreparedData {
    pub split: DatasetSplit,
    pub train: FeatureFrame,
    pub heldout: Option<FeatureFrame>,
    pub scaler: ScalerParams,
}

/// Full pipeline: split bars chronologically, engineer features per slice,
/// fit the scaler on the train slice only, and scale both slices with it.
///
/// When `refit_on_all` is set (verification instrument only) the scaler is
/// deliberately fitted on train + heldout to emulate a leakage bug.
pub fn prepare(
    bars: &[Bar],
    train_fraction: f64,
    feat_cfg: &FeatureConfig,
    refit_on_all: bool,
) -> Result<PreparedData> {
    let split = chronological_split(bars, train_fraction)?;
    let train_raw = compute_features(&split.train, feat_cfg)?;
    let heldout_raw = if split.heldout.is_empty() {
        None
    } else {
        // Context rows come from the tail of the train slice so heldout
        // indicators warm up without consuming heldout history.
        Some(compute_features_with_context(&split.train, &split.heldout, feat_cfg)?)
    };
    let scaler = if refit_on_all {
        let mut all = train_raw.clone();
        if let Some(h) = &heldout_raw {
            all.append(h);
        }
        fit_scaler(&all)?
    } else {
        fit_scaler(&train_raw)?
    };
    let train = apply_scaler(&train_raw, &scaler)?;
    let heldout = match &heldout_raw {
        Some(h) => Some(apply_scaler(h, &scaler)?),
        None => None,
    };
    Ok(PreparedData { split, train, heldout, scaler })
}
