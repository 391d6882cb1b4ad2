//! Shared construction path from a resolved config to data and
//! environments. Training, evaluation, and the conformance suite all build
//! through these functions.

use std::path::Path;
use std::sync::Arc;

use rand_pcg::Pcg64;

use crate::config::{ConfigSchema, DataSection, DataSource};
use crate::data::{self, Bar, PreparedData};
use crate::env::{Breach, EnvData, TradingEnv};
use crate::error::{Error, Result};

/// Materialize the bar series a config points at: seeded synthetic
/// generation or CSV ingestion (sorted and deduplicated).
pub fn build_bars(cfg: &ConfigSchema, data_rng: &mut Pcg64) -> Result<Vec<Bar>> {
    let d: &DataSection = &cfg.environment.data;
    match d.source {
        DataSource::Synthetic => {
            let spec = d.synthetic.to_spec(cfg.environment.frictions.pip_size);
            data::generate_synthetic_with(&spec, d.synthetic.n_bars, data_rng)
        }
        DataSource::Csv => {
            let path = d.csv_path.as_ref().ok_or_else(|| {
                Error::Config("data source is csv but csv_path is not set".into())
            })?;
            let bars = data::load_ohlcv(Path::new(path), &d.pair)?;
            Ok(data::dedup_last(&bars))
        }
    }
}

/// Split, engineer features, and fit/apply the scaler per the config.
pub fn build_prepared(cfg: &ConfigSchema, bars: &[Bar], breach: Breach) -> Result<PreparedData> {
    data::prepare(
        bars,
        cfg.environment.data.train_fraction,
        &cfg.environment.data.features,
        breach == Breach::ScalerRefitOnFull,
    )
}

/// Train-slice environment data.
pub fn build_env_data(prepared: &PreparedData) -> Result<Arc<EnvData>> {
    Ok(Arc::new(EnvData::from_prepared(prepared)?))
}

/// The single environment construction entry point.
pub fn build_env(
    cfg: &ConfigSchema,
    data: Arc<EnvData>,
    seed: u64,
    breach: Breach,
) -> Result<TradingEnv> {
    TradingEnv::with_breach(cfg.env_config(), cfg.reward_config(), data, seed, breach)
}

/// Everything run_training needs, also reused by the verify harness.
pub struct RunSetup {
    pub prepared: PreparedData,
    pub data: Arc<EnvData>,
    pub env: TradingEnv,
}

pub fn build_run_setup(
    cfg: &ConfigSchema,
    data_rng: &mut Pcg64,
    env_seed: u64,
    breach: Breach,
) -> Result<RunSetup> {
    let bars = build_bars(cfg, data_rng)?;
    let prepared = build_prepared(cfg, &bars, breach)?;
    let data = build_env_data(&prepared)?;
    let env = build_env(cfg, data.clone(), env_seed, breach)?;
    Ok(RunSetup { prepared, data, env })
}
