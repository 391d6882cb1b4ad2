//! The trading environment: windowed observations at close_t, dispatch with
//! a freshly recomputed legality mask, fills at open_{t+1}, marks at
//! close_{t+1}, reward from the transition trace, episode lifecycle.

use std::collections::VecDeque;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::action::{Action, ActionMode, LegalMask, SimpleAction};
use super::breach::Breach;
use super::mask::{adapt_simplified, compute_extended_mask, compute_legal_mask};
use super::obs::{build_observation, flat_dim, Observation, D_PORT};
use crate::data::{Bar, FeatureFrame, PreparedData, FEATURE_WARMUP};
use crate::error::{Error, Result};
use crate::exec::{
    execute, mark_to_market, BarWindow, CostTrace, FrictionConfig, PortfolioState, RiskConfig,
};
use crate::reward::{RewardConfig, RewardEngine, RewardTrace, TransitionTrace};
use crate::util::Fnv64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvConfig {
    pub action_mode: ActionMode,
    /// Observation lookback window L, in bars.
    pub window: usize,
    pub initial_capital: f64,
    /// Steps covered by the overtrading counter.
    pub overtrading_window: usize,
    /// Steps covered by the equity-return volatility history.
    pub volatility_window: usize,
    /// Optional hard episode cap; episodes otherwise run the full slice.
    pub max_episode_steps: Option<usize>,
    pub frictions: FrictionConfig,
    pub risk: RiskConfig,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            action_mode: ActionMode::Extended,
            window: 24,
            initial_capital: 100_000.0,
            overtrading_window: 50,
            volatility_window: 20,
            max_episode_steps: None,
            frictions: FrictionConfig::default(),
            risk: RiskConfig::default(),
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::Config("environment window must be at least 1".into()));
        }
        if self.initial_capital <= 0.0 {
            return Err(Error::Config("initial_capital must be positive".into()));
        }
        if self.overtrading_window == 0 || self.volatility_window == 0 {
            return Err(Error::Config("history windows must be at least 1".into()));
        }
        self.frictions.validate()?;
        self.risk.validate()
    }
}

/// Bars and their aligned (already scaled) feature rows: `bars[i]`
/// corresponds to `features.row(i)`.
#[derive(Debug, Clone)]
pub struct EnvData {
    pub bars: Vec<Bar>,
    pub features: FeatureFrame,
}

impl EnvData {
    pub fn new(bars: Vec<Bar>, features: FeatureFrame) -> Result<Self> {
        if bars.len() != features.len() {
            return Err(Error::Contract(format!(
                "bar/feature misalignment: {} bars vs {} feature rows",
                bars.len(),
                features.len()
            )));
        }
        Ok(EnvData { bars, features })
    }

    /// Train-slice view of a prepared dataset: feature rows start after the
    /// warm-up trim, so the bar series is offset to match.
    pub fn from_prepared(prepared: &PreparedData) -> Result<Self> {
        let bars = prepared.split.train[FEATURE_WARMUP..].to_vec();
        EnvData::new(bars, prepared.train.clone())
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    DataExhausted,
    Liquidated,
    MaxSteps,
}

/// Diagnostics emitted with every step.
#[derive(Debug, Clone, Serialize)]
pub struct StepInfo {
    pub step_index: usize,
    pub timestamp: DateTime<Utc>,
    pub proposed_action: usize,
    pub executed_action: usize,
    pub violation: bool,
    pub liquidation_event: bool,
    pub cost_trace: CostTrace,
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
    pub mask_next: Vec<u8>,
    pub reward_trace: RewardTrace,
    pub end_reason: Option<EndReason>,
}

pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

pub struct TradingEnv {
    cfg: EnvConfig,
    data: Arc<EnvData>,
    reward: RewardEngine,
    breach: Breach,
    seed: u64,
    cursor: usize,
    portfolio: PortfolioState,
    trade_flags: VecDeque<bool>,
    ret_history: VecDeque<f64>,
    done: bool,
    episode_steps: usize,
    /// Masks currently attached to the emitted observation (mode view) and
    /// used for dispatch (extended view).
    obs_mask: LegalMask,
    exec_mask: LegalMask,
    /// Fresh masks of the current state, promoted on the next step when a
    /// stale-mask breach is active.
    fresh_obs_mask: LegalMask,
    fresh_exec_mask: LegalMask,
    checksum: Fnv64,
}

impl TradingEnv {
    pub fn new(
        cfg: EnvConfig,
        reward_cfg: RewardConfig,
        data: Arc<EnvData>,
        seed: u64,
    ) -> Result<Self> {
        Self::with_breach(cfg, reward_cfg, data, seed, Breach::None)
    }

    /// Construction entry point shared by training, evaluation, and the
    /// conformance suite; breaches are verification instruments only.
    pub fn with_breach(
        cfg: EnvConfig,
        reward_cfg: RewardConfig,
        data: Arc<EnvData>,
        seed: u64,
        breach: Breach,
    ) -> Result<Self> {
        cfg.validate()?;
        reward_cfg.validate()?;
        if data.len() < cfg.window + 2 {
            return Err(Error::Data(format!(
                "environment needs at least window + 2 = {} aligned rows, got {}",
                cfg.window + 2,
                data.len()
            )));
        }
        let mark = data.bars[cfg.window - 1].close;
        let portfolio = PortfolioState::new(cfg.initial_capital, mark);
        let obs_mask = compute_legal_mask(&portfolio, &cfg.risk, cfg.action_mode);
        let exec_mask = compute_extended_mask(&portfolio, &cfg.risk);
        let env = TradingEnv {
            cursor: cfg.window - 1,
            portfolio,
            trade_flags: VecDeque::with_capacity(cfg.overtrading_window),
            ret_history: VecDeque::with_capacity(cfg.volatility_window),
            done: false,
            episode_steps: 0,
            fresh_obs_mask: obs_mask.clone(),
            fresh_exec_mask: exec_mask.clone(),
            obs_mask,
            exec_mask,
            checksum: Fnv64::new(),
            reward: RewardEngine::new(reward_cfg),
            seed,
            breach,
            cfg,
            data,
        };
        // Dimensioning is asserted before anything can train against it.
        let obs = env.observation()?;
        let expected = flat_dim(env.cfg.window, env.d_feat(), env.n_actions());
        if obs.flat.len() != expected {
            return Err(Error::Contract(format!(
                "flat observation is {} long but the declared dimension is {expected}",
                obs.flat.len()
            )));
        }
        Ok(env)
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn data(&self) -> &Arc<EnvData> {
        &self.data
    }

    pub fn n_actions(&self) -> usize {
        self.cfg.action_mode.n_actions()
    }

    pub fn d_feat(&self) -> usize {
        self.data.features.width
    }

    /// Flat observation dimension: window * d_feat + d_port + n_actions.
    pub fn flat_dim(&self) -> usize {
        flat_dim(self.cfg.window, self.d_feat(), self.n_actions())
    }

    pub fn d_port(&self) -> usize {
        D_PORT
    }

    pub fn portfolio(&self) -> &PortfolioState {
        &self.portfolio
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Close of the current decision bar.
    pub fn current_close(&self) -> f64 {
        self.data.bars[self.cursor].close
    }

    pub fn current_timestamp(&self) -> DateTime<Utc> {
        self.data.bars[self.cursor].timestamp
    }

    /// Running FNV checksum over (cursor, executed action, equity) of every
    /// executed step; identical policies on identical data produce identical
    /// checksums regardless of who drives the loop.
    pub fn execution_checksum(&self) -> u64 {
        self.checksum.finish()
    }

    /// Map a simplified action onto its extended operation for the current
    /// position state.
    pub fn adapt(&self, a: SimpleAction) -> Action {
        adapt_simplified(a, &self.portfolio)
    }

    /// Reset to the first decidable bar with a fresh account.
    pub fn reset(&mut self) -> Result<Observation> {
        self.cursor = self.cfg.window - 1;
        let mark = self.data.bars[self.cursor].close;
        self.portfolio = PortfolioState::new(self.cfg.initial_capital, mark);
        self.trade_flags.clear();
        self.ret_history.clear();
        self.done = false;
        self.episode_steps = 0;
        self.obs_mask = compute_legal_mask(&self.portfolio, &self.cfg.risk, self.cfg.action_mode);
        self.exec_mask = compute_extended_mask(&self.portfolio, &self.cfg.risk);
        self.fresh_obs_mask = self.obs_mask.clone();
        self.fresh_exec_mask = self.exec_mask.clone();
        self.observation()
    }

    /// Observation at the current cursor: the last `window` feature rows
    /// ending at close_t plus the account vector and the active mask.
    pub fn observation(&self) -> Result<Observation> {
        let mut end = self.cursor;
        if self.breach == Breach::ObservationLookahead && self.cursor + 1 < self.data.len() {
            end = self.cursor + 1;
        }
        let window = self.data.features.window(end, self.cfg.window);
        build_observation(
            window,
            self.cfg.window,
            self.d_feat(),
            &self.portfolio,
            &self.cfg.risk,
            self.obs_mask.clone(),
        )
    }

    /// Advance one bar: dispatch under the active mask, execute at the next
    /// open, settle at the next close, and score the transition.
    pub fn step(&mut self, action_id: usize) -> Result<StepResult> {
        if self.done {
            return Err(Error::Lifecycle("step called on a finished episode".into()));
        }
        if action_id >= self.n_actions() {
            return Err(Error::Contract(format!(
                "action id {action_id} out of range for n_a = {}",
                self.n_actions()
            )));
        }
        let t = self.cursor;
        let bar_next = &self.data.bars[t + 1];
        let proposed_ext = match self.cfg.action_mode {
            ActionMode::Extended => Action::from_id(action_id)?,
            ActionMode::Simplified => {
                adapt_simplified(SimpleAction::from_id(action_id)?, &self.portfolio)
            }
        };
        let open_anchor = if self.breach == Breach::FillAtCloseNext {
            bar_next.close
        } else {
            bar_next.open
        };
        let bars = BarWindow {
            close_t: self.data.bars[t].close,
            open_next: open_anchor,
            close_next: bar_next.close,
            ts_next: bar_next.timestamp,
        };
        let prev = self.portfolio.clone();
        let outcome =
            execute(&prev, proposed_ext, &bars, &self.cfg.frictions, &self.cfg.risk,
                &self.exec_mask)?;
        self.portfolio = outcome.next_state.clone();

        let step_return = if prev.equity > 0.0 {
            (self.portfolio.equity - prev.equity) / prev.equity
        } else {
            0.0
        };
        if self.ret_history.len() == self.cfg.volatility_window {
            self.ret_history.pop_front();
        }
        self.ret_history.push_back(step_return);
        if self.trade_flags.len() == self.cfg.overtrading_window {
            self.trade_flags.pop_front();
        }
        self.trade_flags.push_back(outcome.traded_lots > 0.0);

        let reward_next = if self.breach == Breach::RewardLookahead && t + 2 < self.data.len() {
            mark_to_market(&self.portfolio, self.data.bars[t + 2].close)
        } else {
            self.portfolio.clone()
        };
        let trace = TransitionTrace {
            prev: prev.clone(),
            next: reward_next,
            executed: outcome.executed_action,
            proposed_id: action_id,
            cost: outcome.cost_trace,
            violation: outcome.violation,
            liquidation_event: outcome.liquidation_event,
            recent_trade_count: self.trade_flags.iter().filter(|&&b| b).count(),
            overtrading_window: self.cfg.overtrading_window,
            equity_returns: self.ret_history.iter().copied().collect(),
            depth_cap: self.cfg.risk.depth_cap,
        };
        let (reward, reward_trace) = self.reward.evaluate(&trace);

        self.cursor += 1;
        self.episode_steps += 1;
        let mut end_reason = None;
        if outcome.liquidation_event {
            end_reason = Some(EndReason::Liquidated);
        } else if self.cursor + 1 >= self.data.len() {
            end_reason = Some(EndReason::DataExhausted);
        } else if let Some(cap) = self.cfg.max_episode_steps {
            if self.episode_steps >= cap {
                end_reason = Some(EndReason::MaxSteps);
            }
        }
        self.done = end_reason.is_some();

        let fresh_obs = compute_legal_mask(&self.portfolio, &self.cfg.risk, self.cfg.action_mode);
        let fresh_exec = compute_extended_mask(&self.portfolio, &self.cfg.risk);
        if self.breach == Breach::StaleMask {
            self.obs_mask = self.fresh_obs_mask.clone();
            self.exec_mask = self.fresh_exec_mask.clone();
        } else {
            self.obs_mask = fresh_obs.clone();
            self.exec_mask = fresh_exec.clone();
        }
        self.fresh_obs_mask = fresh_obs;
        self.fresh_exec_mask = fresh_exec;

        self.checksum.update_u64(self.cursor as u64);
        self.checksum.update_u64(outcome.executed_action.id() as u64);
        self.checksum.update_f64(self.portfolio.equity);

        let observation = self.observation()?;
        let info = StepInfo {
            step_index: self.episode_steps - 1,
            timestamp: bars.ts_next,
            proposed_action: action_id,
            executed_action: outcome.executed_action.id(),
            violation: outcome.violation,
            liquidation_event: outcome.liquidation_event,
            cost_trace: outcome.cost_trace,
            realized_delta: outcome.realized_delta,
            unrealized_delta: outcome.unrealized_delta,
            fill_price: outcome.fill_price,
            traded_lots: outcome.traded_lots,
            equity: self.portfolio.equity,
            used_margin: self.portfolio.used_margin,
            free_margin: self.portfolio.free_margin,
            direction: self.portfolio.position.direction.sign() as i8,
            lots: self.portfolio.position.lots,
            pyramid_depth: self.portfolio.position.pyramid_depth,
            martingale_depth: self.portfolio.position.martingale_depth,
            mask_next: observation.mask.as_u8(),
            reward_trace,
            end_reason,
        };
        Ok(StepResult { observation, reward, done: self.done, info })
    }
}
