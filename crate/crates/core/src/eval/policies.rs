//! Rollout policies: the greedy agent policy and the four rule-based
//! benchmark strategies, all driven through the same environment step path.

use std::collections::VecDeque;

use rand::Rng;
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::agent::{masked_argmax, QNetwork};
use crate::env::{adapt_simplified, ActionMode, Observation, SimpleAction};
use crate::error::{Error, Result};
use crate::exec::PortfolioState;

/// What a policy sees at decision time: the observation emitted at close_t
/// plus the causally available close itself and the account state.
pub struct PolicyCtx<'a> {
    pub observation: &'a Observation,
    pub close: f64,
    pub mode: ActionMode,
    pub portfolio: &'a PortfolioState,
}

pub trait Policy {
    fn name(&self) -> &'static str;
    /// Action id in the environment's active action space.
    fn act(&mut self, ctx: &PolicyCtx) -> Result<usize>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkKind {
    Random,
    BuyAndHold,
    Momentum,
    MeanReversion,
}

impl BenchmarkKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "random" => Ok(BenchmarkKind::Random),
            "buy_and_hold" => Ok(BenchmarkKind::BuyAndHold),
            "momentum" => Ok(BenchmarkKind::Momentum),
            "mean_reversion" => Ok(BenchmarkKind::MeanReversion),
            other => Err(Error::Config(format!("unknown benchmark strategy {other:?}"))),
        }
    }
}

/// Construct a benchmark policy by kind.
pub fn benchmark_policy(kind: BenchmarkKind, rng: Pcg64) -> Box<dyn Policy> {
    match kind {
        BenchmarkKind::Random => Box::new(RandomPolicy { rng }),
        BenchmarkKind::BuyAndHold => Box::new(BuyAndHoldPolicy { opened: false }),
        BenchmarkKind::Momentum => Box::new(MomentumPolicy::new(10, 50)),
        BenchmarkKind::MeanReversion => Box::new(MeanReversionPolicy::new(20, 2.0)),
    }
}

/// Uniform over the legal actions of the current mask; produces zero
/// constraint violations by construction.
pub struct RandomPolicy {
    pub rng: Pcg64,
}

impl Policy for RandomPolicy {
    fn name(&self) -> &'static str {
        "random"
    }

    fn act(&mut self, ctx: &PolicyCtx) -> Result<usize> {
        let legal = ctx.observation.mask.legal_ids();
        if legal.is_empty() {
            return Err(Error::Contract("mask with no legal action".into()));
        }
        Ok(legal[self.rng.gen_range(0..legal.len())])
    }
}

/// Open long at the first opportunity, then hold forever.
pub struct BuyAndHoldPolicy {
    opened: bool,
}

impl Policy for BuyAndHoldPolicy {
    fn name(&self) -> &'static str {
        "buy_and_hold"
    }

    fn act(&mut self, ctx: &PolicyCtx) -> Result<usize> {
        let open_id = match ctx.mode {
            ActionMode::Extended => crate::env::Action::OpenLong.id(),
            ActionMode::Simplified => SimpleAction::TargetLong.id(),
        };
        if !self.opened && ctx.observation.mask.is_legal(open_id) {
            self.opened = true;
            return Ok(open_id);
        }
        Ok(0)
    }
}

/// Emit a target-position action through the simplified adapter semantics,
/// regardless of the environment's active mode.
fn emit_target(target: SimpleAction, ctx: &PolicyCtx) -> usize {
    match ctx.mode {
        ActionMode::Simplified => target.id(),
        ActionMode::Extended => adapt_simplified(target, ctx.portfolio).id(),
    }
}

/// SMA crossover: long while the fast average is above the slow one, short
/// otherwise; hold during warm-up.
pub struct MomentumPolicy {
    closes: VecDeque<f64>,
    fast: usize,
    slow: usize,
}

impl MomentumPolicy {
    pub fn new(fast: usize, slow: usize) -> Self {
        MomentumPolicy { closes: VecDeque::with_capacity(slow), fast, slow }
    }

    fn sma(&self, period: usize) -> f64 {
        self.closes.iter().rev().take(period).sum::<f64>() / period as f64
    }
}

impl Policy for MomentumPolicy {
    fn name(&self) -> &'static str {
        "momentum"
    }

    fn act(&mut self, ctx: &PolicyCtx) -> Result<usize> {
        if self.closes.len() == self.slow {
            self.closes.pop_front();
        }
        self.closes.push_back(ctx.close);
        if self.closes.len() < self.slow {
            return Ok(0);
        }
        let target = if self.sma(self.fast) > self.sma(self.slow) {
            SimpleAction::TargetLong
        } else {
            SimpleAction::TargetShort
        };
        Ok(emit_target(target, ctx))
    }
}

/// Bollinger-band reversion: short above the upper band, long below the
/// lower band, hold inside the bands.
pub struct MeanReversionPolicy {
    closes: VecDeque<f64>,
    period: usize,
    k: f64,
}

impl MeanReversionPolicy {
    pub fn new(period: usize, k: f64) -> Self {
        MeanReversionPolicy { closes: VecDeque::with_capacity(period), period, k }
    }
}

impl Policy for MeanReversionPolicy {
    fn name(&self) -> &'static str {
        "mean_reversion"
    }

    fn act(&mut self, ctx: &PolicyCtx) -> Result<usize> {
        if self.closes.len() == self.period {
            self.closes.pop_front();
        }
        self.closes.push_back(ctx.close);
        if self.closes.len() < self.period {
            return Ok(0);
        }
        let values: Vec<f64> = self.closes.iter().copied().collect();
        let (mean, std) = crate::util::mean_std(&values);
        let upper = mean + self.k * std;
        let lower = mean - self.k * std;
        let action = if ctx.close > upper {
            emit_target(SimpleAction::TargetShort, ctx)
        } else if ctx.close < lower {
            emit_target(SimpleAction::TargetLong, ctx)
        } else {
            0
        };
        Ok(action)
    }
}

/// Deterministic greedy policy over a trained Q-network (epsilon = 0).
pub struct GreedyPolicy {
    pub net: QNetwork,
}

impl Policy for GreedyPolicy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn act(&mut self, ctx: &PolicyCtx) -> Result<usize> {
        if ctx.observation.flat.len() != self.net.input_dim() {
            return Err(Error::Contract(format!(
                "observation dimension {} does not match the network input {}",
                ctx.observation.flat.len(),
                self.net.input_dim()
            )));
        }
        let q = self.net.forward(&ctx.observation.flat)?;
        masked_argmax(&q, &ctx.observation.mask)
    }
}

/// Always HOLD; useful as a zero-activity baseline.
pub struct HoldPolicy;

impl Policy for HoldPolicy {
    fn name(&self) -> &'static str {
        "hold_only"
    }

    fn act(&mut self, _ctx: &PolicyCtx) -> Result<usize> {
        Ok(0)
    }
}
