//! Deterministic full-horizon rollouts: one episode over a data slice, the
//! same env.step path for RL policies and benchmarks alike.

use super::metrics::EquityCurve;
use super::policies::{Policy, PolicyCtx};
use super::trades::{extract_trades, TradeRecord};
use crate::env::{StepInfo, TradingEnv};
use crate::error::Result;

pub struct RolloutResult {
    pub curve: EquityCurve,
    pub trades: Vec<TradeRecord>,
    pub steps: Vec<StepInfo>,
    pub violations: usize,
    pub execution_checksum: u64,
}

/// Reset the environment and drive the policy to episode end.
pub fn rollout(policy: &mut dyn Policy, env: &mut TradingEnv) -> Result<RolloutResult> {
    let mut observation = env.reset()?;
    let mut curve = EquityCurve::new(env.current_timestamp(), env.portfolio().equity);
    let mut steps: Vec<StepInfo> = Vec::new();
    let mut violations = 0usize;
    loop {
        let ctx = PolicyCtx {
            observation: &observation,
            close: env.current_close(),
            mode: env.config().action_mode,
            portfolio: env.portfolio(),
        };
        let action = policy.act(&ctx)?;
        let res = env.step(action)?;
        curve.push(res.info.timestamp, res.info.equity);
        if res.info.violation {
            violations += 1;
        }
        steps.push(res.info);
        if res.done {
            break;
        }
        observation = res.observation;
    }
    let trades = extract_trades(&steps, env.portfolio().unrealized_pnl);
    Ok(RolloutResult {
        curve,
        trades,
        steps,
        violations,
        execution_checksum: env.execution_checksum(),
    })
}
