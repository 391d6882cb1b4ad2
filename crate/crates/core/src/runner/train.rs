//! The training loop: mask-aware epsilon-greedy interaction, masked replay
//! learning with learn/sync/eval cadences, episode management, and full
//! artifact emission.

use std::fs;
use std::path::Path;

use rand::Rng;

use super::artifacts::{
    EpisodeRecord, EvalRecord, JsonlWriter, RewardTraceRecord, RunArtifacts, StepLogRecord,
};
use super::setup::{build_env, build_run_setup};
use crate::agent::{
    ddqn_targets, dqn_targets, masked_argmax, save_checkpoint, sync_target, train_step, Adam,
    AgentKind, Checkpoint, QNetwork, ReplayBuffer, Transition,
};
use crate::config::{ResolvedConfig, TargetSyncUnit};
use crate::env::Breach;
use crate::error::{Error, Result};
use crate::eval::{compute_metrics, emit_report, rollout, write_curve, GreedyPolicy,
    MetricsReport};
use crate::seeding::seed_all;

/// Aggregate facts about one completed run; cadence counts are exact.
#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub label: String,
    pub total_steps: u64,
    pub learn_steps: u64,
    pub target_syncs: u64,
    pub periodic_evals: u64,
    pub episodes: u64,
    pub violations: u64,
    pub liquidations: u64,
    pub final_equity: f64,
    pub final_metrics: MetricsReport,
    pub config_hash: u64,
}

/// Execute one full training run and write every artifact. The run label
/// names the artifact directory under `out_root`.
pub fn run_training(
    cfg: &ResolvedConfig,
    out_root: &Path,
    label: &str,
) -> Result<(RunArtifacts, TrainSummary)> {
    let schema = &cfg.schema;
    schema.validate()?;
    let artifacts = RunArtifacts::create(out_root, label)?;
    fs::write(&artifacts.resolved_config, &cfg.canonical_yaml)
        .map_err(|e| Error::io(artifacts.resolved_config.display().to_string(), e))?;

    let mut seeds = seed_all(cfg.seed());
    let setup = build_run_setup(schema, &mut seeds.data_gen, cfg.seed(), Breach::None)?;
    setup.prepared.scaler.save(&artifacts.scaler_params)?;
    let mut env = setup.env;

    let t_cfg = &schema.agent.training;
    let mut online = QNetwork::new(
        env.flat_dim(),
        &schema.agent.model.hidden_dims,
        env.n_actions(),
        &mut seeds.agent_init,
    )?;
    let mut target = online.clone();
    let mut opt = Adam::new(schema.adam_config(), online.n_params());
    let mut replay = ReplayBuffer::new(t_cfg.replay_capacity);
    let schedule = schema.epsilon_schedule();

    let mut step_log = JsonlWriter::create(&artifacts.step_log)?;
    let mut reward_log = JsonlWriter::create(&artifacts.reward_trace_log)?;
    let mut episode_log = JsonlWriter::create(&artifacts.episode_log)?;
    let mut eval_log = JsonlWriter::create(&artifacts.eval_log)?;

    let mut obs = env.reset()?;
    let mut episode: u64 = 0;
    let mut episode_start: u64 = 0;
    let mut learn_steps: u64 = 0;
    let mut target_syncs: u64 = 0;
    let mut periodic_evals: u64 = 0;
    let mut violations: u64 = 0;
    let mut liquidations: u64 = 0;

    let total = t_cfg.total_timesteps;
    for t in 0..total {
        let epsilon = schedule.value(t);
        // Mask-aware epsilon-greedy; the forward pass is skipped on
        // exploration draws but the stream consumption is identical to
        // select_action.
        let action = if seeds.exploration.gen::<f64>() < epsilon {
            let legal = obs.mask.legal_ids();
            legal[seeds.exploration.gen_range(0..legal.len())]
        } else {
            masked_argmax(&online.forward(&obs.flat)?, &obs.mask)?
        };

        let res = env.step(action)?;
        if res.info.violation {
            violations += 1;
        }
        if res.info.liquidation_event {
            liquidations += 1;
        }
        replay.push(Transition {
            s: obs.flat.clone().into_boxed_slice(),
            a: action,
            r: res.reward,
            s_next: res.observation.flat.clone().into_boxed_slice(),
            done: res.done,
            mask: obs.mask.bits().to_vec().into_boxed_slice(),
            mask_next: res.observation.mask.bits().to_vec().into_boxed_slice(),
        });

        let mut loss: Option<f64> = None;
        if t >= t_cfg.learn_start_steps
            && t.is_multiple_of(t_cfg.learn_frequency)
            && replay.len() >= t_cfg.batch_size
        {
            let batch = replay.sample(t_cfg.batch_size, &mut seeds.replay)?;
            let targets = match schema.agent.name {
                AgentKind::Dqn => dqn_targets(&batch, &target, t_cfg.gamma)?,
                AgentKind::DoubleDqn => ddqn_targets(&batch, &online, &target, t_cfg.gamma)?,
            };
            match train_step(
                &mut online,
                &mut opt,
                &batch,
                &targets,
                t_cfg.huber_delta,
                t_cfg.grad_clip_norm,
            ) {
                Ok((l, _norm)) => loss = Some(l),
                Err(fault @ Error::TrainingFault(_)) => {
                    // Preserve state for diagnosis, then abort.
                    let ckpt = Checkpoint::capture(&online, &opt, cfg.hash, t);
                    save_checkpoint(&artifacts.checkpoints.join("fault.ckpt"), &ckpt)?;
                    step_log.finish()?;
                    reward_log.finish()?;
                    episode_log.finish()?;
                    eval_log.finish()?;
                    return Err(fault);
                }
                Err(other) => return Err(other),
            }
            learn_steps += 1;
            if t_cfg.target_sync_unit == TargetSyncUnit::LearnSteps
                && learn_steps.is_multiple_of(t_cfg.target_sync_interval)
            {
                sync_target(&mut target, &online);
                target_syncs += 1;
            }
        }
        if t_cfg.target_sync_unit == TargetSyncUnit::EnvSteps
            && t.is_multiple_of(t_cfg.target_sync_interval)
        {
            sync_target(&mut target, &online);
            target_syncs += 1;
        }

        step_log.write(&StepLogRecord::from_info(
            t, episode, &res.info, res.reward, epsilon, loss, res.done,
        ))?;
        reward_log.write(&RewardTraceRecord { step: t, trace: &res.info.reward_trace })?;

        if res.done {
            let end_reason = res.info.end_reason.expect("done step carries a reason");
            episode_log.write(&EpisodeRecord {
                episode,
                start_step: episode_start,
                end_step: t,
                steps: t - episode_start + 1,
                end_reason,
                final_equity: res.info.equity,
                cumulative_return: res.info.equity / env.config().initial_capital - 1.0,
            })?;
            episode += 1;
            episode_start = t + 1;
            obs = env.reset()?;
        } else {
            obs = res.observation;
        }

        if t.is_multiple_of(t_cfg.eval_interval) {
            let record = periodic_eval(schema, &setup.data, cfg.seed(), &online, t)?;
            eval_log.write(&record)?;
            periodic_evals += 1;
        }
    }

    let ckpt = Checkpoint::capture(&online, &opt, cfg.hash, total);
    save_checkpoint(&artifacts.final_checkpoint, &ckpt)?;

    // Deterministic full-horizon evaluation of the final policy.
    let mut eval_env = build_env(schema, setup.data.clone(), cfg.seed(), Breach::None)?;
    let mut policy = GreedyPolicy { net: online.clone() };
    let final_roll = rollout(&mut policy, &mut eval_env)?;
    let final_metrics = compute_metrics(&final_roll.curve, &final_roll.trades, &final_roll.steps);
    emit_report(&[(label.to_string(), final_metrics.clone())], &artifacts.metrics_report)?;
    write_curve(&final_roll.curve, &artifacts.equity_curve)?;

    step_log.finish()?;
    reward_log.finish()?;
    episode_log.finish()?;
    eval_log.finish()?;

    let summary = TrainSummary {
        label: label.to_string(),
        total_steps: total,
        learn_steps,
        target_syncs,
        periodic_evals,
        episodes: episode,
        violations,
        liquidations,
        final_equity: final_roll.curve.final_equity(),
        final_metrics,
        config_hash: cfg.hash,
    };
    Ok((artifacts, summary))
}

/// Frozen-network deterministic rollout over the train slice; training
/// state (buffer, schedules, optimizer) is untouched.
fn periodic_eval(
    schema: &crate::config::ConfigSchema,
    data: &std::sync::Arc<crate::env::EnvData>,
    seed: u64,
    online: &QNetwork,
    at_step: u64,
) -> Result<EvalRecord> {
    let mut env = build_env(schema, data.clone(), seed, Breach::None)?;
    let mut policy = GreedyPolicy { net: online.clone() };
    let roll = rollout(&mut policy, &mut env)?;
    let metrics = compute_metrics(&roll.curve, &roll.trades, &roll.steps);
    Ok(EvalRecord {
        at_step,
        steps: roll.steps.len(),
        final_equity: roll.curve.final_equity(),
        cumulative_return: metrics.cumulative_return,
        sharpe: metrics.sharpe,
        max_drawdown: metrics.max_drawdown,
        turnover: metrics.turnover,
        trade_count: metrics.trade_count,
        violations: roll.violations,
    })
}
