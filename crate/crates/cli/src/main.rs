//! Command-line front end: training runs, experiment families, benchmark
//! rollouts, data generation, checkpoint backtests, and the conformance
//! suite.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fxlab_core::agent::load_checkpoint;
use fxlab_core::config::{resolve_config_from_files, ResolvedConfig};
use fxlab_core::env::Breach;
use fxlab_core::error::{Error, Result};
use fxlab_core::eval::{
    benchmark_policy, compute_metrics, emit_report, rollout, write_curve, BenchmarkKind,
    GreedyPolicy, MetricsReport,
};
use fxlab_core::runner::{
    build_env, build_run_setup, run_experiment_family, run_training, Family,
};
use fxlab_core::seeding::{seed_all, stream_rng, Stream};
use fxlab_core::{data, verify};

#[derive(Parser)]
#[command(
    name = "fxlab",
    about = "Friction-aware FX trading laboratory",
    version,
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file(s); the first is the base, later files override it.
    #[arg(long = "config", required = true, num_args = 1..)]
    config: Vec<PathBuf>,
    /// Dotted-path overrides, e.g. environment.actions.mode=simplified.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Master seed override (training.random_seed).
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ResolvedConfig> {
        let paths: Vec<&Path> = self.config.iter().map(|p| p.as_path()).collect();
        let mut kv = self.overrides.clone();
        if let Some(seed) = self.seed {
            kv.push(format!("training.random_seed={seed}"));
        }
        resolve_config_from_files(&paths, &kv)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train one agent per the resolved config and write run artifacts.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Artifact root directory.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Run a whole experiment family (e01 | e02 | e03).
    Family {
        /// Family name: e01 (reward ablation), e02 (action space),
        /// e03 (scaling availability).
        #[arg(long)]
        name: String,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Run the anti-lookahead conformance suite.
    Verify,
    /// Roll a rule-based benchmark strategy through the simulator.
    Bench {
        /// Strategy: random | buy_and_hold | momentum | mean_reversion.
        #[arg(long)]
        strategy: String,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Generate a synthetic OHLCV CSV from a config's data section.
    GenData {
        /// Config file describing the synthetic series.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path.
        #[arg(long, default_value = "synthetic.csv")]
        out: PathBuf,
    },
    /// Deterministic full-horizon rollout of a saved checkpoint.
    Backtest {
        #[arg(long)]
        checkpoint: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
}

fn print_metrics(label: &str, m: &MetricsReport) {
    println!(
        "{label}: cum_ret {:.4}% | sharpe {:.3} | sortino {:.3} | mdd {:.3}% | win {:.2}% | \
         turnover {:.2} | trades {} | liq {}",
        m.cumulative_return * 100.0,
        m.sharpe,
        m.sortino,
        m.max_drawdown * 100.0,
        m.win_rate * 100.0,
        m.turnover,
        m.trade_count,
        m.liquidation_count
    );
}

fn cmd_run(cfg: ConfigArgs, out: PathBuf) -> Result<()> {
    let resolved = cfg.resolve()?;
    let label = format!(
        "{}-{}",
        resolved.schema.experiment.family, resolved.schema.experiment.variant
    );
    let (artifacts, summary) = run_training(&resolved, &out, &label)?;
    println!("run complete: {}", artifacts.dir.display());
    println!(
        "steps {} | learn steps {} | target syncs {} | evals {} | episodes {}",
        summary.total_steps,
        summary.learn_steps,
        summary.target_syncs,
        summary.periodic_evals,
        summary.episodes
    );
    print_metrics(&summary.label, &summary.final_metrics);
    Ok(())
}

fn cmd_family(name: &str, cfg: ConfigArgs, out: PathBuf) -> Result<()> {
    let family = Family::parse(name)?;
    let base = cfg.resolve()?;
    let results = run_experiment_family(family, &base, &out)?;
    println!("{} runs complete under {}", results.len(), out.join(family.label()).display());
    for (variant, _, summary) in &results {
        print_metrics(variant, &summary.final_metrics);
    }
    Ok(())
}

fn cmd_verify() -> Result<bool> {
    let report = verify::run_all()?;
    print!("{}", report.render());
    Ok(report.overall_pass)
}

fn cmd_bench(strategy: &str, cfg: ConfigArgs, out: PathBuf) -> Result<()> {
    let kind = BenchmarkKind::parse(strategy)?;
    let resolved = cfg.resolve()?;
    let mut seeds = seed_all(resolved.seed());
    let setup =
        build_run_setup(&resolved.schema, &mut seeds.data_gen, resolved.seed(), Breach::None)?;
    let mut env = setup.env;
    let mut policy = benchmark_policy(kind, stream_rng(resolved.seed(), Stream::Exploration));
    let result = rollout(policy.as_mut(), &mut env)?;
    let metrics = compute_metrics(&result.curve, &result.trades, &result.steps);
    std::fs::create_dir_all(&out).map_err(|e| Error::io(out.display().to_string(), e))?;
    emit_report(
        &[(strategy.to_string(), metrics.clone())],
        &out.join(format!("bench_{strategy}.csv")),
    )?;
    write_curve(&result.curve, &out.join(format!("bench_{strategy}_curve.csv")))?;
    print_metrics(strategy, &metrics);
    Ok(())
}

fn cmd_gen_data(spec: &Path, seed: Option<u64>, out: &Path) -> Result<()> {
    let resolved = resolve_config_from_files(&[spec], &[])?;
    let seed = seed.unwrap_or(resolved.seed());
    let synth = &resolved.schema.environment.data.synthetic;
    let bars = data::generate_synthetic_with(
        &synth.to_spec(resolved.schema.environment.frictions.pip_size),
        synth.n_bars,
        &mut stream_rng(seed, Stream::DataGen),
    )?;
    data::write_ohlcv_csv(out, &bars)?;
    println!("wrote {} bars to {}", bars.len(), out.display());
    Ok(())
}

fn cmd_backtest(checkpoint: &Path, cfg: ConfigArgs, out: PathBuf) -> Result<()> {
    let resolved = cfg.resolve()?;
    let ckpt = load_checkpoint(checkpoint)?;
    if ckpt.config_hash != resolved.hash {
        eprintln!(
            "note: checkpoint config hash {:#x} differs from resolved config {:#x}",
            ckpt.config_hash, resolved.hash
        );
    }
    let net = ckpt.restore_network()?;
    let mut seeds = seed_all(resolved.seed());
    let setup =
        build_run_setup(&resolved.schema, &mut seeds.data_gen, resolved.seed(), Breach::None)?;
    let mut env = build_env(&resolved.schema, setup.data.clone(), resolved.seed(),
        Breach::None)?;
    if net.input_dim() != env.flat_dim() {
        return Err(Error::Contract(format!(
            "checkpoint expects input {} but the environment produces {}",
            net.input_dim(),
            env.flat_dim()
        )));
    }
    let mut policy = GreedyPolicy { net };
    let result = rollout(&mut policy, &mut env)?;
    let metrics = compute_metrics(&result.curve, &result.trades, &result.steps);
    std::fs::create_dir_all(&out).map_err(|e| Error::io(out.display().to_string(), e))?;
    emit_report(&[("backtest".to_string(), metrics.clone())], &out.join("backtest.csv"))?;
    write_curve(&result.curve, &out.join("backtest_curve.csv"))?;
    print_metrics("backtest", &metrics);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { cfg, out } => cmd_run(cfg, out).map(|_| true),
        Command::Family { name, cfg, out } => cmd_family(&name, cfg, out).map(|_| true),
        Command::Verify => cmd_verify(),
        Command::Bench { strategy, cfg, out } => cmd_bench(&strategy, cfg, out).map(|_| true),
        Command::GenData { spec, seed, out } => {
            cmd_gen_data(&spec, seed, &out).map(|_| true)
        }
        Command::Backtest { checkpoint, cfg, out } => {
            cmd_backtest(&checkpoint, cfg, out).map(|_| true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
