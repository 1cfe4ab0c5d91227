use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use super::{derive_seed, evaluate_params, EvalRow, ExperimentConfig, OpponentMode};
use crate::advantage::agent_specific_advantage;
use crate::error::{Error, Result};
use crate::optimize::{read_checkpoint, write_checkpoint, Checkpoint, TabularPolicy, Trainer};
use crate::rollout::{collect_group, fixed_opponent_group, write_trajectory_log, Group, GroupSeeds};

const COLLECT_TAG: u64 = 1;
const EVAL_TAG: u64 = 2;

#[derive(Clone, Debug, Default)]
pub struct TrainOptions {
    /// Continue from `checkpoint.bin` in the output directory.
    pub resume: bool,
    /// Overwrite an existing run, or resume despite a config mismatch.
    pub force: bool,
    /// Stop after this step even if `max_steps` is larger.
    pub stop_after: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainSummary {
    pub steps: u64,
    pub decision_points: usize,
    /// Rows of the last evaluation, one per game.
    pub final_eval: Vec<EvalRow>,
}

fn metrics_header(cfg: &ExperimentConfig) -> Vec<String> {
    let mut h: Vec<String> = [
        "step",
        "learning_rate",
        "objective",
        "surrogate",
        "kl",
        "entropy",
        "grad_norm",
        "clip_fraction",
        "tokens",
        "decision_points",
        "mean_abs_advantage",
        "violation_rate",
    ]
    .iter()
    .map(ToString::to_string)
    .collect();
    for g in &cfg.games {
        h.push(format!("{}_return_p0", g.name()));
        h.push(format!("{}_return_p1", g.name()));
    }
    h
}

const EVAL_HEADER: [&str; 12] = [
    "step",
    "game",
    "opponent",
    "n_games",
    "mean",
    "std_err",
    "ci95",
    "seat0",
    "seat1",
    "normalized",
    "violations",
    "exact_mean",
];

/// Appends rows to a CSV file, writing `header` if the file is new.
fn csv_appender(path: &Path, header: &[String]) -> Result<csv::Writer<File>> {
    let fresh = !path.exists();
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        w.write_record(header)?;
        w.flush()?;
    }
    Ok(w)
}

/// Drops rows whose leading step column is above `step`.
fn truncate_csv(path: &Path, step: u64) -> Result<()> {
    if !path.exists() {
        return Ok(());
    }
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut kept = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let keep = i == 0 || rec.get(0).and_then(|s| s.parse::<u64>().ok()).is_some_and(|s| s <= step);
        if keep {
            kept.push(rec);
        }
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for rec in kept {
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn eval_record(row: &EvalRow) -> Vec<String> {
    vec![
        row.step.to_string(),
        row.game.name().to_string(),
        row.opponent.clone(),
        row.n_games.to_string(),
        row.mean.to_string(),
        row.std_err.to_string(),
        row.ci95.to_string(),
        row.seat0.to_string(),
        row.seat1.to_string(),
        row.normalized.to_string(),
        row.violations.to_string(),
        row.exact_mean.map(|v| v.to_string()).unwrap_or_default(),
    ]
}

fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("bin.tmp");
    {
        let mut out = BufWriter::new(File::create(&tmp)?);
        write_checkpoint(&mut out, ckpt)?;
        out.flush()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}

fn evaluate_all(cfg: &ExperimentConfig, trainer: &Trainer) -> Result<Vec<EvalRow>> {
    cfg.games
        .iter()
        .enumerate()
        .map(|(gi, &g)| {
            let seed = derive_seed(&[cfg.seed, EVAL_TAG, trainer.step, gi as u64]);
            let spec = cfg.opponent(g)?;
            evaluate_params(
                &trainer.params,
                &cfg.sampling(),
                cfg.vocab_mode,
                g,
                &spec,
                cfg.eval_games,
                seed,
                trainer.step,
            )
        })
        .collect()
}

/// Collects one group per game with the current parameters.
fn collect(cfg: &ExperimentConfig, trainer: &Trainer, step: u64) -> Result<Vec<Group>> {
    let rewards = cfg.reward_config();
    let policy = TabularPolicy::new(&trainer.params, cfg.sampling(), cfg.vocab_mode);
    cfg.games
        .iter()
        .enumerate()
        .map(|(gi, &g)| {
            let seeds = GroupSeeds {
                base: derive_seed(&[cfg.seed, COLLECT_TAG, step, gi as u64]),
                shares_deal: cfg.group_shares_deal,
            };
            match cfg.opponent_mode {
                OpponentMode::SelfPlay => collect_group(g, &policy, cfg.group_size, seeds, &rewards),
                OpponentMode::FixedOpponent => {
                    let opponent = cfg
                        .opponent(g)?
                        .build(g)?
                        .ok_or_else(|| Error::config(format!("no fixed opponent for {g}")))?;
                    fixed_opponent_group(g, &policy, opponent.as_ref(), cfg.group_size, seeds, &rewards)
                }
            }
        })
        .collect()
}

/// Runs (or resumes) training as configured, writing every artifact to
/// `cfg.output_dir`.
pub fn train(cfg: &ExperimentConfig, opts: &TrainOptions) -> Result<TrainSummary> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    let ckpt_path = dir.join("checkpoint.bin");
    let metrics_path = dir.join("metrics.csv");
    let timing_path = dir.join("timing.csv");
    let eval_path = dir.join("eval.csv");
    let log_path = dir.join("trajectories.jsonl");
    let digest = cfg.digest();

    let mut trainer = Trainer::new();
    if opts.resume && ckpt_path.exists() {
        let ckpt = read_checkpoint(&mut BufReader::new(File::open(&ckpt_path)?))?;
        if ckpt.config_digest != digest && !opts.force {
            return Err(Error::Checkpoint(format!(
                "{} was written under a different config; use force to resume anyway",
                ckpt_path.display()
            )));
        }
        trainer = ckpt.trainer;
        for p in [&metrics_path, &timing_path, &eval_path] {
            truncate_csv(p, trainer.step)?;
        }
    } else {
        if ckpt_path.exists() || metrics_path.exists() {
            if !opts.force {
                return Err(Error::config(format!(
                    "{} already holds a run; resume it or force a fresh start",
                    dir.display()
                )));
            }
            for p in [&ckpt_path, &metrics_path, &timing_path, &eval_path, &log_path] {
                if p.exists() {
                    fs::remove_file(p)?;
                }
            }
        }
        fs::create_dir_all(dir)?;
    }
    fs::write(dir.join("config.toml"), cfg.to_toml())?;

    let mut metrics_w = csv_appender(&metrics_path, &metrics_header(cfg))?;
    let mut timing_w = csv_appender(&timing_path, &["step".to_string(), "wall_clock_secs".to_string()])?;
    let eval_header: Vec<String> = EVAL_HEADER.iter().map(ToString::to_string).collect();
    let mut eval_w = csv_appender(&eval_path, &eval_header)?;
    let mut log_w = BufWriter::new(OpenOptions::new().create(true).append(true).open(&log_path)?);

    let mut last_eval = Vec::new();
    if trainer.step == 0 {
        last_eval = evaluate_all(cfg, &trainer)?;
        for row in &last_eval {
            eval_w.write_record(eval_record(row))?;
        }
        eval_w.flush()?;
    }

    let optim = cfg.optim_config();
    let adv_cfg = cfg.advantage_config();
    let last = opts.stop_after.map_or(cfg.max_steps, |s| s.min(cfg.max_steps));
    while trainer.step < last {
        let step = trainer.step + 1;
        let started = Instant::now();
        let groups = collect(cfg, &trainer, step)?;
        let advantages = groups.iter().map(|g| agent_specific_advantage(g, &adv_cfg)).collect::<Result<Vec<_>>>()?;
        let m = trainer.train_step(&groups, &advantages, cfg.scheme.nested_weighting(), &optim)?;

        let n_traj: usize = groups.iter().map(Group::len).sum();
        let violations: usize = groups.iter().map(|g| g.violations).sum();
        let mean_abs = advantages.iter().map(|a| a.mean_abs()).sum::<f64>() / advantages.len() as f64;
        let mut rec = vec![
            m.step.to_string(),
            m.learning_rate.to_string(),
            m.objective.to_string(),
            m.surrogate.to_string(),
            m.kl.to_string(),
            m.entropy.to_string(),
            m.grad_norm.to_string(),
            m.clip_fraction.to_string(),
            m.tokens.to_string(),
            trainer.params.len().to_string(),
            mean_abs.to_string(),
            (violations as f64 / n_traj as f64).to_string(),
        ];
        for g in &groups {
            for p in 0..2 {
                rec.push(g.mean_game_return(p).map(|v| v.to_string()).unwrap_or_default());
            }
        }
        metrics_w.write_record(&rec)?;
        metrics_w.flush()?;

        if cfg.trajectory_log_interval > 0 && step.is_multiple_of(cfg.trajectory_log_interval) {
            for g in &groups {
                write_trajectory_log(&mut log_w, g)?;
            }
            log_w.flush()?;
        }
        if step.is_multiple_of(cfg.eval_interval.max(1)) || step == cfg.max_steps {
            last_eval = evaluate_all(cfg, &trainer)?;
            for row in &last_eval {
                eval_w.write_record(eval_record(row))?;
            }
            eval_w.flush()?;
        }
        timing_w.write_record([step.to_string(), started.elapsed().as_secs_f64().to_string()])?;
        timing_w.flush()?;
        save_checkpoint(&ckpt_path, &Checkpoint { config_digest: digest, trainer: trainer.clone() })?;
    }
    if trainer.step == 0 {
        save_checkpoint(&ckpt_path, &Checkpoint { config_digest: digest, trainer: trainer.clone() })?;
    }
    if last_eval.is_empty() {
        last_eval = evaluate_all(cfg, &trainer)?;
    }
    Ok(TrainSummary { steps: trainer.step, decision_points: trainer.params.len(), final_eval: last_eval })
}
