//! Configurable runs: training loops, periodic evaluation, ablations and the
//! files each run leaves behind in its output directory.
//!
//! ```text
//! config.toml        canonical copy of the run config
//! metrics.csv        one row per step, deterministic columns only
//! timing.csv         wall-clock seconds per step
//! eval.csv           evaluation rows at step 0 and every eval_interval
//! trajectories.jsonl sampled turns from logged steps
//! checkpoint.bin     parameters and optimizer state after the last step
//! ```

mod config;
mod train;

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub use config::{ExperimentConfig, OpponentMode, OUTPUT_DIR_ENV, SEED_ENV};
pub use train::{train, TrainOptions, TrainSummary};

use crate::advantage::Scheme;
use crate::error::{Error, Result};
use crate::games::GameId;
use crate::opponents::{evaluate_matchup, expected_values, kuhn_nash_policy, GameTree, OpponentSpec, StrategyProfile};
use crate::optimize::{read_checkpoint, PolicyParameters, SamplingConfig, TabularPolicy, VocabMode};

/// Mixes `parts` into a 64-bit seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.to_le_bytes());
    }
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 8 bytes"))
}

/// One evaluation of the policy against a game's oracle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalRow {
    pub step: u64,
    pub game: GameId,
    pub opponent: String,
    pub n_games: usize,
    pub mean: f64,
    pub std_err: f64,
    pub ci95: f64,
    pub seat0: f64,
    pub seat1: f64,
    pub normalized: f64,
    pub violations: usize,
    /// Seat-averaged expected return, where it can be computed exactly.
    pub exact_mean: Option<f64>,
}

impl EvalRow {
    /// The exact value when available, otherwise the sampled mean.
    pub fn score(&self) -> f64 {
        self.exact_mean.unwrap_or(self.mean)
    }
}

fn opponent_profile(spec: &OpponentSpec, tree: &GameTree) -> Result<Option<StrategyProfile>> {
    Ok(match spec {
        OpponentSpec::KuhnNash(alpha) => Some(kuhn_nash_policy(*alpha)?),
        OpponentSpec::Uniform => Some(StrategyProfile::uniform(tree)),
        OpponentSpec::Cfr(path) => {
            let file = std::fs::File::open(path)?;
            Some(StrategyProfile::read_table(std::io::BufReader::new(file))?)
        }
        OpponentSpec::Mcts(_) | OpponentSpec::SelfPlay => None,
    })
}

/// Seat-averaged expected return of `learner` against `opponent`.
pub fn exact_matchup_value(tree: &GameTree, learner: &StrategyProfile, opponent: &StrategyProfile) -> f64 {
    let l = learner.tabulate(tree);
    let o = opponent.tabulate(tree);
    let mut total = 0.0;
    for seat in 0..2 {
        let mixed: Vec<Vec<f64>> = tree
            .infosets
            .iter()
            .enumerate()
            .map(|(i, info)| if info.player == seat { l[i].clone() } else { o[i].clone() })
            .collect();
        total += expected_values(tree, &mixed)[seat];
    }
    total / 2.0
}

/// Evaluates tabular parameters on `game` against `spec`.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_params(
    params: &PolicyParameters,
    sampling: &SamplingConfig,
    mode: VocabMode,
    game: GameId,
    spec: &OpponentSpec,
    n_games: usize,
    seed: u64,
    step: u64,
) -> Result<EvalRow> {
    let policy = TabularPolicy::new(params, sampling.clone(), mode);
    let opponent = spec.build(game)?;
    let report = match &opponent {
        Some(o) => evaluate_matchup(&policy, o.as_ref(), game, n_games, seed)?,
        None => evaluate_matchup(&policy, &policy, game, n_games, seed)?,
    };
    let exact_mean = if mode == VocabMode::Action && matches!(game, GameId::Kuhn | GameId::Leduc) {
        let tree = GameTree::build(game)?;
        let learner = StrategyProfile::from_tabular(&tree, params, sampling);
        match spec {
            OpponentSpec::SelfPlay => Some(exact_matchup_value(&tree, &learner, &learner)),
            _ => opponent_profile(spec, &tree)?.map(|o| exact_matchup_value(&tree, &learner, &o)),
        }
    } else {
        None
    };
    Ok(EvalRow {
        step,
        game,
        opponent: spec.to_string(),
        n_games,
        mean: report.mean,
        std_err: report.std_err,
        ci95: report.ci95,
        seat0: report.seat_means[0],
        seat1: report.seat_means[1],
        normalized: report.normalized,
        violations: report.violations,
        exact_mean,
    })
}

/// Loads a checkpoint and evaluates it against `spec` on `game`.
pub fn evaluate_checkpoint(
    path: &Path,
    cfg: &ExperimentConfig,
    game: GameId,
    spec: &OpponentSpec,
    n_games: usize,
    seed: u64,
) -> Result<EvalRow> {
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    let ckpt = read_checkpoint(&mut file)?;
    evaluate_params(&ckpt.trainer.params, &cfg.sampling(), cfg.vocab_mode, game, spec, n_games, seed, ckpt.trainer.step)
}

/// One ablation arm.
#[derive(Clone, Debug, PartialEq)]
pub struct Variant {
    pub name: &'static str,
    pub scheme: Scheme,
    pub agent_specific: bool,
    pub opponent_mode: OpponentMode,
}

impl Variant {
    pub fn apply(&self, base: &ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            scheme: self.scheme,
            agent_specific: self.agent_specific,
            opponent_mode: self.opponent_mode,
            ..base.clone()
        }
    }
}

/// Full method, turn-level credit removed, agent-specific baseline removed,
/// and training against the fixed oracle instead of self-play.
pub fn standard_variants() -> Vec<Variant> {
    vec![
        Variant { name: "mars", scheme: Scheme::Mars, agent_specific: true, opponent_mode: OpponentMode::SelfPlay },
        Variant {
            name: "no_turn_level",
            scheme: Scheme::NaiveMulti,
            agent_specific: true,
            opponent_mode: OpponentMode::SelfPlay,
        },
        Variant {
            name: "no_agent_specific",
            scheme: Scheme::Mars,
            agent_specific: false,
            opponent_mode: OpponentMode::SelfPlay,
        },
        Variant {
            name: "fixed_opponent",
            scheme: Scheme::Mars,
            agent_specific: true,
            opponent_mode: OpponentMode::FixedOpponent,
        },
    ]
}

/// Final score of one variant on one game across seeds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationRow {
    pub variant: String,
    pub game: GameId,
    pub seeds: usize,
    pub mean: f64,
    pub std: f64,
}

/// Trains every variant with seeds `base.seed .. base.seed + seeds` under
/// `out_dir/<variant>/seed_<s>` and writes `out_dir/ablation.csv`.
///
/// Variants that cannot run on a game (fixed-opponent without an oracle) are
/// skipped with a message on stderr.
pub fn ablate(base: &ExperimentConfig, variants: &[Variant], seeds: u64, out_dir: &Path) -> Result<Vec<AblationRow>> {
    std::fs::create_dir_all(out_dir)?;
    let mut rows = Vec::new();
    for v in variants {
        let mut cfg = v.apply(base);
        let probe = cfg.clone();
        cfg.games.retain(|&g| {
            let ok = probe.opponent_mode == OpponentMode::SelfPlay
                || probe.opponent(g).map(|s| s != OpponentSpec::SelfPlay).unwrap_or(false);
            if !ok {
                eprintln!("skipping {} on {g}: no fixed opponent", v.name);
            }
            ok
        });
        if cfg.games.is_empty() {
            continue;
        }
        let mut finals: Vec<Vec<f64>> = vec![Vec::new(); cfg.games.len()];
        for s in 0..seeds {
            let run = ExperimentConfig {
                seed: base.seed + s,
                output_dir: out_dir.join(v.name).join(format!("seed_{}", base.seed + s)),
                ..cfg.clone()
            };
            let summary = train(&run, &TrainOptions { force: true, ..TrainOptions::default() })?;
            for (gi, &g) in cfg.games.iter().enumerate() {
                let row = summary
                    .final_eval
                    .iter()
                    .find(|r| r.game == g)
                    .ok_or_else(|| Error::config("run ended without a final evaluation"))?;
                finals[gi].push(row.score());
            }
        }
        for (gi, &g) in cfg.games.iter().enumerate() {
            let xs = &finals[gi];
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let std = if xs.len() > 1 {
                (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
            } else {
                0.0
            };
            rows.push(AblationRow { variant: v.name.to_string(), game: g, seeds: xs.len(), mean, std });
        }
    }
    let mut w = csv::Writer::from_path(out_dir.join("ablation.csv"))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(rows)
}

/// Renders ablation rows as an aligned `mean ± std` table.
pub fn format_ablation_table(rows: &[AblationRow]) -> String {
    let mut out = format!("{:<20} {:<14} {:>20}\n", "variant", "game", "final score");
    for r in rows {
        let cell = format!("{:.4} ± {:.4}", r.mean, r.std);
        out.push_str(&format!("{:<20} {:<14} {:>20}\n", r.variant, r.game.name(), cell));
    }
    out
}

/// Size and shape of a checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckpointSummary {
    pub step: u64,
    pub config_digest: String,
    pub decision_points: usize,
    pub parameters: usize,
    /// Largest |logit| over all points.
    pub max_abs_logit: f64,
}

pub fn inspect_checkpoint(path: &Path) -> Result<CheckpointSummary> {
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    let ckpt = read_checkpoint(&mut file)?;
    let params = &ckpt.trainer.params;
    Ok(CheckpointSummary {
        step: ckpt.trainer.step,
        config_digest: ckpt.config_digest.iter().map(|b| format!("{b:02x}")).collect(),
        decision_points: params.len(),
        parameters: params.iter().map(|(_, p)| p.logits.len()).sum(),
        max_abs_logit: params.iter().flat_map(|(_, p)| p.logits.iter()).fold(0.0, |m, z| m.max(z.abs())),
    })
}
