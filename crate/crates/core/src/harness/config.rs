use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::advantage::{AdvantageConfig, Scheme};
use crate::error::{Error, Result};
use crate::games::GameId;
use crate::opponents::{OpponentSpec, DEFAULT_ALPHA};
use crate::optimize::{KlAnchor, ObjectiveConfig, OptimConfig, SamplingConfig, VocabMode};
use crate::rewards::{GameScales, RewardConfig};

pub const SEED_ENV: &str = "SELFPLAY_SEED";
pub const OUTPUT_DIR_ENV: &str = "SELFPLAY_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpponentMode {
    SelfPlay,
    FixedOpponent,
}

/// One run, as a flat TOML document. Every key is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub games: Vec<GameId>,
    pub seed: u64,
    pub output_dir: PathBuf,

    pub group_size: usize,
    pub max_steps: u64,
    pub eval_interval: u64,
    pub eval_games: usize,
    /// Steps whose trajectories go to the log; 0 logs none.
    pub trajectory_log_interval: u64,

    pub scheme: Scheme,
    pub agent_specific: bool,
    pub per_turn_baseline: bool,
    pub lambd: f64,
    pub opponent_mode: OpponentMode,
    pub group_shares_deal: bool,
    pub vocab_mode: VocabMode,

    pub learning_rate: f64,
    pub warmup_steps: u64,
    pub ppo_policy_clip: f64,
    pub ppo_epochs: u32,
    pub dual_clip: bool,
    pub dual_clip_c: f64,
    pub kl_loss: bool,
    pub kl_loss_coef: f64,
    pub kl_anchor: KlAnchor,
    pub entropy_coef: f64,
    pub grad_clip: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub weight_decay: f64,

    pub sampling_temperature: f64,
    pub top_p: f64,
    pub top_k: usize,

    pub scale_tictactoe: f64,
    pub scale_connect4: f64,
    pub scale_kuhn: f64,
    pub scale_leduc: f64,
    pub scale_mini_hanabi: f64,
    pub scale_simple_hanabi: f64,
    pub format_valid_bonus: f64,
    pub format_invalid_penalty: f64,
    pub length_alpha: f64,
    pub length_min: u32,
    pub length_max: u32,

    /// Oracle per game, used for evaluation and fixed-opponent training.
    pub opponent_tictactoe: String,
    pub opponent_connect4: String,
    pub opponent_kuhn: String,
    pub opponent_leduc: String,
    pub opponent_mini_hanabi: String,
    pub opponent_simple_hanabi: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let optim = OptimConfig::default();
        let sampling = SamplingConfig::default();
        let rewards = RewardConfig::default();
        ExperimentConfig {
            games: vec![GameId::Kuhn],
            seed: 0,
            output_dir: PathBuf::from("runs/default"),
            group_size: 32,
            max_steps: 200,
            eval_interval: 20,
            eval_games: 500,
            trajectory_log_interval: 20,
            scheme: Scheme::Mars,
            agent_specific: true,
            per_turn_baseline: false,
            lambd: 1.0,
            opponent_mode: OpponentMode::SelfPlay,
            group_shares_deal: false,
            vocab_mode: VocabMode::Action,
            learning_rate: optim.learning_rate,
            warmup_steps: optim.warmup_steps,
            ppo_policy_clip: optim.objective.clip_eps,
            ppo_epochs: optim.ppo_epochs,
            dual_clip: true,
            dual_clip_c: 3.0,
            kl_loss: true,
            kl_loss_coef: optim.objective.kl_coef,
            kl_anchor: optim.kl_anchor,
            entropy_coef: optim.objective.entropy_coef,
            grad_clip: optim.grad_clip,
            adam_beta1: optim.adam_beta1,
            adam_beta2: optim.adam_beta2,
            adam_eps: optim.adam_eps,
            weight_decay: optim.weight_decay,
            sampling_temperature: sampling.temperature,
            top_p: sampling.top_p,
            top_k: sampling.top_k,
            scale_tictactoe: rewards.scales.tictactoe,
            scale_connect4: rewards.scales.connect4,
            scale_kuhn: rewards.scales.kuhn,
            scale_leduc: rewards.scales.leduc,
            scale_mini_hanabi: rewards.scales.mini_hanabi,
            scale_simple_hanabi: rewards.scales.simple_hanabi,
            format_valid_bonus: rewards.format_valid_bonus,
            format_invalid_penalty: rewards.format_invalid_penalty,
            length_alpha: rewards.length_alpha,
            length_min: rewards.length_min,
            length_max: rewards.length_max,
            opponent_tictactoe: "mcts:100".into(),
            opponent_connect4: "mcts:10".into(),
            opponent_kuhn: format!("kuhn_nash:{DEFAULT_ALPHA}"),
            opponent_leduc: "uniform".into(),
            opponent_mini_hanabi: "self".into(),
            opponent_simple_hanabi: "self".into(),
        }
    }
}

impl ExperimentConfig {
    /// Parses TOML text; errors carry the offending line.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and applies environment overrides.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_env()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(seed) = std::env::var(SEED_ENV) {
            self.seed =
                seed.trim().parse().map_err(|_| Error::config(format!("{SEED_ENV}=`{seed}` is not an integer")))?;
        }
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            self.output_dir = PathBuf::from(dir);
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical text, ignoring the output directory.
    pub fn digest(&self) -> [u8; 32] {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        Sha256::digest(c.to_toml().as_bytes()).into()
    }

    pub fn validate(&self) -> Result<()> {
        if self.games.is_empty() {
            return Err(Error::config("games must list at least one game"));
        }
        let mut seen = self.games.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.games.len() {
            return Err(Error::config("games lists a game twice"));
        }
        if self.group_size < 4 || !self.group_size.is_multiple_of(2) {
            return Err(Error::config("group_size must be even and at least 4"));
        }
        if !self.eval_games.is_multiple_of(2) {
            return Err(Error::config("eval_games must be even"));
        }
        if !(0.0..=1.0).contains(&self.lambd) {
            return Err(Error::config("lambd must lie in [0, 1]"));
        }
        self.reward_config().validate()?;
        self.optim_config().validate()?;
        self.sampling().validate()?;
        for &g in &self.games {
            let spec = self.opponent(g)?;
            spec.build(g)?;
            if self.opponent_mode == OpponentMode::FixedOpponent && spec == OpponentSpec::SelfPlay {
                return Err(Error::config(format!(
                    "fixed_opponent mode needs an oracle for {g}; set opponent_{}",
                    g.name()
                )));
            }
        }
        Ok(())
    }

    pub fn opponent(&self, game: GameId) -> Result<OpponentSpec> {
        let text = match game {
            GameId::TicTacToe => &self.opponent_tictactoe,
            GameId::ConnectFour => &self.opponent_connect4,
            GameId::Kuhn => &self.opponent_kuhn,
            GameId::Leduc => &self.opponent_leduc,
            GameId::MiniHanabi => &self.opponent_mini_hanabi,
            GameId::SimpleHanabi => &self.opponent_simple_hanabi,
        };
        text.parse()
    }

    pub fn reward_config(&self) -> RewardConfig {
        RewardConfig {
            scales: GameScales {
                tictactoe: self.scale_tictactoe,
                connect4: self.scale_connect4,
                kuhn: self.scale_kuhn,
                leduc: self.scale_leduc,
                mini_hanabi: self.scale_mini_hanabi,
                simple_hanabi: self.scale_simple_hanabi,
            },
            format_valid_bonus: self.format_valid_bonus,
            format_invalid_penalty: self.format_invalid_penalty,
            length_alpha: self.length_alpha,
            length_min: self.length_min,
            length_max: self.length_max,
        }
    }

    pub fn sampling(&self) -> SamplingConfig {
        SamplingConfig { temperature: self.sampling_temperature, top_p: self.top_p, top_k: self.top_k }
    }

    pub fn optim_config(&self) -> OptimConfig {
        OptimConfig {
            objective: ObjectiveConfig {
                clip_eps: self.ppo_policy_clip,
                dual_clip: self.dual_clip.then_some(self.dual_clip_c),
                kl_coef: if self.kl_loss { self.kl_loss_coef } else { 0.0 },
                entropy_coef: self.entropy_coef,
                temperature: self.sampling_temperature,
            },
            kl_anchor: self.kl_anchor,
            learning_rate: self.learning_rate,
            warmup_steps: self.warmup_steps,
            max_steps: self.max_steps,
            grad_clip: self.grad_clip,
            adam_beta1: self.adam_beta1,
            adam_beta2: self.adam_beta2,
            adam_eps: self.adam_eps,
            weight_decay: self.weight_decay,
            ppo_epochs: self.ppo_epochs,
        }
    }

    pub fn advantage_config(&self) -> AdvantageConfig {
        AdvantageConfig {
            scheme: self.scheme,
            agent_specific: self.agent_specific,
            per_turn_baseline: self.per_turn_baseline,
            lambda: self.lambd,
        }
    }
}
