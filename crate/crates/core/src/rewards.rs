//! Per-turn training reward: scaled game reward, format term and length term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::GameId;

/// Multipliers applied to game-unit rewards, one per game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GameScales {
    pub tictactoe: f64,
    pub connect4: f64,
    pub kuhn: f64,
    pub leduc: f64,
    pub mini_hanabi: f64,
    pub simple_hanabi: f64,
}

impl Default for GameScales {
    fn default() -> Self {
        GameScales { tictactoe: 2.0, connect4: 1.0, kuhn: 1.0, leduc: 1.0, mini_hanabi: 1.0, simple_hanabi: 1.0 }
    }
}

impl GameScales {
    pub fn get(&self, game: GameId) -> f64 {
        match game {
            GameId::TicTacToe => self.tictactoe,
            GameId::ConnectFour => self.connect4,
            GameId::Kuhn => self.kuhn,
            GameId::Leduc => self.leduc,
            GameId::MiniHanabi => self.mini_hanabi,
            GameId::SimpleHanabi => self.simple_hanabi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub scales: GameScales,
    pub format_valid_bonus: f64,
    pub format_invalid_penalty: f64,
    pub length_alpha: f64,
    /// Lengths are counted in policy tokens.
    pub length_min: u32,
    pub length_max: u32,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            scales: GameScales::default(),
            format_valid_bonus: 0.05,
            format_invalid_penalty: -10.0,
            length_alpha: 0.5,
            length_min: 11,
            length_max: 2048,
        }
    }
}

impl RewardConfig {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN
    pub fn validate(&self) -> Result<()> {
        if self.length_min >= self.length_max {
            return Err(Error::config("length_min must be below length_max"));
        }
        if !(self.length_alpha >= 0.0) {
            return Err(Error::config("length_alpha must be nonnegative"));
        }
        for g in GameId::ALL {
            let s = self.scales.get(g);
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::config(format!("reward scale for {g} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatStatus {
    Valid,
    Invalid,
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub game: f64,
    pub format: f64,
    pub length: f64,
    pub total: f64,
}

impl RewardBreakdown {
    pub fn new(game: f64, format: f64, length: f64) -> Self {
        RewardBreakdown { game, format, length, total: game + format + length }
    }

    /// Adds game-unit reward that arrived after the turn was recorded.
    pub fn add_game(&mut self, scaled: f64) {
        self.game += scaled;
        self.total = self.game + self.format + self.length;
    }
}

/// `α · clamp(1 − (l − l_min)/(l_max − l_min), 0, 1)`.
pub fn length_reward(length: u32, cfg: &RewardConfig) -> f64 {
    let span = f64::from(cfg.length_max) - f64::from(cfg.length_min);
    let frac = 1.0 - (f64::from(length) - f64::from(cfg.length_min)) / span;
    cfg.length_alpha * frac.clamp(0.0, 1.0)
}

/// Builds the turn reward. The flag is `true` when the episode must end.
pub fn compose_turn_reward(
    game_reward: f64,
    game: GameId,
    format: FormatStatus,
    length: u32,
    cfg: &RewardConfig,
) -> (RewardBreakdown, bool) {
    let (format_term, terminate) = match format {
        FormatStatus::Valid => (cfg.format_valid_bonus, false),
        FormatStatus::Invalid => (cfg.format_invalid_penalty, true),
    };
    let breakdown = RewardBreakdown::new(game_reward * cfg.scales.get(game), format_term, length_reward(length, cfg));
    (breakdown, terminate)
}
