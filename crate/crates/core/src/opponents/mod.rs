//! Evaluation opponents and game-theoretic oracles: UCT search for the board
//! games, the Kuhn equilibrium family, CFR and exact best responses for the
//! poker games, and head-to-head evaluation.

mod behavior;
mod kuhn_nash;
mod mcts;
mod solve;
mod tree;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::games::GameId;
use crate::rewards::RewardConfig;
use crate::rollout::{play_episode, Policy};

pub use behavior::{BehaviorPolicy, StrategyProfile, UniformPolicy};
pub use kuhn_nash::{kuhn_nash_policy, DEFAULT_ALPHA};
pub use mcts::{mcts_act, mcts_search, MctsPolicy, SearchResult, DEFAULT_EXPLORATION};
pub use solve::{
    best_response, cfr_solve, expected_values, exploitability, profile_exploitability, CfrResult, CfrState,
};
pub use tree::{GameTree, Infoset, Node};

/// Who sits across from the evaluated policy.
#[derive(Clone, Debug, PartialEq)]
pub enum OpponentSpec {
    Mcts(u32),
    KuhnNash(f64),
    Cfr(PathBuf),
    Uniform,
    /// The evaluated policy itself.
    SelfPlay,
}

impl FromStr for OpponentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let bad = || Error::config(format!("bad opponent spec `{s}`"));
        match (kind, arg) {
            ("mcts", Some(n)) => n.parse().map(OpponentSpec::Mcts).map_err(|_| bad()),
            ("kuhn_nash", None) => Ok(OpponentSpec::KuhnNash(DEFAULT_ALPHA)),
            ("kuhn_nash", Some(a)) => a.parse().map(OpponentSpec::KuhnNash).map_err(|_| bad()),
            ("cfr", Some(p)) if !p.is_empty() => Ok(OpponentSpec::Cfr(PathBuf::from(p))),
            ("uniform", None) => Ok(OpponentSpec::Uniform),
            ("self", None) => Ok(OpponentSpec::SelfPlay),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for OpponentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpponentSpec::Mcts(n) => write!(f, "mcts:{n}"),
            OpponentSpec::KuhnNash(a) => write!(f, "kuhn_nash:{a}"),
            OpponentSpec::Cfr(p) => write!(f, "cfr:{}", p.display()),
            OpponentSpec::Uniform => f.write_str("uniform"),
            OpponentSpec::SelfPlay => f.write_str("self"),
        }
    }
}

impl OpponentSpec {
    /// Builds the opponent for `game`; `None` means self-play.
    pub fn build(&self, game: GameId) -> Result<Option<Box<dyn Policy>>> {
        let mismatch = || Error::config(format!("opponent {self} cannot play {game}"));
        Ok(match self {
            OpponentSpec::Mcts(n) => {
                if !game.is_perfect_information() {
                    return Err(mismatch());
                }
                Some(Box::new(MctsPolicy::new(*n)))
            }
            OpponentSpec::KuhnNash(alpha) => {
                if game != GameId::Kuhn {
                    return Err(mismatch());
                }
                Some(Box::new(kuhn_nash_policy(*alpha)?))
            }
            OpponentSpec::Cfr(path) => {
                let file = std::fs::File::open(path)?;
                let profile = StrategyProfile::read_table(std::io::BufReader::new(file))?;
                if profile.game != game {
                    return Err(mismatch());
                }
                Some(Box::new(profile))
            }
            OpponentSpec::Uniform => Some(Box::new(UniformPolicy)),
            OpponentSpec::SelfPlay => None,
        })
    }

    /// The oracle used for fixed-opponent training and evaluation of `game`.
    pub fn default_for(game: GameId) -> Self {
        match game {
            GameId::TicTacToe => OpponentSpec::Mcts(100),
            GameId::ConnectFour => OpponentSpec::Mcts(10),
            GameId::Kuhn => OpponentSpec::KuhnNash(DEFAULT_ALPHA),
            GameId::Leduc | GameId::MiniHanabi | GameId::SimpleHanabi => OpponentSpec::SelfPlay,
        }
    }
}

/// Returns of the evaluated policy, in game units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchupReport {
    pub game: GameId,
    pub n_games: usize,
    /// Mean return as seat 0 and as seat 1.
    pub seat_means: [f64; 2],
    pub mean: f64,
    pub std_err: f64,
    /// Half-width of the 95% normal interval.
    pub ci95: f64,
    /// `mean / max |reward|` of the game.
    pub normalized: f64,
    /// Episodes ended by an invalid emission (either side).
    pub violations: usize,
}

/// Plays `n_games` with `a` in each seat for half of them. Deals are paired:
/// game `j` and game `j + n/2` share a deal with seats swapped.
///
/// A format violation scores as a loss of the largest stake for the offender
/// (zero for both in the cooperative games).
pub fn evaluate_matchup(
    a: &dyn Policy,
    b: &dyn Policy,
    game: GameId,
    n_games: usize,
    base_seed: u64,
) -> Result<MatchupReport> {
    if n_games == 0 || !n_games.is_multiple_of(2) {
        return Err(Error::config(format!("n_games must be even and positive, got {n_games}")));
    }
    let half = n_games / 2;
    let cfg = RewardConfig::default();
    let results: Vec<(usize, f64, bool)> = (0..n_games)
        .into_par_iter()
        .map(|i| {
            let seat = i / half;
            let pair = (i % half) as u64;
            let seats: [&dyn Policy; 2] = if seat == 0 { [a, b] } else { [b, a] };
            let deal = base_seed.wrapping_add(pair);
            let sample = deal.rotate_left(17) ^ (seat as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            let ep = play_episode(game, seats, deal, sample, i as u64, &cfg);
            let ret = match ep.violator {
                None => ep.trajectories[seat].game_return,
                Some(_) if game.is_cooperative() => 0.0,
                Some(v) if v == seat => -game.max_abs_return(),
                Some(_) => game.max_abs_return(),
            };
            (seat, ret, ep.violator.is_some())
        })
        .collect();
    let mut seat_sums = [0.0; 2];
    for &(seat, r, _) in &results {
        seat_sums[seat] += r;
    }
    let values: Vec<f64> = results.iter().map(|r| r.1).collect();
    let mean = values.iter().sum::<f64>() / n_games as f64;
    let var =
        if n_games > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n_games - 1) as f64 } else { 0.0 };
    let std_err = (var / n_games as f64).sqrt();
    Ok(MatchupReport {
        game,
        n_games,
        seat_means: [seat_sums[0] / half as f64, seat_sums[1] / half as f64],
        mean,
        std_err,
        ci95: 1.96 * std_err,
        normalized: mean / game.max_abs_return(),
        violations: results.iter().filter(|r| r.2).count(),
    })
}
