//! Self-play episodes, per-player trajectories and training groups.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::games::{parse_for_state, GameId, GameState, PlayerId, TerminalReason};
use crate::rewards::{compose_turn_reward, FormatStatus, RewardBreakdown, RewardConfig};

/// One sampled token together with the distribution it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenStep {
    /// Decision point the token was sampled at.
    pub key: u64,
    /// Tokens that were allowed at this decision point, in logit order.
    pub vocab: Vec<String>,
    pub token: usize,
    /// Log-probability under the distribution actually sampled from.
    pub logprob: f64,
}

/// What a policy produced for one turn.
#[derive(Clone, Debug, PartialEq)]
pub struct Emission {
    /// Text handed to the action parser.
    pub raw: String,
    pub tokens: Vec<TokenStep>,
}

impl Emission {
    /// Wraps an action string in answer tags.
    pub fn answer(action: &str, tokens: Vec<TokenStep>) -> Self {
        Emission { raw: format!("<answer>{action}</answer>"), tokens }
    }

    /// Number of policy tokens, at least one.
    pub fn length(&self) -> u32 {
        self.tokens.len().max(1) as u32
    }
}

/// Anything that can take a turn. Implementations must be read-only so they
/// can be shared across rollout threads.
pub trait Policy: Send + Sync {
    fn act(&self, state: &GameState, rng: &mut ChaCha8Rng) -> Emission;
}

#[derive(Clone, Debug, PartialEq)]
pub struct TurnRecord {
    pub player: PlayerId,
    /// 1-based position within the player's own trajectory.
    pub k: u32,
    pub observation: String,
    /// Canonical action string, or the raw emission when it failed to parse.
    pub action: String,
    pub tokens: Vec<TokenStep>,
    pub reward: RewardBreakdown,
    /// The player's last turn of the episode.
    pub terminal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub episode_id: u64,
    pub game: GameId,
    pub player: PlayerId,
    pub turns: Vec<TurnRecord>,
    /// Episode reward in game units (unscaled).
    pub game_return: f64,
    /// This player ended the episode with an invalid emission.
    pub violated: bool,
}

impl Trajectory {
    fn empty(episode_id: u64, game: GameId, player: PlayerId) -> Self {
        Trajectory { episode_id, game, player, turns: Vec::new(), game_return: 0.0, violated: false }
    }

    /// Training return, the sum of turn totals.
    pub fn episode_return(&self) -> f64 {
        self.turns.iter().map(|t| t.reward.total).sum()
    }

    pub fn turn_rewards(&self) -> Vec<f64> {
        self.turns.iter().map(|t| t.reward.total).collect()
    }

    pub fn token_count(&self) -> usize {
        self.turns.iter().map(|t| t.tokens.len()).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Episode {
    pub trajectories: [Trajectory; 2],
    pub reason: TerminalReason,
    pub violator: Option<PlayerId>,
}

/// Plays one episode. Chance events come from `deal_seed`, policy sampling
/// from `sample_seed`.
pub fn play_episode(
    game: GameId,
    policies: [&dyn Policy; 2],
    deal_seed: u64,
    sample_seed: u64,
    episode_id: u64,
    cfg: &RewardConfig,
) -> Episode {
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
    let mut state = GameState::new(game, deal_seed);
    let mut trajs = [Trajectory::empty(episode_id, game, 0), Trajectory::empty(episode_id, game, 1)];
    // Scaled reward owed to a player who has not acted yet.
    let mut pending = [0.0f64; 2];
    let scale = cfg.scales.get(game);

    loop {
        let p = state.current_player();
        let observation = state.observe(p);
        let emission = policies[p].act(&state, &mut rng);
        let length = emission.length();
        let k = trajs[p].turns.len() as u32 + 1;
        match parse_for_state(&state, &emission.raw) {
            Ok(action) => {
                let outcome = state.apply_action(&action).expect("parsed action was checked for legality");
                let (mut reward, _) = compose_turn_reward(outcome.rewards[p], game, FormatStatus::Valid, length, cfg);
                reward.add_game(std::mem::take(&mut pending[p]));
                trajs[p].turns.push(TurnRecord {
                    player: p,
                    k,
                    observation,
                    action: action.to_string(),
                    tokens: emission.tokens,
                    reward,
                    terminal: false,
                });
                let q = 1 - p;
                let other = outcome.rewards[q] * scale;
                if other != 0.0 {
                    match trajs[q].turns.last_mut() {
                        Some(turn) => turn.reward.add_game(other),
                        None => pending[q] += other,
                    }
                }
                state = outcome.state;
                if let Some(reason) = outcome.reason {
                    let returns = state.returns();
                    for (i, t) in trajs.iter_mut().enumerate() {
                        t.game_return = returns[i];
                    }
                    return finish(trajs, reason, None);
                }
            }
            Err(_) => {
                let (reward, _) = compose_turn_reward(0.0, game, FormatStatus::Invalid, length, cfg);
                trajs[p].turns.push(TurnRecord {
                    player: p,
                    k,
                    observation,
                    action: emission.raw,
                    tokens: emission.tokens,
                    reward,
                    terminal: false,
                });
                trajs[p].violated = true;
                let returns = state.returns();
                for (i, t) in trajs.iter_mut().enumerate() {
                    t.game_return = returns[i];
                }
                return finish(trajs, TerminalReason::FormatViolation, Some(p));
            }
        }
    }
}

fn finish(mut trajs: [Trajectory; 2], reason: TerminalReason, violator: Option<PlayerId>) -> Episode {
    for t in &mut trajs {
        if let Some(last) = t.turns.last_mut() {
            last.terminal = true;
        }
    }
    Episode { trajectories: trajs, reason, violator }
}

/// One episode with the same seed for chance and sampling.
pub fn run_episode(
    game: GameId,
    policy_p0: &dyn Policy,
    policy_p1: &dyn Policy,
    seed: u64,
    cfg: &RewardConfig,
) -> (Trajectory, Trajectory) {
    let [a, b] = play_episode(game, [policy_p0, policy_p1], seed, seed, seed, cfg).trajectories;
    (a, b)
}

/// Trajectories from one game, partitioned by seat.
#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    pub game: GameId,
    pub instance_id: u64,
    pub trajectories: Vec<Trajectory>,
    /// `subgroups[p]` lists indices into `trajectories` of seat `p`.
    pub subgroups: Vec<Vec<usize>>,
    /// Episodes that ended in a format violation by a trajectory in this group.
    pub violations: usize,
}

impl Group {
    pub fn new(game: GameId, instance_id: u64, trajectories: Vec<Trajectory>) -> Self {
        let mut subgroups = vec![Vec::new(), Vec::new()];
        for (i, t) in trajectories.iter().enumerate() {
            subgroups[t.player].push(i);
        }
        let violations = trajectories.iter().filter(|t| t.violated).count();
        Group { game, instance_id, trajectories, subgroups, violations }
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// Mean game-unit return of seat `p`, if the seat has trajectories.
    pub fn mean_game_return(&self, p: PlayerId) -> Option<f64> {
        let idx = &self.subgroups[p];
        (!idx.is_empty()).then(|| idx.iter().map(|&i| self.trajectories[i].game_return).sum::<f64>() / idx.len() as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupSeeds {
    pub base: u64,
    /// Every episode uses `base` as its deal seed.
    pub shares_deal: bool,
}

impl GroupSeeds {
    pub fn new(base: u64) -> Self {
        GroupSeeds { base, shares_deal: false }
    }

    fn deal(&self, episode: u64) -> u64 {
        if self.shares_deal {
            self.base
        } else {
            self.base.wrapping_add(episode)
        }
    }

    fn sample(&self, episode: u64) -> u64 {
        self.base.wrapping_add(episode) ^ 0x5eed_5eed_5eed_5eed
    }
}

fn check_group_size(group_size: usize) -> Result<()> {
    if group_size < 4 || !group_size.is_multiple_of(2) {
        return Err(Error::config(format!(
            "group size {group_size} must be even and give at least 2 trajectories per seat"
        )));
    }
    Ok(())
}

/// Self-play: `G/2` episodes of `policy` against itself.
pub fn collect_group(
    game: GameId,
    policy: &dyn Policy,
    group_size: usize,
    seeds: GroupSeeds,
    cfg: &RewardConfig,
) -> Result<Group> {
    check_group_size(group_size)?;
    let episodes = (group_size / 2) as u64;
    let trajectories: Vec<Trajectory> = (0..episodes)
        .into_par_iter()
        .map(|e| {
            let ep =
                play_episode(game, [policy, policy], seeds.deal(e), seeds.sample(e), seeds.base.wrapping_add(e), cfg);
            ep.trajectories
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(Group::new(game, seeds.base, trajectories))
}

/// `G` episodes against a frozen opponent; the learner alternates seats and
/// only its trajectories are kept.
pub fn fixed_opponent_group(
    game: GameId,
    policy: &dyn Policy,
    opponent: &dyn Policy,
    group_size: usize,
    seeds: GroupSeeds,
    cfg: &RewardConfig,
) -> Result<Group> {
    check_group_size(group_size)?;
    let trajectories: Vec<Trajectory> = (0..group_size as u64)
        .into_par_iter()
        .map(|e| {
            let seat = (e % 2) as usize;
            let mut seats: [&dyn Policy; 2] = [opponent, opponent];
            seats[seat] = policy;
            let [a, b] =
                play_episode(game, seats, seeds.deal(e), seeds.sample(e), seeds.base.wrapping_add(e), cfg).trajectories;
            if seat == 0 {
                a
            } else {
                b
            }
        })
        .collect();
    Ok(Group::new(game, seeds.base, trajectories))
}

/// One line of the trajectory log. Field order is part of the format.
#[derive(Serialize)]
struct TurnLogLine<'a> {
    episode_id: u64,
    game: GameId,
    player: PlayerId,
    k: u32,
    action: &'a str,
    reward_game: f64,
    reward_format: f64,
    reward_length: f64,
    reward_total: f64,
    terminal: bool,
}

/// Appends one JSON line per turn of every trajectory in `group`.
pub fn write_trajectory_log<W: Write>(out: &mut W, group: &Group) -> Result<()> {
    for t in &group.trajectories {
        for turn in &t.turns {
            let line = TurnLogLine {
                episode_id: t.episode_id,
                game: t.game,
                player: t.player,
                k: turn.k,
                action: &turn.action,
                reward_game: turn.reward.game,
                reward_format: turn.reward.format,
                reward_length: turn.reward.length,
                reward_total: turn.reward.total,
                terminal: turn.terminal,
            };
            serde_json::to_writer(&mut *out, &line)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}
