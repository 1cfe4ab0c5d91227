use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfplay::games::TerminalReason;
use selfplay::optimize::{
    sampling_distribution, DecisionPoint, PolicyParameters, SamplingConfig, TabularPolicy, VocabMode,
};
use selfplay::rewards::{length_reward, RewardConfig};
use selfplay::rollout::{
    collect_group, fixed_opponent_group, play_episode, write_trajectory_log, Emission, GroupSeeds, Policy,
};
use selfplay::{Action, GameId, GameState};

struct Fixed(&'static str);

impl Policy for Fixed {
    fn act(&self, _: &GameState, _: &mut ChaCha8Rng) -> Emission {
        Emission::answer(self.0, Vec::new())
    }
}

struct Garbage;

impl Policy for Garbage {
    fn act(&self, _: &GameState, _: &mut ChaCha8Rng) -> Emission {
        Emission { raw: "I fold, I think?".into(), tokens: Vec::new() }
    }
}

/// Random logits on every decision point the policy meets.
fn random_params(game: GameId, mode: VocabMode, seed: u64) -> PolicyParameters {
    let mut params = PolicyParameters::new();
    let policy_cfg = SamplingConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for e in 0..200 {
        let ep = {
            let p = TabularPolicy::new(&params, policy_cfg.clone(), mode);
            play_episode(game, [&p, &p], e, e, e, &RewardConfig::default())
        };
        for t in ep.trajectories.iter() {
            for turn in &t.turns {
                for tok in &turn.tokens {
                    if params.get(tok.key).is_none() {
                        let logits = (0..tok.vocab.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
                        params.insert(tok.key, DecisionPoint { vocab: tok.vocab.clone(), logits });
                    }
                }
            }
        }
    }
    params
}

#[test]
fn groups_are_reproducible_from_their_seeds() {
    let params = random_params(GameId::Leduc, VocabMode::Action, 1);
    let policy = TabularPolicy::new(&params, SamplingConfig::default(), VocabMode::Action);
    let cfg = RewardConfig::default();
    let a = collect_group(GameId::Leduc, &policy, 16, GroupSeeds::new(77), &cfg).unwrap();
    let b = collect_group(GameId::Leduc, &policy, 16, GroupSeeds::new(77), &cfg).unwrap();
    let c = collect_group(GameId::Leduc, &policy, 16, GroupSeeds::new(78), &cfg).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn self_play_groups_split_evenly_by_seat() {
    let empty = PolicyParameters::new();
    let policy = TabularPolicy::new(&empty, SamplingConfig::default(), VocabMode::Action);
    for game in GameId::ALL {
        let g = collect_group(game, &policy, 8, GroupSeeds::new(3), &RewardConfig::default()).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.subgroups[0].len(), 4);
        assert_eq!(g.subgroups[1].len(), 4);
        for (p, members) in g.subgroups.iter().enumerate() {
            assert!(members.iter().all(|&i| g.trajectories[i].player == p));
        }
    }
}

#[test]
fn fixed_opponent_groups_keep_only_learner_trajectories() {
    let empty = PolicyParameters::new();
    let policy = TabularPolicy::new(&empty, SamplingConfig::default(), VocabMode::Action);
    let g =
        fixed_opponent_group(GameId::Kuhn, &policy, &Fixed("<PASS>"), 8, GroupSeeds::new(5), &RewardConfig::default())
            .unwrap();
    assert_eq!(g.len(), 8);
    assert_eq!(g.subgroups[0].len(), 4);
    assert_eq!(g.subgroups[1].len(), 4);
    assert!(g.trajectories.iter().all(|t| t.turns.iter().all(|turn| turn.tokens.len() == 1)));
}

#[test]
fn odd_or_tiny_groups_are_rejected() {
    let policy = Fixed("<PASS>");
    let cfg = RewardConfig::default();
    assert!(collect_group(GameId::Kuhn, &policy, 2, GroupSeeds::new(0), &cfg).is_err());
    assert!(collect_group(GameId::Kuhn, &policy, 7, GroupSeeds::new(0), &cfg).is_err());
}

#[test]
fn shared_deals_give_every_episode_the_same_cards() {
    let policy = Fixed("<PASS>");
    let seeds = GroupSeeds { base: 9, shares_deal: true };
    let g = collect_group(GameId::Kuhn, &policy, 8, seeds, &RewardConfig::default()).unwrap();
    let first: Vec<&str> = g.trajectories.iter().take(2).map(|t| t.turns[0].observation.as_str()).collect();
    for pair in g.trajectories.chunks(2) {
        let obs: Vec<&str> = pair.iter().map(|t| t.turns[0].observation.as_str()).collect();
        assert_eq!(obs, first);
    }
}

#[test]
fn malformed_output_costs_ten_and_ends_the_episode() {
    let cfg = RewardConfig::default();
    for game in GameId::ALL {
        let ep = play_episode(game, [&Garbage, &Garbage], 1, 1, 1, &cfg);
        assert_eq!(ep.reason, TerminalReason::FormatViolation);
        assert_eq!(ep.violator, Some(0));
        let t = &ep.trajectories[0];
        assert_eq!(t.turns.len(), 1);
        assert!(t.violated && t.turns[0].terminal);
        let r = t.turns[0].reward;
        assert_eq!(r.format, -10.0);
        assert_eq!(r.game, 0.0);
        assert_eq!(r.total, -10.0 + length_reward(1, &cfg));
        assert!(ep.trajectories[1].turns.is_empty());
    }
}

#[test]
fn always_passing_in_kuhn_is_a_one_chip_showdown() {
    let cfg = RewardConfig::default();
    let shaping = cfg.format_valid_bonus + length_reward(1, &cfg);
    for seed in 0..30 {
        let ep = play_episode(GameId::Kuhn, [&Fixed("<PASS>"), &Fixed("<PASS>")], seed, seed, seed, &cfg);
        assert_eq!(ep.reason, TerminalReason::Win);
        let [a, b] = &ep.trajectories;
        assert_eq!(a.game_return, -b.game_return);
        assert_eq!(a.game_return.abs(), 1.0);
        for t in [a, b] {
            assert_eq!(t.turns.len(), 1);
            assert!(t.turns[0].terminal);
            assert_eq!(t.turns[0].reward.game, t.game_return);
            assert!((t.episode_return() - (t.game_return + shaping)).abs() < 1e-12);
        }
    }
}

#[test]
fn the_seat_that_never_acted_still_receives_its_reward() {
    // seat 0 bets, seat 1 folds: seat 1's loss lands on its own fold turn
    let cfg = RewardConfig::default();
    let ep = play_episode(GameId::Kuhn, [&Fixed("<BET>"), &Fixed("<PASS>")], 4, 4, 4, &cfg);
    let [a, b] = &ep.trajectories;
    assert_eq!(a.game_return, 1.0);
    assert_eq!(b.game_return, -1.0);
    assert_eq!(a.turns[0].reward.game, 1.0);
    assert_eq!(b.turns[0].reward.game, -1.0);
}

#[test]
fn tictactoe_rewards_are_scaled() {
    let cfg = RewardConfig::default();
    let params = random_params(GameId::TicTacToe, VocabMode::Action, 2);
    let policy = TabularPolicy::new(&params, SamplingConfig::default(), VocabMode::Action);
    for seed in 0..50 {
        let ep = play_episode(GameId::TicTacToe, [&policy, &policy], seed, seed, seed, &cfg);
        for t in &ep.trajectories {
            let game_part: f64 = t.turns.iter().map(|x| x.reward.game).sum();
            assert_eq!(game_part, 2.0 * t.game_return);
        }
    }
}

#[test]
fn recorded_logprobs_match_the_sampling_distribution() {
    for mode in [VocabMode::Action, VocabMode::Char] {
        let params = random_params(GameId::MiniHanabi, mode, 5);
        let sampling = SamplingConfig::default();
        let policy = TabularPolicy::new(&params, sampling.clone(), mode);
        for seed in 0..50 {
            let ep = play_episode(GameId::MiniHanabi, [&policy, &policy], seed, seed, seed, &RewardConfig::default());
            for turn in ep.trajectories.iter().flat_map(|t| &t.turns) {
                for tok in &turn.tokens {
                    let dist = sampling_distribution(&params.logits(tok.key, tok.vocab.len()), &sampling);
                    assert!((tok.logprob - dist[tok.token].ln()).abs() < 1e-12);
                    assert!(dist[tok.token] > 0.0);
                }
            }
        }
    }
}

#[test]
fn sampled_actions_are_always_legal() {
    let mut episodes = 0;
    for game in GameId::ALL {
        for mode in [VocabMode::Action, VocabMode::Char] {
            let params = random_params(game, mode, 9);
            let policy = TabularPolicy::new(&params, SamplingConfig::default(), mode);
            for seed in 0..850u64 {
                let ep = play_episode(game, [&policy, &policy], seed, !seed, seed, &RewardConfig::default());
                assert_ne!(ep.reason, TerminalReason::FormatViolation, "{game} {mode:?} seed {seed}");
                episodes += 1;
            }
        }
    }
    assert!(episodes >= 10_000);
}

#[test]
fn char_tokens_spell_the_action() {
    let params = random_params(GameId::TicTacToe, VocabMode::Char, 4);
    let policy = TabularPolicy::new(&params, SamplingConfig::default(), VocabMode::Char);
    let ep = play_episode(GameId::TicTacToe, [&policy, &policy], 1, 1, 1, &RewardConfig::default());
    for turn in ep.trajectories.iter().flat_map(|t| &t.turns) {
        let spelled: String = turn.tokens.iter().map(|t| t.vocab[t.token].as_str()).collect();
        assert_eq!(spelled, turn.action);
        assert!(turn.tokens.len() > 1);
    }
}

#[test]
fn uniform_policy_picks_kuhn_actions_evenly() {
    let empty = PolicyParameters::new();
    let policy = TabularPolicy::new(&empty, SamplingConfig::default(), VocabMode::Action);
    let mut counts: HashMap<String, usize> = HashMap::new();
    for seed in 0..4000 {
        let ep = play_episode(GameId::Kuhn, [&policy, &policy], seed, seed, seed, &RewardConfig::default());
        *counts.entry(ep.trajectories[0].turns[0].action.clone()).or_default() += 1;
    }
    let pass = counts[&Action::Pass.to_string()] as f64 / 4000.0;
    assert!((pass - 0.5).abs() < 0.03, "{pass}");
}

#[test]
fn trajectory_log_has_documented_fields_in_order() {
    let g = collect_group(GameId::Kuhn, &Fixed("<PASS>"), 4, GroupSeeds::new(1), &RewardConfig::default()).unwrap();
    let mut out = Vec::new();
    write_trajectory_log(&mut out, &g).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    let keys: Vec<&str> = lines[0]
        .trim_matches(|c| c == '{' || c == '}')
        .split(',')
        .map(|kv| kv.split(':').next().unwrap().trim_matches('"'))
        .collect();
    assert_eq!(
        keys,
        [
            "episode_id",
            "game",
            "player",
            "k",
            "action",
            "reward_game",
            "reward_format",
            "reward_length",
            "reward_total",
            "terminal"
        ]
    );
    let v: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(v["game"], "kuhn");
    assert_eq!(v["terminal"], true);
}
