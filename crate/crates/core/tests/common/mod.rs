//! Shared oracles and instance generators for the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use selfplay::games::hanabi::{Card, Color, Variant};
use selfplay::games::{kuhn, TerminalReason};
use selfplay::optimize::{surrogate_objective, DecisionPoint, ObjectiveConfig, PolicyParameters, TokenTerm};
use selfplay::{Action, GameState};

/// Per-trajectory turn rewards: 2–16 trajectories, 1–8 turns, values in [−4, 4].
pub fn random_reward_batch(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = rng.gen_range(2..=16);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=8);
            (0..len).map(|_| rng.gen_range(-4.0..=4.0)).collect()
        })
        .collect()
}

/// Unequal lengths with the reward late in the long trajectory: normalizing
/// each turn before summing leaves a clearly nonzero mean.
pub fn regression_batch() -> Vec<Vec<f64>> {
    vec![vec![0.0, 0.0, 0.0, 1.0], vec![1.0], vec![0.0, 2.0], vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0]]
}

pub fn pooled_mean(a: &[Vec<f64>]) -> f64 {
    let n: usize = a.iter().map(Vec::len).sum();
    a.iter().flatten().sum::<f64>() / n as f64
}

/// Suffix sums of each trajectory, computed directly.
pub fn returns_to_go(rewards: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rewards.iter().map(|r| (0..r.len()).map(|k| r[k..].iter().sum()).collect()).collect()
}

/// A small surrogate instance: up to 5 decision points with up to 4 tokens.
pub struct GradInstance {
    pub batch: Vec<TokenTerm>,
    pub new: PolicyParameters,
    pub old: PolicyParameters,
    pub cfg: ObjectiveConfig,
}

pub fn random_grad_instance(rng: &mut ChaCha8Rng) -> GradInstance {
    let points = rng.gen_range(1..=5);
    let mut new = PolicyParameters::new();
    let mut old = PolicyParameters::new();
    let mut batch = Vec::new();
    for key in 0..points as u64 {
        let n = rng.gen_range(2..=4);
        let vocab: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let z_old: Vec<f64> = z.iter().map(|x| x + rng.gen_range(-0.4..0.4)).collect();
        new.insert(key, DecisionPoint { vocab: vocab.clone(), logits: z });
        old.insert(key, DecisionPoint { vocab, logits: z_old });
        for _ in 0..rng.gen_range(1..=3) {
            batch.push(TokenTerm {
                key,
                token: rng.gen_range(0..n),
                vocab_len: n,
                weight: rng.gen_range(0.05..1.0),
                advantage: rng.gen_range(-2.0..2.0),
            });
        }
    }
    let cfg = ObjectiveConfig { kl_coef: 0.2, entropy_coef: rng.gen_range(0.0..0.1), ..ObjectiveConfig::default() };
    GradInstance { batch, new, old, cfg }
}

fn ratio_of(inst: &GradInstance, term: &TokenTerm) -> f64 {
    let p = selfplay::optimize::softmax(&inst.new.get(term.key).unwrap().logits, inst.cfg.temperature);
    let q = selfplay::optimize::softmax(&inst.old.get(term.key).unwrap().logits, inst.cfg.temperature);
    p[term.token] / q[term.token]
}

/// True when some token sits within `margin` of a clip or dual-clip kink.
pub fn near_kink(inst: &GradInstance, margin: f64) -> bool {
    let eps = inst.cfg.clip_eps;
    let c = inst.cfg.dual_clip.unwrap_or(f64::INFINITY);
    inst.batch.iter().any(|t| {
        let r = ratio_of(inst, t);
        (r - (1.0 + eps)).abs() < margin || (r - (1.0 - eps)).abs() < margin || (r - c).abs() < margin
    })
}

/// Largest relative gap between the analytic gradient and central
/// differences with step `h`. Gaps are measured against `max(|a|, |n|, floor)`.
pub fn gradient_error(inst: &GradInstance, h: f64, floor: f64) -> f64 {
    let (_, grad) = surrogate_objective(&inst.batch, &inst.new, &inst.old, None, &inst.cfg).unwrap();
    let keys: Vec<u64> = inst.new.iter().map(|(k, _)| *k).collect();
    let mut worst = 0.0f64;
    for key in keys {
        let n = inst.new.get(key).unwrap().logits.len();
        for j in 0..n {
            let eval = |delta: f64| {
                let mut p = inst.new.clone();
                p.get_mut(key).unwrap().logits[j] += delta;
                surrogate_objective(&inst.batch, &p, &inst.old, None, &inst.cfg).unwrap().0.objective
            };
            let numeric = (eval(h) - eval(-h)) / (2.0 * h);
            let analytic = grad.get(&key).map_or(0.0, |g| g[j]);
            let scale = analytic.abs().max(numeric.abs()).max(floor);
            worst = worst.max((analytic - numeric).abs() / scale);
        }
    }
    worst
}

/// Kuhn value to seat 0 from a hand-written expectation over deals and lines.
/// Arrays are indexed by card J, Q, K.
pub fn kuhn_value_oracle(p0_bet: [f64; 3], p0_call: [f64; 3], p1_bet: [f64; 3], p1_call: [f64; 3]) -> f64 {
    let mut total = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                continue;
            }
            let hi = if a > b { 1.0 } else { -1.0 };
            let bet = p0_bet[a];
            // bet: call -> showdown 2, fold -> +1
            let v_bet = p1_call[b] * 2.0 * hi + (1.0 - p1_call[b]) * 1.0;
            // pass: p1 checks -> showdown 1; p1 bets -> p0 calls 2·hi or folds −1
            let v_pass = (1.0 - p1_bet[b]) * hi + p1_bet[b] * (p0_call[a] * 2.0 * hi - (1.0 - p0_call[a]));
            total += (bet * v_bet + (1.0 - bet) * v_pass) / 6.0;
        }
    }
    total
}

/// The equilibrium family as (p0 bet, p0 call, p1 bet after pass, p1 call).
pub fn nash_tables(alpha: f64) -> ([f64; 3], [f64; 3], [f64; 3], [f64; 3]) {
    ([alpha, 0.0, 3.0 * alpha], [0.0, alpha + 1.0 / 3.0, 1.0], [1.0 / 3.0, 0.0, 1.0], [0.0, 1.0 / 3.0, 1.0])
}

/// Minimax value of a raw tic-tac-toe board for the side to move
/// (cells: 0 empty, 1 X, 2 O).
pub fn ttt_board_minimax(board: &mut [u8; 9], to_move: u8) -> i32 {
    const LINES: [[usize; 3]; 8] =
        [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6]];
    for l in LINES {
        if board[l[0]] != 0 && board[l[0]] == board[l[1]] && board[l[1]] == board[l[2]] {
            return if board[l[0]] == to_move { 1 } else { -1 };
        }
    }
    let mut best = None;
    for i in 0..9 {
        if board[i] == 0 {
            board[i] = to_move;
            let v = -ttt_board_minimax(board, 3 - to_move);
            board[i] = 0;
            best = Some(best.map_or(v, |b: i32| b.max(v)));
        }
    }
    best.unwrap_or(0)
}

/// Minimax value through the engine for the player to move.
pub fn engine_minimax(s: &GameState) -> f64 {
    if s.is_terminal() {
        return s.returns()[s.current_player()];
    }
    s.legal_actions()
        .iter()
        .map(|a| -engine_minimax(&s.apply_action(a).unwrap().state))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Checks all 6 deals × 5 betting lines against the payoff table.
pub fn kuhn_payoff_mismatches() -> Vec<String> {
    use kuhn::Card::*;
    let deals = [[J, Q, K], [J, K, Q], [Q, J, K], [Q, K, J], [K, J, Q], [K, Q, J]];
    let act = |s: &str| if s == "p" { Action::Pass } else { Action::Bet };
    let mut bad = Vec::new();
    for deal in deals {
        let hi = if deal[0] > deal[1] { 1.0 } else { -1.0 };
        let table: [(&[&str], f64); 5] = [
            (&["p", "p"], hi),
            (&["p", "b", "p"], -1.0),
            (&["p", "b", "b"], 2.0 * hi),
            (&["b", "p"], 1.0),
            (&["b", "b"], 2.0 * hi),
        ];
        for (hist, v) in table {
            let mut s = GameState::kuhn_with_deal(deal);
            for h in hist {
                s = s.apply_action(&act(h)).unwrap().state;
            }
            if !s.is_terminal() || s.returns() != [v, -v] {
                bad.push(format!("{deal:?} {hist:?}"));
            }
        }
    }
    bad
}

/// Plays the perfect-information line on a favorable Mini Hanabi deck.
pub fn hanabi_favorable_line() -> (Option<TerminalReason>, [f64; 2]) {
    use Color::{R, Y};
    let deck = [(R, 1), (R, 2), (Y, 1), (Y, 2), (R, 1), (R, 1), (Y, 1), (Y, 1)]
        .into_iter()
        .map(|(c, r)| Card::new(c, r))
        .collect();
    let mut s = GameState::hanabi_with_deck(Variant::Mini, deck);
    for a in [Action::Play(0), Action::RevealRank(2), Action::Play(1), Action::Play(0), Action::Play(0)] {
        s = s.apply_action(&a).unwrap().state;
    }
    (s.terminal_reason(), s.returns())
}
