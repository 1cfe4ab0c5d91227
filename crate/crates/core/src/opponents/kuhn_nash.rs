//! The one-parameter family of Kuhn poker equilibria.

use super::behavior::StrategyProfile;
use super::tree::GameTree;
use crate::error::{Error, Result};
use crate::games::kuhn::Card;
use crate::games::{Action, GameId, GameState};

/// Default bluffing parameter: the midpoint of `[0, 1/3]`.
pub const DEFAULT_ALPHA: f64 = 1.0 / 6.0;

/// Probability of `<BET>` (bet or call) for the player to move.
fn bet_probability(alpha: f64, seat: usize, card: Card, history: &[Action]) -> f64 {
    use Card::*;
    match (seat, history.len(), card) {
        // opening bet
        (0, 0, J) => alpha,
        (0, 0, Q) => 0.0,
        (0, 0, K) => 3.0 * alpha,
        // call after pass-bet
        (0, 2, J) => 0.0,
        (0, 2, Q) => alpha + 1.0 / 3.0,
        (0, 2, K) => 1.0,
        // after a pass: bet
        (1, 1, J) if history[0] == Action::Pass => 1.0 / 3.0,
        (1, 1, Q) if history[0] == Action::Pass => 0.0,
        (1, 1, K) if history[0] == Action::Pass => 1.0,
        // facing a bet: call
        (1, 1, J) => 0.0,
        (1, 1, Q) => 1.0 / 3.0,
        (1, 1, K) => 1.0,
        _ => unreachable!("no Kuhn decision with {} prior actions", history.len()),
    }
}

/// Seat 0 plays the `alpha` member of the family, seat 1 its equilibrium reply.
pub fn kuhn_nash_policy(alpha: f64) -> Result<StrategyProfile> {
    if !(0.0..=1.0 / 3.0).contains(&alpha) {
        return Err(Error::config(format!("Kuhn equilibrium parameter {alpha} outside [0, 1/3]")));
    }
    let tree = GameTree::build(GameId::Kuhn)?;
    let mut strategy = vec![Vec::new(); tree.infosets.len()];
    // Walk every deal so each infoset is paired with its card and history.
    for a in Card::ALL {
        for b in Card::ALL {
            if a == b {
                continue;
            }
            let c = Card::ALL.into_iter().find(|&c| c != a && c != b).expect("three cards");
            let mut stack = vec![GameState::kuhn_with_deal([a, b, c])];
            while let Some(s) = stack.pop() {
                if s.is_terminal() {
                    continue;
                }
                let seat = s.current_player();
                let k = s.kuhn().expect("kuhn state");
                let bet = bet_probability(alpha, seat, k.card(seat), k.history());
                let i = tree.infoset_index(&s.observe(seat)).expect("tree covers every state");
                // legal order is <PASS>, <BET>
                strategy[i] = vec![1.0 - bet, bet];
                for act in s.legal_actions() {
                    stack.push(s.apply_action(&act).expect("legal").state);
                }
            }
        }
    }
    Ok(StrategyProfile::from_tree(&tree, &strategy))
}
