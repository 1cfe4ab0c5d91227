use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::chance::{event_rng, DEAL};
use super::{Action, PlayerId, Step, TerminalReason};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Card {
    J,
    Q,
    K,
}

impl Card {
    pub const ALL: [Card; 3] = [Card::J, Card::Q, Card::K];

    pub fn long_name(self) -> &'static str {
        match self {
            Card::J => "Jack (J)",
            Card::Q => "Queen (Q)",
            Card::K => "King (K)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Kuhn {
    /// `[player_0, player_1, unseen]`.
    deal: [Card; 3],
    history: Vec<Action>,
}

impl Kuhn {
    pub(crate) fn deal(seed: u64) -> Self {
        let mut deck = Card::ALL;
        deck.shuffle(&mut event_rng(seed, DEAL));
        Self::from_deal(deck)
    }

    pub(crate) fn from_deal(deal: [Card; 3]) -> Self {
        Kuhn { deal, history: Vec::new() }
    }

    pub fn card(&self, player: PlayerId) -> Card {
        self.deal[player]
    }

    pub fn cards(&self) -> [Card; 3] {
        self.deal
    }

    pub fn history(&self) -> &[Action] {
        &self.history
    }

    pub(crate) fn legal_actions(&self) -> Vec<Action> {
        vec![Action::Pass, Action::Bet]
    }

    fn showdown(&self, stake: f64) -> [f64; 2] {
        if self.deal[0] > self.deal[1] {
            [stake, -stake]
        } else {
            [-stake, stake]
        }
    }

    pub(crate) fn apply(&mut self, action: &Action) -> Step {
        use Action::{Bet, Pass};
        self.history.push(action.clone());
        match self.history.as_slice() {
            [Pass, Pass] => Step::end(self.showdown(1.0), TerminalReason::Win),
            [Bet, Bet] | [Pass, Bet, Bet] => Step::end(self.showdown(2.0), TerminalReason::Win),
            [Bet, Pass] => Step::end([1.0, -1.0], TerminalReason::Fold),
            [Pass, Bet, Pass] => Step::end([-1.0, 1.0], TerminalReason::Fold),
            _ => Step::default(),
        }
    }

    pub(crate) fn observe(&self, player: PlayerId) -> String {
        let mut lines = vec![
            "1. Blind ante: both player_0 and player_1 place 1 chip into the pot.".to_string(),
            format!("2. Deal: your card is {}.", self.deal[player].long_name()),
        ];
        for (i, a) in self.history.iter().enumerate() {
            lines.push(format!("{}. Turn-{}: player_{} chooses {a}.", lines.len() + 1, i + 1, i % 2));
        }
        lines.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use crate::games::{GameId, GameState};

    use super::*;

    fn play(mut s: GameState, line: &[Action]) -> GameState {
        for a in line {
            s = s.apply_action(a).unwrap().state;
        }
        s
    }

    #[test]
    fn deal_is_three_distinct_cards() {
        for seed in 0..50 {
            let s = GameState::new(GameId::Kuhn, seed);
            let mut d = s.kuhn().unwrap().cards();
            d.sort();
            assert_eq!(d, Card::ALL);
        }
    }

    #[test]
    fn king_wins_bet_call() {
        let s = GameState::kuhn_with_deal([Card::K, Card::J, Card::Q]);
        let s = play(s, &[Action::Bet, Action::Bet]);
        assert_eq!(s.returns(), [2.0, -2.0]);
        assert!(s.is_terminal());
    }

    #[test]
    fn observation_shows_own_card_and_history() {
        let s = GameState::kuhn_with_deal([Card::J, Card::K, Card::Q]);
        assert_eq!(
            s.observe(0),
            "1. Blind ante: both player_0 and player_1 place 1 chip into the pot.\n\
             2. Deal: your card is Jack (J)."
        );
        let s = play(s, &[Action::Pass]);
        let obs = s.observe(1);
        assert!(obs.contains("your card is King (K)."));
        assert!(obs.ends_with("3. Turn-1: player_0 chooses <PASS>."));
        assert!(!obs.contains("Jack"));
    }
}
