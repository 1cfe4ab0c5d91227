use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::chance::{event_rng, DEAL};
use super::{Action, PlayerId, Step, TerminalReason};

pub const ANTE: u32 = 1;
pub const MAX_RAISES_PER_ROUND: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rank {
    J,
    Q,
    K,
}

impl Rank {
    pub const ALL: [Rank; 3] = [Rank::J, Rank::Q, Rank::K];

    pub fn letter(self) -> char {
        match self {
            Rank::J => 'J',
            Rank::Q => 'Q',
            Rank::K => 'K',
        }
    }
}

/// Chips added by a raise in the given betting round (0-based).
pub fn raise_size(round: u8) -> u32 {
    if round == 0 {
        2
    } else {
        4
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Leduc {
    private: [Rank; 2],
    public: Rank,
    round: u8,
    committed: [u32; 2],
    raises: u8,
    actions_in_round: u8,
    to_act: PlayerId,
    /// `(round, player, action)` in play order.
    history: Vec<(u8, PlayerId, Action)>,
}

impl Leduc {
    pub(crate) fn deal(seed: u64) -> Self {
        let mut deck = [Rank::J, Rank::J, Rank::Q, Rank::Q, Rank::K, Rank::K];
        deck.shuffle(&mut event_rng(seed, DEAL));
        Self::from_deal(deck[0], deck[1], deck[2])
    }

    pub(crate) fn from_deal(p0: Rank, p1: Rank, public: Rank) -> Self {
        Leduc {
            private: [p0, p1],
            public,
            round: 0,
            committed: [ANTE; 2],
            raises: 0,
            actions_in_round: 0,
            to_act: 0,
            history: Vec::new(),
        }
    }

    pub fn private_card(&self, player: PlayerId) -> Rank {
        self.private[player]
    }

    /// The public card, once the first round has ended.
    pub fn public_card(&self) -> Option<Rank> {
        (self.round > 0).then_some(self.public)
    }

    pub fn round(&self) -> u8 {
        self.round
    }

    pub fn contributions(&self) -> [u32; 2] {
        self.committed
    }

    pub fn pot(&self) -> u32 {
        self.committed[0] + self.committed[1]
    }

    pub fn history(&self) -> &[(u8, PlayerId, Action)] {
        &self.history
    }

    pub(crate) fn to_act(&self) -> PlayerId {
        self.to_act
    }

    pub(crate) fn legal_actions(&self, player: PlayerId) -> Vec<Action> {
        let mut out = Vec::with_capacity(3);
        if self.committed[1 - player] > self.committed[player] {
            out.push(Action::Fold);
        }
        out.push(Action::Call);
        if self.raises < MAX_RAISES_PER_ROUND {
            out.push(Action::Raise);
        }
        out
    }

    fn showdown(&self) -> Step {
        let pair = |p: usize| self.private[p] == self.public;
        let winner = if self.private[0] == self.private[1] {
            None
        } else if pair(0) {
            Some(0)
        } else if pair(1) {
            Some(1)
        } else if self.private[0] > self.private[1] {
            Some(0)
        } else {
            Some(1)
        };
        match winner {
            None => Step::end([0.0; 2], TerminalReason::Draw),
            Some(w) => {
                let won = self.committed[1 - w] as f64;
                let mut rewards = [-won; 2];
                rewards[w] = won;
                Step::end(rewards, TerminalReason::Win)
            }
        }
    }

    pub(crate) fn apply(&mut self, player: PlayerId, action: &Action) -> Step {
        self.history.push((self.round, player, action.clone()));
        let other = 1 - player;
        match action {
            Action::Fold => {
                let lost = self.committed[player] as f64;
                let mut rewards = [lost; 2];
                rewards[player] = -lost;
                return Step::end(rewards, TerminalReason::Fold);
            }
            Action::Call => self.committed[player] = self.committed[other],
            Action::Raise => {
                self.committed[player] = self.committed[other] + raise_size(self.round);
                self.raises += 1;
            }
            _ => unreachable!("legality checked by caller"),
        }
        self.actions_in_round += 1;
        let settled = self.committed[0] == self.committed[1];
        if *action == Action::Call && self.actions_in_round >= 2 && settled {
            if self.round == 0 {
                self.round = 1;
                self.raises = 0;
                self.actions_in_round = 0;
                self.to_act = 0;
                return Step::default();
            }
            return self.showdown();
        }
        self.to_act = other;
        Step::default()
    }

    pub(crate) fn observe(&self, player: PlayerId) -> String {
        let mut lines = vec![
            "1. Blind ante: both player_0 and player_1 place 1 chip into the pot.".to_string(),
            format!("2. Deal: your card is {}.", self.private[player].letter()),
        ];
        let mut shown_public = false;
        for (turn, (round, p, a)) in self.history.iter().enumerate() {
            if *round == 1 && !shown_public {
                lines.push(format!("{}. Public card: {}.", lines.len() + 1, self.public.letter()));
                shown_public = true;
            }
            lines.push(format!("{}. Turn-{}: player_{p} chooses {a}.", lines.len() + 1, turn + 1));
        }
        if self.round == 1 && !shown_public {
            lines.push(format!("{}. Public card: {}.", lines.len() + 1, self.public.letter()));
        }
        lines.join("\n")
    }
}
