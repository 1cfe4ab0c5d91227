use std::fmt;

use serde::{Deserialize, Serialize};

use super::hanabi::Color;
use super::PlayerId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mark {
    X,
    O,
}

impl Mark {
    pub fn for_player(player: PlayerId) -> Mark {
        if player == 0 {
            Mark::X
        } else {
            Mark::O
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Mark::X => 'X',
            Mark::O => 'O',
        }
    }

    pub fn other(self) -> Mark {
        match self {
            Mark::X => Mark::O,
            Mark::O => Mark::X,
        }
    }
}

/// A turn-level action. `Display` yields the canonical action text used on
/// the wire and in logs, e.g. `<X(0,0)>`, `<PASS>` or `<Play card 0>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    /// Tic-Tac-Toe placement.
    Place {
        mark: Mark,
        row: u8,
        col: u8,
    },
    /// Connect Four column drop.
    Drop {
        mark: Mark,
        col: u8,
    },
    Pass,
    Bet,
    Fold,
    Call,
    Raise,
    Play(u8),
    Discard(u8),
    RevealColor(Color),
    RevealRank(u8),
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Place { mark, row, col } => write!(f, "<{}({row},{col})>", mark.symbol()),
            Action::Drop { mark, col } => write!(f, "<{}({col})>", mark.symbol()),
            Action::Pass => f.write_str("<PASS>"),
            Action::Bet => f.write_str("<BET>"),
            Action::Fold => f.write_str("<FOLD>"),
            Action::Call => f.write_str("<CALL>"),
            Action::Raise => f.write_str("<RAISE>"),
            Action::Play(i) => write!(f, "<Play card {i}>"),
            Action::Discard(i) => write!(f, "<Discard card {i}>"),
            Action::RevealColor(c) => write!(f, "<Reveal player +1 color {}>", c.letter()),
            Action::RevealRank(r) => write!(f, "<Reveal player +1 rank {r}>"),
        }
    }
}
