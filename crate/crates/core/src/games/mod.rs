//! Rule engines for the six two-player games and the shared turn-level interface.
//!
//! A [`GameState`] is an immutable value: [`GameState::apply_action`] returns a
//! fresh state inside a [`TurnOutcome`]. All chance events (deals, draws) are
//! resolved from the seed when the game is created, so an episode is a pure
//! function of `(game, seed, actions)`.

mod action;
mod chance;
pub mod connect4;
pub mod hanabi;
pub mod kuhn;
pub mod leduc;
mod parse;
mod prompt;
pub mod tictactoe;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use action::{Action, Mark};
pub use parse::{extract_answer, parse_action, parse_action_text, parse_for_state, ParseFailure};

/// Seat index, `0` or `1`.
pub type PlayerId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameId {
    #[serde(rename = "tictactoe")]
    TicTacToe,
    #[serde(rename = "connect4")]
    ConnectFour,
    Kuhn,
    Leduc,
    MiniHanabi,
    SimpleHanabi,
}

impl GameId {
    pub const ALL: [GameId; 6] =
        [GameId::TicTacToe, GameId::ConnectFour, GameId::Kuhn, GameId::Leduc, GameId::MiniHanabi, GameId::SimpleHanabi];

    pub fn name(self) -> &'static str {
        match self {
            GameId::TicTacToe => "tictactoe",
            GameId::ConnectFour => "connect4",
            GameId::Kuhn => "kuhn",
            GameId::Leduc => "leduc",
            GameId::MiniHanabi => "mini_hanabi",
            GameId::SimpleHanabi => "simple_hanabi",
        }
    }

    /// Perfect-information board games (MCTS applies).
    pub fn is_perfect_information(self) -> bool {
        matches!(self, GameId::TicTacToe | GameId::ConnectFour)
    }

    pub fn is_cooperative(self) -> bool {
        matches!(self, GameId::MiniHanabi | GameId::SimpleHanabi)
    }

    /// Largest absolute episode return a player can obtain, in game units.
    pub fn max_abs_return(self) -> f64 {
        match self {
            GameId::TicTacToe | GameId::ConnectFour => 1.0,
            GameId::Kuhn => 2.0,
            // ante 1 + two raises of 2 + two raises of 4
            GameId::Leduc => 13.0,
            GameId::MiniHanabi => 4.0,
            GameId::SimpleHanabi => 6.0,
        }
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GameId::ALL.into_iter().find(|g| g.name() == s).ok_or_else(|| Error::config(format!("unknown game `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalReason {
    Win,
    Draw,
    Fold,
    LivesExhausted,
    DeckEmpty,
    FormatViolation,
}

/// Result of one engine transition.
#[derive(Clone, Debug, PartialEq, Default)]
pub(crate) struct Step {
    pub rewards: [f64; 2],
    pub terminal: Option<TerminalReason>,
}

impl Step {
    pub(crate) fn reward(rewards: [f64; 2]) -> Self {
        Step { rewards, terminal: None }
    }

    pub(crate) fn end(rewards: [f64; 2], reason: TerminalReason) -> Self {
        Step { rewards, terminal: Some(reason) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TurnOutcome {
    pub state: GameState,
    /// Immediate per-player rewards in game units.
    pub rewards: [f64; 2],
    pub terminal: bool,
    pub reason: Option<TerminalReason>,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Payload {
    TicTacToe(tictactoe::TicTacToe),
    ConnectFour(connect4::ConnectFour),
    Kuhn(kuhn::Kuhn),
    Leduc(leduc::Leduc),
    Hanabi(hanabi::Hanabi),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameState {
    game: GameId,
    seed: u64,
    current: PlayerId,
    turns_taken: u32,
    terminal: Option<TerminalReason>,
    returns: [f64; 2],
    payload: Payload,
}

impl GameState {
    /// Creates the opening state, dealing all cards from `seed`.
    pub fn new(game: GameId, seed: u64) -> Self {
        let payload = match game {
            GameId::TicTacToe => Payload::TicTacToe(tictactoe::TicTacToe::default()),
            GameId::ConnectFour => Payload::ConnectFour(connect4::ConnectFour::default()),
            GameId::Kuhn => Payload::Kuhn(kuhn::Kuhn::deal(seed)),
            GameId::Leduc => Payload::Leduc(leduc::Leduc::deal(seed)),
            GameId::MiniHanabi => Payload::Hanabi(hanabi::Hanabi::deal(hanabi::Variant::Mini, seed)),
            GameId::SimpleHanabi => Payload::Hanabi(hanabi::Hanabi::deal(hanabi::Variant::Simple, seed)),
        };
        Self::from_payload(game, seed, payload)
    }

    pub(crate) fn from_payload(game: GameId, seed: u64, payload: Payload) -> Self {
        GameState { game, seed, current: 0, turns_taken: 0, terminal: None, returns: [0.0; 2], payload }
    }

    /// Kuhn opening with an explicit deal: `[player_0, player_1, unseen]`.
    pub fn kuhn_with_deal(cards: [kuhn::Card; 3]) -> Self {
        Self::from_payload(GameId::Kuhn, 0, Payload::Kuhn(kuhn::Kuhn::from_deal(cards)))
    }

    /// Leduc opening with explicit private cards and the (hidden) public card.
    pub fn leduc_with_deal(p0: leduc::Rank, p1: leduc::Rank, public: leduc::Rank) -> Self {
        Self::from_payload(GameId::Leduc, 0, Payload::Leduc(leduc::Leduc::from_deal(p0, p1, public)))
    }

    /// Hanabi opening from an explicit deck order (player 0's hand first, then
    /// player 1's, then the draw pile).
    pub fn hanabi_with_deck(variant: hanabi::Variant, deck: Vec<hanabi::Card>) -> Self {
        let game = variant.game_id();
        Self::from_payload(game, 0, Payload::Hanabi(hanabi::Hanabi::from_deck(variant, deck)))
    }

    pub fn game(&self) -> GameId {
        self.game
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn current_player(&self) -> PlayerId {
        self.current
    }

    /// Number of turns already played; the next turn is `turns_taken() + 1`.
    pub fn turns_taken(&self) -> u32 {
        self.turns_taken
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal.is_some()
    }

    pub fn terminal_reason(&self) -> Option<TerminalReason> {
        self.terminal
    }

    /// Cumulative game-unit rewards of both players so far.
    pub fn returns(&self) -> [f64; 2] {
        self.returns
    }

    pub fn kuhn(&self) -> Option<&kuhn::Kuhn> {
        match &self.payload {
            Payload::Kuhn(k) => Some(k),
            _ => None,
        }
    }

    pub fn leduc(&self) -> Option<&leduc::Leduc> {
        match &self.payload {
            Payload::Leduc(l) => Some(l),
            _ => None,
        }
    }

    pub fn hanabi(&self) -> Option<&hanabi::Hanabi> {
        match &self.payload {
            Payload::Hanabi(h) => Some(h),
            _ => None,
        }
    }

    pub fn tictactoe(&self) -> Option<&tictactoe::TicTacToe> {
        match &self.payload {
            Payload::TicTacToe(t) => Some(t),
            _ => None,
        }
    }

    pub fn connect4(&self) -> Option<&connect4::ConnectFour> {
        match &self.payload {
            Payload::ConnectFour(c) => Some(c),
            _ => None,
        }
    }

    /// Legal actions in canonical order. Empty exactly when the state is terminal.
    pub fn legal_actions(&self) -> Vec<Action> {
        if self.is_terminal() {
            return Vec::new();
        }
        let p = self.current;
        match &self.payload {
            Payload::TicTacToe(t) => t.legal_actions(p),
            Payload::ConnectFour(c) => c.legal_actions(p),
            Payload::Kuhn(k) => k.legal_actions(),
            Payload::Leduc(l) => l.legal_actions(p),
            Payload::Hanabi(h) => h.legal_actions(p),
        }
    }

    pub fn is_legal(&self, action: &Action) -> bool {
        self.legal_actions().contains(action)
    }

    /// Applies `action` for the player to move.
    ///
    /// Terminal states and illegal actions are contract violations.
    pub fn apply_action(&self, action: &Action) -> Result<TurnOutcome> {
        if self.is_terminal() {
            return Err(Error::TerminalState(self.game));
        }
        if !self.is_legal(action) {
            return Err(Error::IllegalAction { game: self.game, action: action.to_string() });
        }
        let mut next = self.clone();
        let p = self.current;
        let (step, next_player) = match &mut next.payload {
            Payload::TicTacToe(t) => (t.apply(p, action), 1 - p),
            Payload::ConnectFour(c) => (c.apply(p, action), 1 - p),
            Payload::Kuhn(k) => (k.apply(action), 1 - p),
            Payload::Leduc(l) => {
                let step = l.apply(p, action);
                (step, l.to_act())
            }
            Payload::Hanabi(h) => (h.apply(p, action), 1 - p),
        };
        next.turns_taken += 1;
        next.current = next_player;
        next.terminal = step.terminal;
        next.returns[0] += step.rewards[0];
        next.returns[1] += step.rewards[1];
        Ok(TurnOutcome { terminal: step.terminal.is_some(), reason: step.terminal, rewards: step.rewards, state: next })
    }

    /// The `GAME STATE` block shown to `player`. Never contains the player's
    /// own hidden cards.
    pub fn observe(&self, player: PlayerId) -> String {
        match &self.payload {
            Payload::TicTacToe(t) => t.render(),
            Payload::ConnectFour(c) => c.render(),
            Payload::Kuhn(k) => k.observe(player),
            Payload::Leduc(l) => l.observe(player),
            Payload::Hanabi(h) => h.observe(player),
        }
    }

    /// The full system + user prompt for the player to move.
    pub fn prompt(&self) -> String {
        prompt::render(self)
    }
}

pub fn init_game(game: GameId, seed: u64) -> GameState {
    GameState::new(game, seed)
}
