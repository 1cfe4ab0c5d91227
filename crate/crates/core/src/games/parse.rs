use std::fmt;
use std::sync::LazyLock;

use regex::Regex;

use super::hanabi::{Color, Variant, RANKS};
use super::{Action, GameId, GameState, Mark};

/// Why a raw emission could not be turned into a legal action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseFailure {
    NoAnswerTag,
    Malformed(String),
    Illegal(Action),
}

impl fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseFailure::NoAnswerTag => f.write_str("no <answer> tag"),
            ParseFailure::Malformed(s) => write!(f, "malformed action `{s}`"),
            ParseFailure::Illegal(a) => write!(f, "illegal action {a}"),
        }
    }
}

/// Contents of the last complete `<answer>...</answer>` span.
pub fn extract_answer(raw: &str) -> Option<&str> {
    const OPEN: &str = "<answer>";
    const CLOSE: &str = "</answer>";
    let mut search_end = raw.len();
    while let Some(start) = raw[..search_end].rfind(OPEN) {
        let body = &raw[start + OPEN.len()..];
        if let Some(end) = body.find(CLOSE) {
            return Some(&body[..end]);
        }
        search_end = start;
    }
    None
}

static PLACE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^<([XO])\((\d+),(\d+)\)>$").unwrap());
static DROP: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^<([XO])\((\d+)\)>$").unwrap());
static PLAY: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^<(Play|Discard) (?i:card) (\d+)>$").unwrap());
static REVEAL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^<Reveal player \+1 (color|rank) ([A-Z0-9])>$").unwrap());

fn mark(s: &str) -> Mark {
    if s == "X" {
        Mark::X
    } else {
        Mark::O
    }
}

fn small(s: &str, bound: usize) -> Option<u8> {
    s.parse::<usize>().ok().filter(|&v| v < bound).map(|v| v as u8)
}

/// Matches the action grammar of `game` against `text` (without answer tags).
pub fn parse_action_text(game: GameId, text: &str) -> Result<Action, ParseFailure> {
    let text = text.trim();
    let malformed = || ParseFailure::Malformed(text.to_string());
    match game {
        GameId::TicTacToe => {
            let c = PLACE.captures(text).ok_or_else(malformed)?;
            Ok(Action::Place {
                mark: mark(&c[1]),
                row: small(&c[2], 3).ok_or_else(malformed)?,
                col: small(&c[3], 3).ok_or_else(malformed)?,
            })
        }
        GameId::ConnectFour => {
            let c = DROP.captures(text).ok_or_else(malformed)?;
            Ok(Action::Drop { mark: mark(&c[1]), col: small(&c[2], 7).ok_or_else(malformed)? })
        }
        GameId::Kuhn => match text {
            "<PASS>" => Ok(Action::Pass),
            "<BET>" => Ok(Action::Bet),
            _ => Err(malformed()),
        },
        GameId::Leduc => match text {
            "<FOLD>" => Ok(Action::Fold),
            "<CALL>" => Ok(Action::Call),
            "<RAISE>" => Ok(Action::Raise),
            _ => Err(malformed()),
        },
        GameId::MiniHanabi | GameId::SimpleHanabi => {
            let variant = if game == GameId::MiniHanabi { Variant::Mini } else { Variant::Simple };
            if let Some(c) = PLAY.captures(text) {
                let i = small(&c[2], variant.hand_size()).ok_or_else(malformed)?;
                return Ok(if &c[1] == "Play" { Action::Play(i) } else { Action::Discard(i) });
            }
            let c = REVEAL.captures(text).ok_or_else(malformed)?;
            if &c[1] == "color" {
                variant
                    .colors()
                    .iter()
                    .find(|col| col.letter().to_string() == c[2])
                    .map(|&col: &Color| Action::RevealColor(col))
                    .ok_or_else(malformed)
            } else {
                let r = c[2].parse::<u8>().ok().filter(|r| (1..=RANKS).contains(r));
                r.map(Action::RevealRank).ok_or_else(malformed)
            }
        }
    }
}

/// Extracts the last answer span and parses it with the grammar of `game`.
pub fn parse_action(game: GameId, raw: &str) -> Result<Action, ParseFailure> {
    let body = extract_answer(raw).ok_or(ParseFailure::NoAnswerTag)?;
    parse_action_text(game, body)
}

/// [`parse_action`] plus a legality check against `state`.
pub fn parse_for_state(state: &GameState, raw: &str) -> Result<Action, ParseFailure> {
    let action = parse_action(state.game(), raw)?;
    if state.is_legal(&action) {
        Ok(action)
    } else {
        Err(ParseFailure::Illegal(action))
    }
}
