//! Two-player Hanabi with two ranks per color.
//!
//! Each color holds three rank-1 cards and one rank-2 card. When the draw pile
//! runs out, each player takes exactly one more turn before the game ends.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::chance::{event_rng, DEAL};
use super::{Action, GameId, PlayerId, Step, TerminalReason};

pub const RANKS: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    R,
    Y,
    G,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::R, Color::Y, Color::G];

    pub fn letter(self) -> char {
        match self {
            Color::R => 'R',
            Color::Y => 'Y',
            Color::G => 'G',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::R => "Red",
            Color::Y => "Yellow",
            Color::G => "Green",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn bit(self) -> u8 {
        1 << self.index()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Mini,
    Simple,
}

impl Variant {
    pub fn game_id(self) -> GameId {
        match self {
            Variant::Mini => GameId::MiniHanabi,
            Variant::Simple => GameId::SimpleHanabi,
        }
    }

    pub fn num_colors(self) -> usize {
        match self {
            Variant::Mini => 2,
            Variant::Simple => 3,
        }
    }

    pub fn colors(self) -> &'static [Color] {
        &Color::ALL[..self.num_colors()]
    }

    pub fn hand_size(self) -> usize {
        match self {
            Variant::Mini => 3,
            Variant::Simple => 5,
        }
    }

    pub fn max_info_tokens(self) -> u8 {
        match self {
            Variant::Mini => 3,
            Variant::Simple => 8,
        }
    }

    pub fn max_life_tokens(self) -> u8 {
        3
    }

    pub fn max_score(self) -> u32 {
        self.num_colors() as u32 * RANKS as u32
    }

    /// The full deck in a fixed reference order.
    pub fn deck(self) -> Vec<Card> {
        self.colors().iter().flat_map(|&color| [1, 1, 1, 2].into_iter().map(move |rank| Card { color, rank })).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Card {
    pub color: Color,
    pub rank: u8,
}

impl Card {
    pub fn new(color: Color, rank: u8) -> Self {
        Card { color, rank }
    }
}

impl std::fmt::Display for Card {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.color.letter(), self.rank)
    }
}

/// A card in hand plus what its holder has been told about it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HandCard {
    pub card: Card,
    possible_colors: u8,
    possible_ranks: u8,
}

impl HandCard {
    fn unknown(card: Card, variant: Variant) -> Self {
        HandCard { card, possible_colors: (1u8 << variant.num_colors()) - 1, possible_ranks: (1u8 << RANKS) - 1 }
    }

    fn knowledge(&self, variant: Variant) -> String {
        let colors: Vec<String> = variant
            .colors()
            .iter()
            .filter(|c| self.possible_colors & c.bit() != 0)
            .map(|c| c.letter().to_string())
            .collect();
        let ranks: Vec<String> =
            (1..=RANKS).filter(|r| self.possible_ranks & (1 << (r - 1)) != 0).map(|r| r.to_string()).collect();
        format!("one of the colors [{}] and one of the ranks [{}]", colors.join(", "), ranks.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hanabi {
    variant: Variant,
    hands: [Vec<HandCard>; 2],
    pile: Vec<Card>,
    drawn: usize,
    stacks: Vec<u8>,
    discards: Vec<Card>,
    info: u8,
    lives: u8,
    score: u32,
    /// Turns left once the draw pile is empty.
    final_turns: Option<u8>,
}

impl Hanabi {
    pub(crate) fn deal(variant: Variant, seed: u64) -> Self {
        let mut deck = variant.deck();
        deck.shuffle(&mut event_rng(seed, DEAL));
        Self::from_deck(variant, deck)
    }

    pub(crate) fn from_deck(variant: Variant, deck: Vec<Card>) -> Self {
        let h = variant.hand_size();
        assert!(deck.len() >= 2 * h, "deck too small to deal two hands");
        let hand = |range: std::ops::Range<usize>| deck[range].iter().map(|&c| HandCard::unknown(c, variant)).collect();
        Hanabi {
            variant,
            hands: [hand(0..h), hand(h..2 * h)],
            pile: deck[2 * h..].to_vec(),
            drawn: 0,
            stacks: vec![0; variant.num_colors()],
            discards: Vec::new(),
            info: variant.max_info_tokens(),
            lives: variant.max_life_tokens(),
            score: 0,
            final_turns: None,
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn hand(&self, player: PlayerId) -> &[HandCard] {
        &self.hands[player]
    }

    pub fn stacks(&self) -> &[u8] {
        &self.stacks
    }

    pub fn deck_remaining(&self) -> usize {
        self.pile.len() - self.drawn
    }

    pub fn info_tokens(&self) -> u8 {
        self.info
    }

    pub fn life_tokens(&self) -> u8 {
        self.lives
    }

    pub fn score(&self) -> u32 {
        self.score
    }

    pub fn discards(&self) -> &[Card] {
        &self.discards
    }

    /// Whether `card` can be played onto its stack right now.
    pub fn is_playable(&self, card: Card) -> bool {
        self.stacks[card.color.index()] + 1 == card.rank
    }

    pub(crate) fn legal_actions(&self, player: PlayerId) -> Vec<Action> {
        let n = self.hands[player].len() as u8;
        let mut out: Vec<Action> = (0..n).map(Action::Play).collect();
        if self.info < self.variant.max_info_tokens() {
            out.extend((0..n).map(Action::Discard));
        }
        if self.info > 0 {
            let partner = &self.hands[1 - player];
            for &c in self.variant.colors() {
                if partner.iter().any(|h| h.card.color == c) {
                    out.push(Action::RevealColor(c));
                }
            }
            for r in 1..=RANKS {
                if partner.iter().any(|h| h.card.rank == r) {
                    out.push(Action::RevealRank(r));
                }
            }
        }
        out
    }

    fn draw(&mut self, player: PlayerId) {
        if self.drawn < self.pile.len() {
            let card = self.pile[self.drawn];
            self.drawn += 1;
            self.hands[player].push(HandCard::unknown(card, self.variant));
        }
    }

    pub(crate) fn apply(&mut self, player: PlayerId, action: &Action) -> Step {
        if self.deck_remaining() == 0 {
            self.final_turns = Some(self.final_turns.unwrap_or(2) - 1);
        }
        let mut rewards = [0.0; 2];
        match *action {
            Action::Play(i) => {
                let card = self.hands[player].remove(i as usize).card;
                if self.is_playable(card) {
                    self.stacks[card.color.index()] += 1;
                    self.score += 1;
                    rewards = [1.0; 2];
                } else {
                    self.lives -= 1;
                    self.discards.push(card);
                }
                self.draw(player);
            }
            Action::Discard(i) => {
                let card = self.hands[player].remove(i as usize).card;
                self.discards.push(card);
                self.info = (self.info + 1).min(self.variant.max_info_tokens());
                self.draw(player);
            }
            Action::RevealColor(c) => {
                self.info -= 1;
                for h in &mut self.hands[1 - player] {
                    if h.card.color == c {
                        h.possible_colors = c.bit();
                    } else {
                        h.possible_colors &= !c.bit();
                    }
                }
            }
            Action::RevealRank(r) => {
                self.info -= 1;
                let bit = 1 << (r - 1);
                for h in &mut self.hands[1 - player] {
                    if h.card.rank == r {
                        h.possible_ranks = bit;
                    } else {
                        h.possible_ranks &= !bit;
                    }
                }
            }
            _ => unreachable!("legality checked by caller"),
        }

        if self.lives == 0 {
            let lost = self.score as f64;
            self.score = 0;
            return Step::end([rewards[0] - lost, rewards[1] - lost], TerminalReason::LivesExhausted);
        }
        if self.score == self.variant.max_score() {
            return Step::end(rewards, TerminalReason::Win);
        }
        if self.final_turns == Some(0) {
            return Step::end(rewards, TerminalReason::DeckEmpty);
        }
        Step::reward(rewards)
    }

    pub(crate) fn observe(&self, player: PlayerId) -> String {
        let stacks: Vec<String> =
            self.variant.colors().iter().map(|c| format!("{}{}", c.letter(), self.stacks[c.index()])).collect();
        let discards = if self.discards.is_empty() {
            "None".to_string()
        } else {
            self.discards.iter().map(Card::to_string).collect::<Vec<_>>().join(", ")
        };
        let mut lines = vec![
            format!("1. There are {} life tokens and {} information tokens remaining.", self.lives, self.info),
            format!("2. The top of the color stacks are: {}.", stacks.join(" ")),
            format!("3. {} cards remain in the draw pile.", self.deck_remaining()),
            format!("4. The discard pile currently contains: {discards}."),
            "5. The other player's hand:".to_string(),
        ];
        for (i, h) in self.hands[1 - player].iter().enumerate() {
            lines.push(format!(
                "    - Card {i} ({}): the other player believes it is {}.",
                h.card,
                h.knowledge(self.variant)
            ));
        }
        lines.push("6. Your own hand, based on the revealed information:".to_string());
        for (i, h) in self.hands[player].iter().enumerate() {
            lines.push(format!("    - Card {i}: {}.", h.knowledge(self.variant)));
        }
        lines.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use crate::games::GameState;

    use super::*;

    fn c(color: Color, rank: u8) -> Card {
        Card::new(color, rank)
    }

    /// Player 1 holds Y1 R1 R1 as in the reference opening.
    fn reference_deck() -> Vec<Card> {
        use Color::{R, Y};
        vec![c(R, 1), c(Y, 2), c(Y, 1), c(Y, 1), c(R, 1), c(R, 1), c(R, 2), c(Y, 1)]
    }

    #[test]
    fn mini_deck_composition() {
        let mut deck = Variant::Mini.deck();
        assert_eq!(deck.len(), 8);
        deck.sort_by_key(|c| (c.color, c.rank));
        let counts = |col, rank| deck.iter().filter(|c| c.color == col && c.rank == rank).count();
        assert_eq!(counts(Color::R, 1), 3);
        assert_eq!(counts(Color::R, 2), 1);
        assert_eq!(counts(Color::Y, 1), 3);
        assert_eq!(counts(Color::Y, 2), 1);
        assert_eq!(Variant::Mini.max_score(), 4);
        assert_eq!(Variant::Simple.deck().len(), 12);
        assert_eq!(Variant::Simple.max_score(), 6);
    }

    #[test]
    fn opening_deal() {
        let s = GameState::new(GameId::MiniHanabi, 17);
        let h = s.hanabi().unwrap();
        assert_eq!(h.hand(0).len(), 3);
        assert_eq!(h.hand(1).len(), 3);
        assert_eq!(h.deck_remaining(), 2);
        assert_eq!((h.info_tokens(), h.life_tokens()), (3, 3));
    }

    #[test]
    fn reference_opening_legal_actions() {
        let s = GameState::hanabi_with_deck(Variant::Mini, reference_deck());
        let legal: Vec<String> = s.legal_actions().iter().map(ToString::to_string).collect();
        assert_eq!(
            legal,
            [
                "<Play card 0>",
                "<Play card 1>",
                "<Play card 2>",
                "<Reveal player +1 color R>",
                "<Reveal player +1 color Y>",
                "<Reveal player +1 rank 1>",
            ]
        );
    }

    #[test]
    fn successful_play_rewards_both() {
        let s = GameState::hanabi_with_deck(Variant::Mini, reference_deck());
        let out = s.apply_action(&Action::Play(0)).unwrap();
        assert_eq!(out.rewards, [1.0, 1.0]);
        let h = out.state.hanabi().unwrap();
        assert_eq!(h.stacks(), &[1, 0]);
        assert_eq!(h.deck_remaining(), 1);
        // the drawn card goes to the end of the hand
        assert_eq!(h.hand(0)[2].card, c(Color::R, 2));
    }

    #[test]
    fn reveal_sets_positive_and_negative_knowledge() {
        let s = GameState::hanabi_with_deck(Variant::Mini, reference_deck());
        let s = s.apply_action(&Action::RevealColor(Color::R)).unwrap().state;
        let obs = s.observe(1);
        assert!(obs.contains("1. There are 3 life tokens and 2 information tokens remaining."));
        assert!(obs.contains("    - Card 0: one of the colors [Y] and one of the ranks [1, 2]."));
        assert!(obs.contains("    - Card 1: one of the colors [R] and one of the ranks [1, 2]."));
        // discard is now legal for player 1
        assert!(s.legal_actions().contains(&Action::Discard(0)));
    }

    #[test]
    fn losing_all_lives_zeroes_score() {
        use Color::{R, Y};
        let deck = vec![c(R, 1), c(R, 1), c(Y, 1), c(Y, 2), c(R, 1), c(Y, 1), c(Y, 1), c(R, 2)];
        let mut s = GameState::hanabi_with_deck(Variant::Mini, deck);
        // R1 succeeds, then Y2, R1, R1 all miss
        for (expected_lives, reward) in [(3, 1.0), (2, 0.0), (1, 0.0)] {
            let out = s.apply_action(&Action::Play(0)).unwrap();
            assert_eq!(out.rewards, [reward; 2]);
            s = out.state;
            assert_eq!(s.hanabi().unwrap().life_tokens(), expected_lives);
        }
        assert_eq!(s.returns(), [1.0, 1.0]);
        let out = s.apply_action(&Action::Play(0)).unwrap();
        assert!(out.terminal);
        assert_eq!(out.reason, Some(TerminalReason::LivesExhausted));
        assert_eq!(out.rewards, [-1.0, -1.0]);
        assert_eq!(out.state.returns(), [0.0, 0.0]);
        assert_eq!(out.state.hanabi().unwrap().score(), 0);
    }

    #[test]
    fn one_final_turn_each_after_the_pile_empties() {
        let mut s = GameState::hanabi_with_deck(Variant::Mini, reference_deck());
        // two discards need a spent token first
        s = s.apply_action(&Action::RevealRank(1)).unwrap().state; // p0
        s = s.apply_action(&Action::Discard(0)).unwrap().state; // p1 draws, 1 left
        s = s.apply_action(&Action::RevealRank(1)).unwrap().state; // p0
        s = s.apply_action(&Action::Discard(0)).unwrap().state; // p1 draws, pile empty
        assert_eq!(s.hanabi().unwrap().deck_remaining(), 0);
        s = s.apply_action(&s.legal_actions()[0].clone()).unwrap().state; // p0 final turn
        assert!(!s.is_terminal());
        let out = s.apply_action(&Action::RevealRank(1)).unwrap(); // p1 final turn
        assert!(out.terminal);
        assert_eq!(out.reason, Some(TerminalReason::DeckEmpty));
    }
}
