//! Explicit extensive-form trees for the two poker games.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::games::kuhn::Card;
use crate::games::leduc::Rank;
use crate::games::{Action, GameId, GameState, PlayerId};

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Chance { outcomes: Vec<(f64, usize)> },
    Decision { player: PlayerId, infoset: usize, children: Vec<usize> },
    Terminal { payoff: [f64; 2] },
}

/// An information set: the observation text its owner sees plus the legal
/// actions there, in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct Infoset {
    pub key: String,
    pub player: PlayerId,
    pub actions: Vec<Action>,
}

#[derive(Clone, Debug)]
pub struct GameTree {
    pub game: GameId,
    pub nodes: Vec<Node>,
    pub infosets: Vec<Infoset>,
    pub root: usize,
    index: HashMap<String, usize>,
}

impl GameTree {
    /// Builds the full tree of Kuhn or Leduc, chance deals at the root.
    pub fn build(game: GameId) -> Result<Self> {
        let deals: Vec<(f64, GameState)> = match game {
            GameId::Kuhn => kuhn_deals(),
            GameId::Leduc => leduc_deals(),
            other => return Err(Error::Unsupported(format!("no explicit tree for {other}"))),
        };
        let mut tree = GameTree { game, nodes: Vec::new(), infosets: Vec::new(), root: 0, index: HashMap::new() };
        tree.nodes.push(Node::Chance { outcomes: Vec::new() });
        let mut outcomes = Vec::with_capacity(deals.len());
        for (p, state) in deals {
            outcomes.push((p, tree.expand(&state)));
        }
        tree.nodes[0] = Node::Chance { outcomes };
        Ok(tree)
    }

    fn expand(&mut self, state: &GameState) -> usize {
        if state.is_terminal() {
            self.nodes.push(Node::Terminal { payoff: state.returns() });
            return self.nodes.len() - 1;
        }
        let player = state.current_player();
        let actions = state.legal_actions();
        let key = state.observe(player);
        let infoset = match self.index.get(&key) {
            Some(&i) => {
                debug_assert_eq!(self.infosets[i].actions, actions);
                i
            }
            None => {
                self.infosets.push(Infoset { key: key.clone(), player, actions: actions.clone() });
                self.index.insert(key, self.infosets.len() - 1);
                self.infosets.len() - 1
            }
        };
        let id = self.nodes.len();
        self.nodes.push(Node::Decision { player, infoset, children: Vec::new() });
        let children =
            actions.iter().map(|a| self.expand(&state.apply_action(a).expect("legal by construction").state)).collect();
        self.nodes[id] = Node::Decision { player, infoset, children };
        id
    }

    pub fn infoset_index(&self, key: &str) -> Option<usize> {
        self.index.get(key).copied()
    }
}

fn kuhn_deals() -> Vec<(f64, GameState)> {
    let mut out = Vec::new();
    for a in Card::ALL {
        for b in Card::ALL {
            if a == b {
                continue;
            }
            let c = Card::ALL.into_iter().find(|&c| c != a && c != b).expect("three cards");
            out.push((1.0 / 6.0, GameState::kuhn_with_deal([a, b, c])));
        }
    }
    out
}

/// Rank-level deals from a deck of two cards per rank.
fn leduc_deals() -> Vec<(f64, GameState)> {
    let mut out = Vec::new();
    for p0 in Rank::ALL {
        for p1 in Rank::ALL {
            for public in Rank::ALL {
                let mut left = [2.0f64; 3];
                let mut prob = 1.0;
                let mut total = 6.0;
                for r in [p0, p1, public] {
                    prob *= left[r as usize] / total;
                    left[r as usize] -= 1.0;
                    total -= 1.0;
                }
                if prob > 0.0 {
                    out.push((prob, GameState::leduc_with_deal(p0, p1, public)));
                }
            }
        }
    }
    out
}
