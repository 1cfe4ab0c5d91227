//! UCT search with uniform random rollouts for the board games.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::games::{Action, GameState, PlayerId};
use crate::rollout::{Emission, Policy, TokenStep};

pub const DEFAULT_EXPLORATION: f64 = std::f64::consts::SQRT_2;

struct Node {
    state: GameState,
    /// Seat that moved into this node.
    mover: PlayerId,
    children: Vec<usize>,
    untried: Vec<Action>,
    action: Option<Action>,
    parent: Option<usize>,
    visits: u32,
    total: f64,
}

impl Node {
    fn new(state: GameState, mover: PlayerId, action: Option<Action>, parent: Option<usize>) -> Self {
        let mut untried = state.legal_actions();
        untried.reverse();
        Node { state, mover, children: Vec::new(), untried, action, parent, visits: 0, total: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub action: Action,
    /// Root children with their visit counts, in expansion order.
    pub visits: Vec<(Action, u32)>,
}

fn rollout(mut state: GameState, rng: &mut ChaCha8Rng) -> [f64; 2] {
    while !state.is_terminal() {
        let legal = state.legal_actions();
        let a = &legal[rng.gen_range(0..legal.len())];
        state = state.apply_action(a).expect("legal").state;
    }
    state.returns()
}

/// Runs `simulations` UCT iterations from `state` and returns the most
/// visited root action (ties go to the earliest expanded).
pub fn mcts_search(state: &GameState, simulations: u32, exploration: f64, seed: u64) -> Result<SearchResult> {
    if !state.game().is_perfect_information() {
        return Err(Error::Unsupported(format!("MCTS needs a perfect-information game, got {}", state.game())));
    }
    if state.is_terminal() {
        return Err(Error::TerminalState(state.game()));
    }
    let legal = state.legal_actions();
    if legal.len() == 1 {
        return Ok(SearchResult { action: legal[0].clone(), visits: Vec::new() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root_mover = 1 - state.current_player();
    let mut nodes = vec![Node::new(state.clone(), root_mover, None, None)];
    for _ in 0..simulations {
        // selection
        let mut id = 0;
        while nodes[id].untried.is_empty() && !nodes[id].children.is_empty() {
            let parent_visits = f64::from(nodes[id].visits);
            let log_n = parent_visits.ln();
            let mut best = (nodes[id].children[0], f64::NEG_INFINITY);
            for &c in &nodes[id].children {
                let n = f64::from(nodes[c].visits);
                let score = nodes[c].total / n + exploration * (log_n / n).sqrt();
                if score > best.1 {
                    best = (c, score);
                }
            }
            id = best.0;
        }
        // expansion
        if let Some(action) = nodes[id].untried.pop() {
            let mover = nodes[id].state.current_player();
            let next = nodes[id].state.apply_action(&action).expect("legal").state;
            nodes.push(Node::new(next, mover, Some(action), Some(id)));
            let child = nodes.len() - 1;
            nodes[id].children.push(child);
            id = child;
        }
        // simulation and backup
        let returns = rollout(nodes[id].state.clone(), &mut rng);
        let mut cur = Some(id);
        while let Some(n) = cur {
            nodes[n].visits += 1;
            nodes[n].total += returns[nodes[n].mover];
            cur = nodes[n].parent;
        }
    }
    let visits: Vec<(Action, u32)> = nodes[0]
        .children
        .iter()
        .map(|&c| (nodes[c].action.clone().expect("child has action"), nodes[c].visits))
        .collect();
    let mut best = 0;
    for (i, v) in visits.iter().enumerate() {
        if v.1 > visits[best].1 {
            best = i;
        }
    }
    let action = visits.get(best).map(|v| v.0.clone()).unwrap_or_else(|| legal[0].clone());
    Ok(SearchResult { action, visits })
}

pub fn mcts_act(state: &GameState, simulations: u32, exploration: f64, seed: u64) -> Result<Action> {
    Ok(mcts_search(state, simulations, exploration, seed)?.action)
}

/// MCTS as a playing policy; the search seed is drawn from the episode RNG.
#[derive(Clone, Copy, Debug)]
pub struct MctsPolicy {
    pub simulations: u32,
    pub exploration: f64,
}

impl MctsPolicy {
    pub fn new(simulations: u32) -> Self {
        MctsPolicy { simulations, exploration: DEFAULT_EXPLORATION }
    }
}

impl Policy for MctsPolicy {
    fn act(&self, state: &GameState, rng: &mut ChaCha8Rng) -> Emission {
        let seed = rng.gen();
        let action = mcts_act(state, self.simulations, self.exploration, seed)
            .expect("MCTS policy used on a board game")
            .to_string();
        let vocab: Vec<String> = state.legal_actions().iter().map(ToString::to_string).collect();
        let token = vocab.iter().position(|a| *a == action).expect("search returns a legal action");
        Emission::answer(&action, vec![TokenStep { key: 0, vocab, token, logprob: 0.0 }])
    }
}
