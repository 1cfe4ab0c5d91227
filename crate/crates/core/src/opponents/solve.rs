//! Exact values, best responses and vanilla CFR on explicit poker trees.
//!
//! Strategies are per-infoset probability vectors aligned with
//! [`GameTree::infosets`].

use super::behavior::StrategyProfile;
use super::tree::{GameTree, Node};
use crate::error::Result;
use crate::games::{GameId, PlayerId};

/// Expected returns of both seats when everyone follows `strategy`.
pub fn expected_values(tree: &GameTree, strategy: &[Vec<f64>]) -> [f64; 2] {
    fn walk(tree: &GameTree, s: &[Vec<f64>], node: usize) -> [f64; 2] {
        match &tree.nodes[node] {
            Node::Terminal { payoff } => *payoff,
            Node::Chance { outcomes } => outcomes.iter().fold([0.0; 2], |acc, &(p, c)| {
                let v = walk(tree, s, c);
                [acc[0] + p * v[0], acc[1] + p * v[1]]
            }),
            Node::Decision { infoset, children, .. } => {
                children.iter().zip(&s[*infoset]).fold([0.0; 2], |acc, (&c, &p)| {
                    if p == 0.0 {
                        return acc;
                    }
                    let v = walk(tree, s, c);
                    [acc[0] + p * v[0], acc[1] + p * v[1]]
                })
            }
        }
    }
    walk(tree, strategy, tree.root)
}

struct BestResponse<'a> {
    tree: &'a GameTree,
    strategy: &'a [Vec<f64>],
    responder: PlayerId,
    /// Chance × opponent reach of each node.
    weight: Vec<f64>,
    members: Vec<Vec<usize>>,
    choice: Vec<Option<usize>>,
    value: Vec<Option<f64>>,
}

impl BestResponse<'_> {
    fn reach(&mut self, node: usize, w: f64) {
        self.weight[node] = w;
        match &self.tree.nodes[node] {
            Node::Terminal { .. } => {}
            Node::Chance { outcomes } => {
                for &(p, c) in outcomes {
                    self.reach(c, w * p);
                }
            }
            Node::Decision { player, infoset, children } => {
                if *player == self.responder {
                    self.members[*infoset].push(node);
                }
                for (a, &c) in children.iter().enumerate() {
                    let p = if *player == self.responder { 1.0 } else { self.strategy[*infoset][a] };
                    self.reach(c, w * p);
                }
            }
        }
    }

    fn best(&mut self, infoset: usize) -> usize {
        if let Some(a) = self.choice[infoset] {
            return a;
        }
        let nodes = self.members[infoset].clone();
        let n_actions = self.tree.infosets[infoset].actions.len();
        let mut best = (0, f64::NEG_INFINITY);
        for a in 0..n_actions {
            let mut total = 0.0;
            for &h in &nodes {
                let Node::Decision { children, .. } = &self.tree.nodes[h] else { unreachable!() };
                total += self.weight[h] * self.eval(children[a]);
            }
            if total > best.1 {
                best = (a, total);
            }
        }
        self.choice[infoset] = Some(best.0);
        best.0
    }

    fn eval(&mut self, node: usize) -> f64 {
        if let Some(v) = self.value[node] {
            return v;
        }
        let v = match &self.tree.nodes[node] {
            Node::Terminal { payoff } => payoff[self.responder],
            Node::Chance { outcomes } => {
                let outcomes = outcomes.clone();
                outcomes.iter().map(|&(p, c)| p * self.eval(c)).sum()
            }
            Node::Decision { player, infoset, children } => {
                let (player, infoset, children) = (*player, *infoset, children.clone());
                if player == self.responder {
                    let a = self.best(infoset);
                    self.eval(children[a])
                } else {
                    let probs = self.strategy[infoset].clone();
                    children.iter().zip(probs).filter(|(_, p)| *p > 0.0).map(|(&c, p)| p * self.eval(c)).sum()
                }
            }
        };
        self.value[node] = Some(v);
        v
    }
}

/// Value `responder` obtains by best-responding to the other seat's part of
/// `strategy`, plus the chosen action per infoset (`None` for the other seat).
pub fn best_response(tree: &GameTree, strategy: &[Vec<f64>], responder: PlayerId) -> (f64, Vec<Option<usize>>) {
    let mut br = BestResponse {
        tree,
        strategy,
        responder,
        weight: vec![0.0; tree.nodes.len()],
        members: vec![Vec::new(); tree.infosets.len()],
        choice: vec![None; tree.infosets.len()],
        value: vec![None; tree.nodes.len()],
    };
    br.reach(tree.root, 1.0);
    let v = br.eval(tree.root);
    for i in 0..tree.infosets.len() {
        if tree.infosets[i].player == responder {
            br.best(i);
        }
    }
    (v, br.choice)
}

/// Mean gain of the two best responses; zero exactly at an equilibrium.
pub fn exploitability(tree: &GameTree, strategy: &[Vec<f64>]) -> f64 {
    let (v0, _) = best_response(tree, strategy, 0);
    let (v1, _) = best_response(tree, strategy, 1);
    (v0 + v1) / 2.0
}

/// Exploitability of a text-keyed profile.
pub fn profile_exploitability(profile: &StrategyProfile) -> Result<f64> {
    let tree = GameTree::build(profile.game)?;
    Ok(exploitability(&tree, &profile.tabulate(&tree)))
}

/// Regret and average-strategy accumulators of vanilla CFR.
#[derive(Clone, Debug, PartialEq)]
pub struct CfrState {
    pub regrets: Vec<Vec<f64>>,
    pub strategy_sum: Vec<Vec<f64>>,
    pub iterations: u64,
}

fn normalize_or_uniform(v: impl Iterator<Item = f64>, n: usize) -> Vec<f64> {
    let v: Vec<f64> = v.collect();
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.into_iter().map(|x| x / total).collect()
    } else {
        vec![1.0 / n as f64; n]
    }
}

impl CfrState {
    pub fn new(tree: &GameTree) -> Self {
        let zeros: Vec<Vec<f64>> = tree.infosets.iter().map(|i| vec![0.0; i.actions.len()]).collect();
        CfrState { regrets: zeros.clone(), strategy_sum: zeros, iterations: 0 }
    }

    /// Regret matching: proportional to positive regret, uniform if none.
    pub fn current_strategy(&self) -> Vec<Vec<f64>> {
        self.regrets.iter().map(|r| normalize_or_uniform(r.iter().map(|&x| x.max(0.0)), r.len())).collect()
    }

    pub fn average_strategy(&self) -> Vec<Vec<f64>> {
        self.strategy_sum.iter().map(|s| normalize_or_uniform(s.iter().copied(), s.len())).collect()
    }

    /// One simultaneous-update iteration over the whole tree.
    pub fn iterate(&mut self, tree: &GameTree) {
        let sigma = self.current_strategy();
        self.traverse(tree, &sigma, tree.root, [1.0, 1.0], 1.0);
        self.iterations += 1;
    }

    pub fn run(&mut self, tree: &GameTree, iterations: u64) {
        for _ in 0..iterations {
            self.iterate(tree);
        }
    }

    /// Returns the value to seat 0 (the trees are zero-sum).
    fn traverse(&mut self, tree: &GameTree, sigma: &[Vec<f64>], node: usize, reach: [f64; 2], chance: f64) -> f64 {
        match &tree.nodes[node] {
            Node::Terminal { payoff } => payoff[0],
            Node::Chance { outcomes } => {
                outcomes.iter().map(|&(p, c)| p * self.traverse(tree, sigma, c, reach, chance * p)).sum()
            }
            Node::Decision { player, infoset, children } => {
                let (p, i) = (*player, *infoset);
                let s = &sigma[i];
                let mut child_values = [0.0f64; 8];
                let mut value = 0.0;
                for (a, &c) in children.iter().enumerate() {
                    let mut r = reach;
                    r[p] *= s[a];
                    let v = self.traverse(tree, sigma, c, r, chance);
                    child_values[a] = v;
                    value += s[a] * v;
                }
                let sign = if p == 0 { 1.0 } else { -1.0 };
                let cf = reach[1 - p] * chance;
                for a in 0..children.len() {
                    self.regrets[i][a] += cf * sign * (child_values[a] - value);
                    self.strategy_sum[i][a] += reach[p] * s[a];
                }
                value
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct CfrResult {
    pub profile: StrategyProfile,
    pub average: Vec<Vec<f64>>,
    /// `(iterations, exploitability)` of the average strategy.
    pub trace: Vec<(u64, f64)>,
}

/// Runs vanilla CFR, measuring exploitability every `trace_every`
/// iterations (and at the end).
pub fn cfr_solve(game: GameId, iterations: u64, trace_every: u64) -> Result<CfrResult> {
    let tree = GameTree::build(game)?;
    let mut state = CfrState::new(&tree);
    let mut trace = Vec::new();
    while state.iterations < iterations {
        let chunk = if trace_every == 0 { iterations } else { trace_every.min(iterations - state.iterations) };
        state.run(&tree, chunk);
        trace.push((state.iterations, exploitability(&tree, &state.average_strategy())));
    }
    let average = state.average_strategy();
    Ok(CfrResult { profile: StrategyProfile::from_tree(&tree, &average), average, trace })
}
