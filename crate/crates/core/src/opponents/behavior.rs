use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand_chacha::ChaCha8Rng;

use super::tree::GameTree;
use crate::error::{Error, Result};
use crate::games::{GameId, GameState, PlayerId};
use crate::optimize::{decision_key, sample_index, sampling_distribution, PolicyParameters, SamplingConfig};
use crate::rollout::{Emission, Policy, TokenStep};

/// Action probabilities per information-state key (the owner's observation).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BehaviorPolicy {
    pub table: BTreeMap<String, Vec<(String, f64)>>,
}

impl BehaviorPolicy {
    /// Probabilities aligned with `legal`; uniform for unknown states.
    pub fn distribution(&self, key: &str, legal: &[String]) -> Vec<f64> {
        match self.table.get(key) {
            Some(entries) => legal.iter().map(|a| entries.iter().find(|(b, _)| b == a).map_or(0.0, |e| e.1)).collect(),
            None => vec![1.0 / legal.len() as f64; legal.len()],
        }
    }
}

/// One behavior policy per seat.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyProfile {
    pub game: GameId,
    pub players: [BehaviorPolicy; 2],
}

impl StrategyProfile {
    pub fn new(game: GameId) -> Self {
        StrategyProfile { game, players: [BehaviorPolicy::default(), BehaviorPolicy::default()] }
    }

    /// Builds a profile from per-infoset probability vectors of `tree`.
    pub fn from_tree(tree: &GameTree, strategy: &[Vec<f64>]) -> Self {
        let mut profile = StrategyProfile::new(tree.game);
        for (info, probs) in tree.infosets.iter().zip(strategy) {
            let entries = info.actions.iter().map(ToString::to_string).zip(probs.iter().copied()).collect();
            profile.players[info.player].table.insert(info.key.clone(), entries);
        }
        profile
    }

    /// Per-infoset probability vectors aligned with `tree`.
    pub fn tabulate(&self, tree: &GameTree) -> Vec<Vec<f64>> {
        tree.infosets
            .iter()
            .map(|info| {
                let legal: Vec<String> = info.actions.iter().map(ToString::to_string).collect();
                self.players[info.player].distribution(&info.key, &legal)
            })
            .collect()
    }

    pub fn uniform(tree: &GameTree) -> Self {
        let strategy: Vec<Vec<f64>> =
            tree.infosets.iter().map(|i| vec![1.0 / i.actions.len() as f64; i.actions.len()]).collect();
        Self::from_tree(tree, &strategy)
    }

    /// The sampling distribution of a one-token tabular policy at every
    /// infoset of `tree`.
    pub fn from_tabular(tree: &GameTree, params: &PolicyParameters, sampling: &SamplingConfig) -> Self {
        let strategy: Vec<Vec<f64>> = tree
            .infosets
            .iter()
            .map(|info| {
                let legal: Vec<String> = info.actions.iter().map(ToString::to_string).collect();
                let key = decision_key(tree.game, &info.key, &legal, "");
                sampling_distribution(&params.logits(key, legal.len()), sampling)
            })
            .collect();
        Self::from_tree(tree, &strategy)
    }

    /// Writes the text table: a `# game=` header, then one line per state:
    /// seat, JSON-quoted key, and tab-separated `action:probability` pairs.
    pub fn write_table<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# game={}", self.game)?;
        for (seat, policy) in self.players.iter().enumerate() {
            for (key, entries) in &policy.table {
                write!(out, "{seat}\t{}", serde_json::to_string(key)?)?;
                for (a, p) in entries {
                    write!(out, "\t{a}:{p:?}")?;
                }
                writeln!(out)?;
            }
        }
        Ok(())
    }

    pub fn read_table<R: BufRead>(input: R) -> Result<Self> {
        let mut game = None;
        let mut players = [BehaviorPolicy::default(), BehaviorPolicy::default()];
        for (n, line) in input.lines().enumerate() {
            let line = line?;
            let bad = |what: &str| Error::Corrupt(format!("strategy table line {}: {what}", n + 1));
            if let Some(rest) = line.strip_prefix("# game=") {
                game = Some(rest.trim().parse::<GameId>()?);
                continue;
            }
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let seat: PlayerId =
                fields.next().and_then(|s| s.parse().ok()).filter(|&s: &usize| s < 2).ok_or_else(|| bad("bad seat"))?;
            let key: String =
                serde_json::from_str(fields.next().ok_or_else(|| bad("missing key"))?).map_err(|_| bad("bad key"))?;
            let mut entries = Vec::new();
            for f in fields {
                let (a, p) = f.rsplit_once(':').ok_or_else(|| bad("expected action:probability"))?;
                let p: f64 = p.parse().map_err(|_| bad("bad probability"))?;
                if !(0.0..=1.0 + 1e-9).contains(&p) {
                    return Err(bad("probability out of range"));
                }
                entries.push((a.to_string(), p));
            }
            let total: f64 = entries.iter().map(|e| e.1).sum();
            if (total - 1.0).abs() > 1e-6 {
                return Err(bad("probabilities do not sum to 1"));
            }
            players[seat].table.insert(key, entries);
        }
        let game = game.ok_or_else(|| Error::Corrupt("strategy table lacks a `# game=` header".into()))?;
        Ok(StrategyProfile { game, players })
    }
}

fn act_from(dist: Vec<f64>, legal: Vec<String>, key: u64, rng: &mut ChaCha8Rng) -> Emission {
    let token = sample_index(&dist, rng);
    let action = legal[token].clone();
    let step = TokenStep { key, vocab: legal, token, logprob: dist[token].ln() };
    Emission::answer(&action, vec![step])
}

fn legal_strings(state: &GameState) -> Vec<String> {
    state.legal_actions().iter().map(ToString::to_string).collect()
}

impl Policy for StrategyProfile {
    fn act(&self, state: &GameState, rng: &mut ChaCha8Rng) -> Emission {
        let p = state.current_player();
        let obs = state.observe(p);
        let legal = legal_strings(state);
        let dist = self.players[p].distribution(&obs, &legal);
        let key = decision_key(state.game(), &obs, &legal, "");
        act_from(dist, legal, key, rng)
    }
}

/// Picks uniformly among legal actions.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformPolicy;

impl Policy for UniformPolicy {
    fn act(&self, state: &GameState, rng: &mut ChaCha8Rng) -> Emission {
        let legal = legal_strings(state);
        let dist = vec![1.0 / legal.len() as f64; legal.len()];
        act_from(dist, legal, 0, rng)
    }
}
