use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::games::{GameId, GameState};
use crate::rollout::{Emission, Policy, TokenStep};

/// Token marking the end of an action in character mode, used only when a
/// complete action is also the prefix of another legal action.
pub const END_TOKEN: &str = "";

/// How a turn's action string is split into policy tokens.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VocabMode {
    /// The whole canonical action is one token.
    #[default]
    Action,
    /// One token per character, masked to legal prefixes.
    Char,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    /// `0` means greedy.
    pub temperature: f64,
    pub top_p: f64,
    /// `0` disables the cut.
    pub top_k: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { temperature: 0.6, top_p: 0.99, top_k: 100 }
    }
}

impl SamplingConfig {
    /// Same truncation with temperature 0.5.
    pub fn low_temperature() -> Self {
        SamplingConfig { temperature: 0.5, ..Self::default() }
    }

    pub fn greedy() -> Self {
        SamplingConfig { temperature: 0.0, top_p: 1.0, top_k: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::config("sampling_temperature must be a nonnegative number"));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(Error::config("top_p must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Stable 64-bit key of a decision point: what the policy conditions on.
pub fn decision_key(game: GameId, observation: &str, legal: &[String], prefix: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(game.name().as_bytes());
    h.update([0]);
    h.update(observation.as_bytes());
    h.update([0]);
    for a in legal {
        h.update(a.as_bytes());
        h.update(*b"\n");
    }
    h.update([0]);
    h.update(prefix.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 has 32 bytes"))
}

/// `softmax(z / T)`.
pub fn softmax(logits: &[f64], temperature: f64) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| ((z - max) / temperature).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// The distribution actually sampled from: tempered softmax, then top-k, then
/// top-p, renormalized. Greedy puts all mass on the first maximal logit.
pub fn sampling_distribution(logits: &[f64], cfg: &SamplingConfig) -> Vec<f64> {
    let n = logits.len();
    if cfg.temperature == 0.0 {
        let mut p = vec![0.0; n];
        p[argmax(logits)] = 1.0;
        return p;
    }
    let probs = softmax(logits, cfg.temperature);
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep vocabulary order
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
    let mut keep = if cfg.top_k == 0 { n } else { cfg.top_k.min(n) };
    let mass: f64 = order[..keep].iter().map(|&i| probs[i]).sum();
    let mut acc = 0.0;
    for (rank, &i) in order[..keep].iter().enumerate() {
        acc += probs[i] / mass;
        if acc >= cfg.top_p {
            keep = rank + 1;
            break;
        }
    }
    let kept = &order[..keep];
    let total: f64 = kept.iter().map(|&i| probs[i]).sum();
    let mut out = vec![0.0; n];
    for &i in kept {
        out[i] = probs[i] / total;
    }
    out
}

/// Draws an index from `dist` with one uniform variate.
pub fn sample_index(dist: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in dist.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Logits of one decision point, aligned with its vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionPoint {
    pub vocab: Vec<String>,
    pub logits: Vec<f64>,
}

impl DecisionPoint {
    pub fn uniform(vocab: Vec<String>) -> Self {
        let logits = vec![0.0; vocab.len()];
        DecisionPoint { vocab, logits }
    }
}

/// Tabular autoregressive policy. Missing decision points are uniform.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolicyParameters {
    points: BTreeMap<u64, DecisionPoint>,
}

impl PolicyParameters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, key: u64) -> Option<&DecisionPoint> {
        self.points.get(&key)
    }

    pub fn get_mut(&mut self, key: u64) -> Option<&mut DecisionPoint> {
        self.points.get_mut(&key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &DecisionPoint)> {
        self.points.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&u64, &mut DecisionPoint)> {
        self.points.iter_mut()
    }

    pub fn insert(&mut self, key: u64, point: DecisionPoint) {
        self.points.insert(key, point);
    }

    /// Adds a uniform entry for `key` if absent. Returns `true` when added.
    pub fn ensure(&mut self, key: u64, vocab: &[String]) -> Result<bool> {
        match self.points.get(&key) {
            Some(p) if p.vocab == vocab => Ok(false),
            Some(_) => Err(Error::Corrupt(format!("vocabulary mismatch at decision point {key:016x}"))),
            None => {
                self.points.insert(key, DecisionPoint::uniform(vocab.to_vec()));
                Ok(true)
            }
        }
    }

    /// Logits at `key`, zeros when the point was never touched.
    pub fn logits(&self, key: u64, n: usize) -> Vec<f64> {
        match self.points.get(&key) {
            Some(p) => p.logits.clone(),
            None => vec![0.0; n],
        }
    }
}

/// Next-token vocabulary after `prefix` in character mode.
fn char_vocab(legal: &[String], prefix: &str) -> Vec<String> {
    let mut next: Vec<String> = legal
        .iter()
        .filter(|a| a.len() > prefix.len() && a.starts_with(prefix))
        .map(|a| a[prefix.len()..].chars().next().expect("longer than prefix").to_string())
        .collect();
    next.sort();
    next.dedup();
    if !next.is_empty() && legal.iter().any(|a| a == prefix) {
        next.insert(0, END_TOKEN.to_string());
    }
    next
}

/// Samples one turn's token sequence among encodings of `legal`.
///
/// Returns the tokens and the action string they spell.
pub fn policy_sample(
    params: &PolicyParameters,
    game: GameId,
    observation: &str,
    legal: &[String],
    mode: VocabMode,
    sampling: &SamplingConfig,
    rng: &mut ChaCha8Rng,
) -> (Vec<TokenStep>, String) {
    assert!(!legal.is_empty(), "policy_sample needs at least one legal action");
    let mut step = |prefix: &str, vocab: Vec<String>| {
        let key = decision_key(game, observation, legal, prefix);
        let dist = sampling_distribution(&params.logits(key, vocab.len()), sampling);
        let token = sample_index(&dist, rng);
        TokenStep { key, logprob: dist[token].ln(), vocab, token }
    };
    match mode {
        VocabMode::Action => {
            let t = step("", legal.to_vec());
            let action = t.vocab[t.token].clone();
            (vec![t], action)
        }
        VocabMode::Char => {
            let mut prefix = String::new();
            let mut tokens = Vec::new();
            loop {
                let vocab = char_vocab(legal, &prefix);
                if vocab.is_empty() {
                    break;
                }
                let t = step(&prefix, vocab);
                let tok = t.vocab[t.token].clone();
                tokens.push(t);
                if tok == END_TOKEN {
                    break;
                }
                prefix.push_str(&tok);
            }
            (tokens, prefix)
        }
    }
}

/// A read-only view of [`PolicyParameters`] that plays games.
#[derive(Clone, Debug)]
pub struct TabularPolicy<'a> {
    pub params: &'a PolicyParameters,
    pub sampling: SamplingConfig,
    pub mode: VocabMode,
}

impl<'a> TabularPolicy<'a> {
    pub fn new(params: &'a PolicyParameters, sampling: SamplingConfig, mode: VocabMode) -> Self {
        TabularPolicy { params, sampling, mode }
    }
}

impl Policy for TabularPolicy<'_> {
    fn act(&self, state: &GameState, rng: &mut ChaCha8Rng) -> Emission {
        let legal: Vec<String> = state.legal_actions().iter().map(ToString::to_string).collect();
        let observation = state.observe(state.current_player());
        let (tokens, action) =
            policy_sample(self.params, state.game(), &observation, &legal, self.mode, &self.sampling, rng);
        Emission::answer(&action, tokens)
    }
}
