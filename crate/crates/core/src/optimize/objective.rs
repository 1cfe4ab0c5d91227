use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::policy::{softmax, PolicyParameters};
use crate::advantage::AdvantageAssignment;
use crate::error::{Error, Result};
use crate::rollout::Group;

/// One token of the batch with its weight in the nested average.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenTerm {
    pub key: u64,
    pub token: usize,
    pub vocab_len: usize,
    pub weight: f64,
    pub advantage: f64,
}

/// Flattens groups into weighted token terms.
///
/// Nested weighting: groups count equally, then seats, then trajectories,
/// then turns, then tokens. Flat weighting averages each trajectory's tokens
/// in one pool. Trajectories without turns still count in their seat's size.
pub fn build_batch(groups: &[(&Group, &AdvantageAssignment)], nested: bool) -> Vec<TokenTerm> {
    let mut out = Vec::new();
    let group_w = 1.0 / groups.len().max(1) as f64;
    for (group, adv) in groups {
        let seats: Vec<&Vec<usize>> = group.subgroups.iter().filter(|s| !s.is_empty()).collect();
        let mut traj_w = vec![0.0; group.len()];
        if nested {
            for members in &seats {
                for &i in *members {
                    traj_w[i] = group_w / seats.len() as f64 / members.len() as f64;
                }
            }
        } else {
            traj_w.iter_mut().for_each(|w| *w = group_w / group.len() as f64);
        }
        for (i, traj) in group.trajectories.iter().enumerate() {
            let total_tokens = traj.token_count();
            for (k, turn) in traj.turns.iter().enumerate() {
                let n = turn.tokens.len();
                if n == 0 {
                    continue;
                }
                let w = if nested {
                    traj_w[i] / traj.turns.len() as f64 / n as f64
                } else {
                    traj_w[i] / total_tokens as f64
                };
                for (t, tok) in turn.tokens.iter().enumerate() {
                    out.push(TokenTerm {
                        key: tok.key,
                        token: tok.token,
                        vocab_len: tok.vocab.len(),
                        weight: w,
                        advantage: adv.token(i, k, t),
                    });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub clip_eps: f64,
    /// Lower bound `c·A` for negative advantages; `None` disables it.
    pub dual_clip: Option<f64>,
    pub kl_coef: f64,
    pub entropy_coef: f64,
    /// Temperature of the softmax inside the ratio and the KL.
    pub temperature: f64,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        ObjectiveConfig { clip_eps: 0.2, dual_clip: Some(3.0), kl_coef: 0.2, entropy_coef: 0.0, temperature: 0.6 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ObjectiveValue {
    /// `surrogate − β·kl + entropy_coef·entropy`.
    pub objective: f64,
    pub surrogate: f64,
    pub kl: f64,
    pub entropy: f64,
    /// Weighted share of tokens whose ratio was clipped.
    pub clip_fraction: f64,
}

pub type Gradient = BTreeMap<u64, Vec<f64>>;

/// Clipped token objective and its derivative with respect to the ratio.
pub fn clipped_token_objective(ratio: f64, advantage: f64, eps: f64, dual: Option<f64>) -> (f64, f64) {
    let clipped = ratio.clamp(1.0 - eps, 1.0 + eps);
    let (mut value, mut d_ratio) = if ratio * advantage <= clipped * advantage {
        (ratio * advantage, advantage)
    } else {
        (clipped * advantage, 0.0)
    };
    if let Some(c) = dual {
        if advantage < 0.0 && value < c * advantage {
            value = c * advantage;
            d_ratio = 0.0;
        }
    }
    (value, d_ratio)
}

/// Exact `KL(p ‖ q)`.
pub fn categorical_kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(&pi, _)| pi > 0.0).map(|(&pi, &qi)| pi * (pi / qi).ln()).sum()
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

fn reference_probs(reference: Option<&PolicyParameters>, key: u64, n: usize, temperature: f64) -> Vec<f64> {
    match reference {
        Some(r) => softmax(&r.logits(key, n), temperature),
        None => vec![1.0 / n as f64; n],
    }
}

fn lookup<'a>(params: &'a PolicyParameters, term: &TokenTerm, which: &str) -> Result<&'a [f64]> {
    match params.get(term.key) {
        Some(p) if p.logits.len() == term.vocab_len && term.token < term.vocab_len => Ok(&p.logits),
        Some(_) => Err(Error::Corrupt(format!("{which} shape mismatch at {:016x}", term.key))),
        None => Err(Error::Corrupt(format!("decision point {:016x} missing from {which}", term.key))),
    }
}

/// Weighted clipped surrogate minus the KL penalty, with its exact gradient
/// with respect to `new`'s logits. `reference = None` anchors the KL to the
/// uniform initial policy.
pub fn surrogate_objective(
    batch: &[TokenTerm],
    new: &PolicyParameters,
    old: &PolicyParameters,
    reference: Option<&PolicyParameters>,
    cfg: &ObjectiveConfig,
) -> Result<(ObjectiveValue, Gradient)> {
    let temp = cfg.temperature;
    let mut value = ObjectiveValue::default();
    let mut grad: Gradient = BTreeMap::new();
    for term in batch {
        let z_new = lookup(new, term, "current parameters")?;
        let z_old = lookup(old, term, "behavior parameters")?;
        let p = softmax(z_new, temp);
        let p_old = softmax(z_old, temp);
        let ratio = p[term.token] / p_old[term.token];
        let (obj, d_ratio) = clipped_token_objective(ratio, term.advantage, cfg.clip_eps, cfg.dual_clip);
        if (ratio - 1.0).abs() > cfg.clip_eps {
            value.clip_fraction += term.weight;
        }
        let q = reference_probs(reference, term.key, term.vocab_len, temp);
        let kl = categorical_kl(&p, &q);
        let h = entropy(&p);
        value.surrogate += term.weight * obj;
        value.kl += term.weight * kl;
        value.entropy += term.weight * h;

        let g = grad.entry(term.key).or_insert_with(|| vec![0.0; term.vocab_len]);
        let w = term.weight / temp;
        for j in 0..term.vocab_len {
            let onehot = if j == term.token { 1.0 } else { 0.0 };
            let d_surr = d_ratio * ratio * (onehot - p[j]);
            let d_kl = if p[j] > 0.0 { p[j] * ((p[j] / q[j]).ln() - kl) } else { 0.0 };
            let d_h = if p[j] > 0.0 { -p[j] * (p[j].ln() + h) } else { 0.0 };
            g[j] += w * (d_surr - cfg.kl_coef * d_kl + cfg.entropy_coef * d_h);
        }
    }
    value.objective = value.surrogate - cfg.kl_coef * value.kl + cfg.entropy_coef * value.entropy;
    Ok((value, grad))
}

/// Weighted mean of `KL(a ‖ b)` over the batch's decision points.
pub fn kl_divergence(a: &PolicyParameters, b: &PolicyParameters, batch: &[TokenTerm], temperature: f64) -> f64 {
    batch
        .iter()
        .map(|t| {
            let p = softmax(&a.logits(t.key, t.vocab_len), temperature);
            let q = softmax(&b.logits(t.key, t.vocab_len), temperature);
            t.weight * categorical_kl(&p, &q)
        })
        .sum()
}
