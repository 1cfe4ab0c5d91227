//! Tabular softmax policies, the clipped surrogate objective and the
//! adaptive-moment update.

mod checkpoint;
mod objective;
mod policy;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::advantage::AdvantageAssignment;
use crate::error::{Error, Result};
use crate::rollout::Group;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use objective::{
    build_batch, categorical_kl, clipped_token_objective, kl_divergence, surrogate_objective, Gradient,
    ObjectiveConfig, ObjectiveValue, TokenTerm,
};
pub use policy::{
    decision_key, policy_sample, sample_index, sampling_distribution, softmax, DecisionPoint, PolicyParameters,
    SamplingConfig, TabularPolicy, VocabMode, END_TOKEN,
};

/// What the KL penalty is measured against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KlAnchor {
    /// The uniform policy the run started from.
    #[default]
    Initial,
    /// The behavior snapshot of the current step.
    Old,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    pub objective: ObjectiveConfig,
    pub kl_anchor: KlAnchor,
    pub learning_rate: f64,
    pub warmup_steps: u64,
    pub max_steps: u64,
    pub grad_clip: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// L2 pull of logits toward zero.
    pub weight_decay: f64,
    pub ppo_epochs: u32,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            objective: ObjectiveConfig::default(),
            kl_anchor: KlAnchor::Initial,
            learning_rate: 0.1,
            warmup_steps: 10,
            max_steps: 200,
            grad_clip: 1.0,
            adam_beta1: 0.9,
            adam_beta2: 0.95,
            adam_eps: 1e-8,
            weight_decay: 0.0,
            ppo_epochs: 1,
        }
    }
}

impl OptimConfig {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN
    pub fn validate(&self) -> Result<()> {
        let o = &self.objective;
        if !(o.clip_eps > 0.0 && o.clip_eps < 1.0) {
            return Err(Error::config("ppo_policy_clip must lie in (0, 1)"));
        }
        if let Some(c) = o.dual_clip {
            if !(c > 1.0) {
                return Err(Error::config("dual_clip constant must exceed 1"));
            }
        }
        if !(o.kl_coef >= 0.0) {
            return Err(Error::config("kl_loss_coef must be nonnegative"));
        }
        if !(o.temperature > 0.0) {
            return Err(Error::config("training needs a positive sampling_temperature"));
        }
        if !(self.learning_rate > 0.0) || self.max_steps == 0 || self.ppo_epochs == 0 {
            return Err(Error::config("learning_rate, max_steps and ppo_epochs must be positive"));
        }
        Ok(())
    }

    /// Linear warmup to the peak, then cosine decay to zero at `max_steps`.
    /// `step` is 1-based.
    pub fn learning_rate_at(&self, step: u64) -> f64 {
        let peak = self.learning_rate;
        if step <= self.warmup_steps {
            return peak * step as f64 / self.warmup_steps as f64;
        }
        if step >= self.max_steps {
            return 0.0;
        }
        let span = (self.max_steps - self.warmup_steps) as f64;
        let progress = (step - self.warmup_steps) as f64 / span;
        peak * 0.5 * (1.0 + (std::f64::consts::PI * progress).cos())
    }
}

/// First and second moment estimates for one decision point.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepMetrics {
    pub step: u64,
    pub learning_rate: f64,
    pub objective: f64,
    pub surrogate: f64,
    pub kl: f64,
    pub entropy: f64,
    /// Norm before clipping.
    pub grad_norm: f64,
    pub clip_fraction: f64,
    pub tokens: usize,
}

/// Parameters plus optimizer state.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trainer {
    pub params: PolicyParameters,
    pub moments: BTreeMap<u64, Moments>,
    /// Completed steps.
    pub step: u64,
}

impl Trainer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds every decision point sampled in `groups`, with uniform logits.
    pub fn register(&mut self, groups: &[Group]) -> Result<()> {
        for g in groups {
            for t in &g.trajectories {
                for turn in &t.turns {
                    for tok in &turn.tokens {
                        if self.params.ensure(tok.key, &tok.vocab)? {
                            let n = tok.vocab.len();
                            self.moments.insert(tok.key, Moments { m: vec![0.0; n], v: vec![0.0; n] });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// One optimization step on groups collected with the current parameters.
    pub fn train_step(
        &mut self,
        groups: &[Group],
        advantages: &[AdvantageAssignment],
        nested: bool,
        cfg: &OptimConfig,
    ) -> Result<StepMetrics> {
        self.register(groups)?;
        let pairs: Vec<(&Group, &AdvantageAssignment)> = groups.iter().zip(advantages).collect();
        let batch = build_batch(&pairs, nested);
        let step = self.step + 1;
        let old = (cfg.ppo_epochs > 1 || cfg.kl_anchor == KlAnchor::Old).then(|| self.params.clone());
        let mut metrics = StepMetrics { step, tokens: batch.len(), ..StepMetrics::default() };
        for _ in 0..cfg.ppo_epochs {
            let behavior = old.as_ref().unwrap_or(&self.params);
            let reference = match cfg.kl_anchor {
                KlAnchor::Initial => None,
                KlAnchor::Old => Some(behavior),
            };
            let (value, mut grad) = surrogate_objective(&batch, &self.params, behavior, reference, &cfg.objective)?;
            if grad.values().flatten().any(|g| !g.is_finite()) || !value.objective.is_finite() {
                return Err(Error::NonFiniteGradient { step });
            }
            if cfg.weight_decay > 0.0 {
                for (key, point) in self.params.iter() {
                    let g = grad.entry(*key).or_insert_with(|| vec![0.0; point.logits.len()]);
                    for (gi, z) in g.iter_mut().zip(&point.logits) {
                        *gi -= cfg.weight_decay * z;
                    }
                }
            }
            let norm = grad.values().flatten().map(|g| g * g).sum::<f64>().sqrt();
            if norm > cfg.grad_clip {
                let s = cfg.grad_clip / norm;
                grad.values_mut().flatten().for_each(|g| *g *= s);
            }
            let lr = cfg.learning_rate_at(step);
            self.adam_update(&grad, lr, step, cfg);
            metrics = StepMetrics {
                step,
                learning_rate: lr,
                objective: value.objective,
                surrogate: value.surrogate,
                kl: value.kl,
                entropy: value.entropy,
                grad_norm: norm,
                clip_fraction: value.clip_fraction,
                tokens: batch.len(),
            };
        }
        self.step = step;
        Ok(metrics)
    }

    /// Gradient ascent with bias-corrected moments over every known point.
    fn adam_update(&mut self, grad: &Gradient, lr: f64, step: u64, cfg: &OptimConfig) {
        let (b1, b2) = (cfg.adam_beta1, cfg.adam_beta2);
        let c1 = 1.0 - b1.powi(step as i32);
        let c2 = 1.0 - b2.powi(step as i32);
        for (key, point) in self.params.iter_mut() {
            let mom = self
                .moments
                .entry(*key)
                .or_insert_with(|| Moments { m: vec![0.0; point.logits.len()], v: vec![0.0; point.logits.len()] });
            let g = grad.get(key);
            for j in 0..point.logits.len() {
                let gj = g.map_or(0.0, |g| g[j]);
                mom.m[j] = b1 * mom.m[j] + (1.0 - b1) * gj;
                mom.v[j] = b2 * mom.v[j] + (1.0 - b2) * gj * gj;
                let m_hat = mom.m[j] / c1;
                let v_hat = mom.v[j] / c2;
                point.logits[j] += lr * m_hat / (v_hat.sqrt() + cfg.adam_eps);
            }
        }
    }
}
