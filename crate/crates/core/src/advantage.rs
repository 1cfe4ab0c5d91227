//! Advantage estimators over groups of per-player trajectories.
//!
//! All four schemes produce one scalar per turn; every token of a turn
//! carries that turn's value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rollout::Group;

/// Guard added to standard deviations before dividing.
pub const EPS_STD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Episode-return z-score, one flat average over each trajectory's tokens.
    Naive,
    /// Episode-return z-score with turn-nested averaging.
    NaiveMulti,
    /// Z-score every turn reward over the batch, then suffix-sum.
    ProcessSupervision,
    /// Suffix-sum returns minus their pooled mean.
    Mars,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Naive, Scheme::NaiveMulti, Scheme::ProcessSupervision, Scheme::Mars];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Naive => "naive",
            Scheme::NaiveMulti => "naive_multi",
            Scheme::ProcessSupervision => "process_supervision",
            Scheme::Mars => "mars",
        }
    }

    /// Whether the objective averages tokens per turn (`true`) or flat over the
    /// whole trajectory.
    pub fn nested_weighting(self) -> bool {
        self != Scheme::Naive
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::config(format!("unknown advantage scheme `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageConfig {
    pub scheme: Scheme,
    /// Normalize within each seat's subgroup instead of the pooled group.
    pub agent_specific: bool,
    /// Use a separate baseline per turn index (MARS only).
    pub per_turn_baseline: bool,
    /// GAE trace parameter for MARS; 1 gives plain return-minus-baseline.
    pub lambda: f64,
}

impl Default for AdvantageConfig {
    fn default() -> Self {
        AdvantageConfig { scheme: Scheme::Mars, agent_specific: true, per_turn_baseline: false, lambda: 1.0 }
    }
}

/// Suffix sums `R_k = Σ_{k' ≥ k} r_k'` for each trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnTable {
    pub returns: Vec<Vec<f64>>,
}

impl ReturnTable {
    pub fn new(rewards: &[Vec<f64>]) -> Self {
        let returns = rewards
            .iter()
            .map(|r| {
                let mut out = vec![0.0; r.len()];
                let mut acc = 0.0;
                for k in (0..r.len()).rev() {
                    acc += r[k];
                    out[k] = acc;
                }
                out
            })
            .collect();
        ReturnTable { returns }
    }

    /// `R^i = R_1^i`, zero for empty trajectories.
    pub fn episode_returns(&self) -> Vec<f64> {
        self.returns.iter().map(|r| r.first().copied().unwrap_or(0.0)).collect()
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

fn zscore(x: f64, mean: f64, std: f64) -> f64 {
    // Below the guard the spread is rounding noise, so the group counts as flat.
    if std <= EPS_STD {
        0.0
    } else {
        (x - mean) / std
    }
}

fn check_len(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::config(format!("advantage baseline needs at least 2 trajectories, got {n}")));
    }
    Ok(())
}

/// `(r_i − mean) / std` with population std; zero when the group has no spread.
pub fn naive_group_advantage(episode_returns: &[f64]) -> Result<Vec<f64>> {
    check_len(episode_returns.len())?;
    let (mean, std) = mean_std(episode_returns.iter().copied());
    Ok(episode_returns.iter().map(|&r| zscore(r, mean, std)).collect())
}

/// Normalizes every turn reward over the pooled batch, then suffix-sums.
pub fn process_supervision_advantage(rewards: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (mean, std) = mean_std(rewards.iter().flatten().copied());
    let normalized: Vec<Vec<f64>> = rewards.iter().map(|r| r.iter().map(|&x| zscore(x, mean, std)).collect()).collect();
    ReturnTable::new(&normalized).returns
}

/// Generalized advantage estimation with discount 1 over one trajectory.
/// `values[k]` is the baseline at turn `k`; the value after the last turn is 0.
pub fn gae(rewards: &[f64], values: &[f64], lambda: f64) -> Vec<f64> {
    let n = rewards.len();
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        let next = if k + 1 < n { values[k + 1] } else { 0.0 };
        let delta = rewards[k] + next - values[k];
        acc = delta + lambda * acc;
        out[k] = acc;
    }
    out
}

/// `A_k = R_k − mean(R)`, the mean pooled over all trajectories and turns.
pub fn mars_turn_advantage(rewards: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    check_len(rewards.len())?;
    let table = ReturnTable::new(rewards);
    let (mean, _) = mean_std(table.returns.iter().flatten().copied());
    Ok(table.returns.iter().map(|r| r.iter().map(|&x| x - mean).collect()).collect())
}

fn mars_with_options(rewards: &[Vec<f64>], per_turn: bool, lambda: f64) -> Result<Vec<Vec<f64>>> {
    check_len(rewards.len())?;
    if !per_turn && lambda == 1.0 {
        return mars_turn_advantage(rewards);
    }
    let table = ReturnTable::new(rewards);
    let longest = rewards.iter().map(Vec::len).max().unwrap_or(0);
    let baseline: Vec<f64> = if per_turn {
        (0..longest).map(|k| mean_std(table.returns.iter().filter_map(|r| r.get(k).copied())).0).collect()
    } else {
        vec![mean_std(table.returns.iter().flatten().copied()).0; longest]
    };
    Ok(rewards.iter().map(|r| gae(r, &baseline[..r.len()], lambda)).collect())
}

/// Per-turn advantages for one set of trajectories under `cfg.scheme`.
pub fn scheme_advantage(rewards: &[Vec<f64>], cfg: &AdvantageConfig) -> Result<Vec<Vec<f64>>> {
    match cfg.scheme {
        Scheme::Naive | Scheme::NaiveMulti => {
            let episode = ReturnTable::new(rewards).episode_returns();
            let a = naive_group_advantage(&episode)?;
            Ok(rewards.iter().zip(a).map(|(r, a)| vec![a; r.len()]).collect())
        }
        Scheme::ProcessSupervision => {
            check_len(rewards.len())?;
            Ok(process_supervision_advantage(rewards))
        }
        Scheme::Mars => mars_with_options(rewards, cfg.per_turn_baseline, cfg.lambda),
    }
}

/// Advantages aligned with a [`Group`]'s trajectories.
#[derive(Clone, Debug, PartialEq)]
pub struct AdvantageAssignment {
    pub scheme: Scheme,
    /// `per_turn[i][k]` for trajectory `i`, turn `k` (0-based).
    pub per_turn: Vec<Vec<f64>>,
    /// Subgroup each trajectory was normalized in; `None` when pooled.
    pub subgroup: Vec<Option<usize>>,
}

impl AdvantageAssignment {
    /// Advantage of token `t` of turn `k` of trajectory `i`.
    pub fn token(&self, i: usize, k: usize, _t: usize) -> f64 {
        self.per_turn[i][k]
    }

    pub fn mean_abs(&self) -> f64 {
        let (sum, n) = self.per_turn.iter().flatten().fold((0.0, 0usize), |(s, n), a| (s + a.abs(), n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

/// Applies the configured scheme per seat (or pooled when `agent_specific`
/// is off).
pub fn agent_specific_advantage(group: &Group, cfg: &AdvantageConfig) -> Result<AdvantageAssignment> {
    let rewards: Vec<Vec<f64>> = group.trajectories.iter().map(|t| t.turn_rewards()).collect();
    let n = rewards.len();
    let mut per_turn = vec![Vec::new(); n];
    let mut subgroup = vec![None; n];
    if cfg.agent_specific {
        for (p, members) in group.subgroups.iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            let sub: Vec<Vec<f64>> = members.iter().map(|&i| rewards[i].clone()).collect();
            let adv = scheme_advantage(&sub, cfg)?;
            for (&i, a) in members.iter().zip(adv) {
                per_turn[i] = a;
                subgroup[i] = Some(p);
            }
        }
    } else {
        per_turn = scheme_advantage(&rewards, cfg)?;
    }
    Ok(AdvantageAssignment { scheme: cfg.scheme, per_turn, subgroup })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn naive_examples() {
        assert!(close(&naive_group_advantage(&[1.0, -1.0]).unwrap(), &[1.0, -1.0]));
        assert_eq!(naive_group_advantage(&[2.0; 3]).unwrap(), vec![0.0; 3]);
        let s = 3f64.sqrt();
        assert!(close(
            &naive_group_advantage(&[4.0, 0.0, 0.0, 0.0]).unwrap(),
            &[3.0 / s, -1.0 / s, -1.0 / s, -1.0 / s]
        ));
        assert!(naive_group_advantage(&[1.0]).is_err());
    }

    #[test]
    fn mars_examples() {
        let a = mars_turn_advantage(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(a, vec![vec![0.5, 0.5], vec![-0.5, -0.5]]);
        let a = mars_turn_advantage(&[vec![2.0], vec![0.0]]).unwrap();
        assert_eq!(a, vec![vec![1.0], vec![-1.0]]);
        assert!(mars_turn_advantage(&[vec![1.0]]).is_err());
    }

    #[test]
    fn process_supervision_reduces_to_naive_for_single_turns() {
        let a = process_supervision_advantage(&[vec![1.0], vec![-1.0]]);
        assert!(close(&a[0], &[1.0]) && close(&a[1], &[-1.0]));
        assert_eq!(process_supervision_advantage(&[vec![3.0; 2], vec![3.0]]), vec![vec![0.0; 2], vec![0.0]]);
    }

    #[test]
    fn lambda_one_matches_plain_estimator() {
        let r = vec![vec![0.5, -1.0, 2.0], vec![1.0], vec![0.0, 0.25]];
        let plain = mars_turn_advantage(&r).unwrap();
        // pooled returns {1.5, 1, 2, 1, 0.25, 0.25}
        let mean = 1.0;
        for (x, rew) in plain.iter().zip(&r) {
            assert!(close(x, &gae(rew, &vec![mean; rew.len()], 1.0)));
        }
        let per_turn = mars_with_options(&r, true, 1.0).unwrap();
        // per-index baselines: mean(1.5, 1, 0.25), mean(1, 0.25), 2
        assert!(close(&per_turn[1], &[1.0 - 2.75 / 3.0]));
        assert!(close(&per_turn[0], &[1.5 - 2.75 / 3.0, 1.0 - 0.625, 0.0]));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
    }
}
