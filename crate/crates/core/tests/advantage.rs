mod common;

use common::{pooled_mean, random_reward_batch, regression_batch, returns_to_go};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use selfplay::advantage::{
    agent_specific_advantage, gae, mars_turn_advantage, naive_group_advantage, process_supervision_advantage,
    scheme_advantage, AdvantageConfig, Scheme, EPS_STD,
};
use selfplay::rewards::RewardBreakdown;
use selfplay::rollout::{Group, Trajectory, TurnRecord};
use selfplay::GameId;

fn rewards_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-4.0f64..=4.0, 1..=8), 2..=16)
}

#[test]
fn mars_is_zero_mean_on_random_batches() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let batch = random_reward_batch(&mut rng);
        let a = mars_turn_advantage(&batch).unwrap();
        assert!(pooled_mean(&a).abs() <= 1e-9);
    }
}

#[test]
fn mars_equals_gae_with_constant_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let batch = random_reward_batch(&mut rng);
        let v = pooled_mean(&returns_to_go(&batch));
        let a = mars_turn_advantage(&batch).unwrap();
        for (r, ai) in batch.iter().zip(&a) {
            let g = gae(r, &vec![v; r.len()], 1.0);
            for (x, y) in g.iter().zip(ai) {
                assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
            }
        }
    }
}

#[test]
fn process_supervision_is_not_zero_mean() {
    let batch = regression_batch();
    let ps = process_supervision_advantage(&batch);
    let mars = mars_turn_advantage(&batch).unwrap();
    assert!(pooled_mean(&ps).abs() > 0.1, "{}", pooled_mean(&ps));
    assert!(pooled_mean(&mars).abs() <= 1e-9);
}

#[test]
fn naive_advantage_of_a_flat_group_is_zero() {
    assert_eq!(naive_group_advantage(&[3.0, 3.0, 3.0]).unwrap(), vec![0.0; 3]);
    let tiny = naive_group_advantage(&[1.0, 1.0 + EPS_STD * 0.1]).unwrap();
    assert_eq!(tiny, vec![0.0, 0.0]);
}

#[test]
fn single_trajectory_groups_are_rejected() {
    assert!(mars_turn_advantage(&[vec![1.0]]).is_err());
    assert!(naive_group_advantage(&[1.0]).is_err());
}

fn trajectory(player: usize, returns: &[f64]) -> Trajectory {
    let turns = returns
        .iter()
        .enumerate()
        .map(|(k, &r)| TurnRecord {
            player,
            k: k as u32 + 1,
            observation: String::new(),
            action: "<PASS>".into(),
            tokens: Vec::new(),
            reward: RewardBreakdown::new(r, 0.0, 0.0),
            terminal: k + 1 == returns.len(),
        })
        .collect();
    Trajectory { episode_id: 0, game: GameId::Kuhn, player, turns, game_return: returns.iter().sum(), violated: false }
}

#[test]
fn agent_specific_baselines_separate_the_seats() {
    // seat 0 returns {2, 0}, seat 1 returns {−2, 0}
    let group = Group::new(
        GameId::Kuhn,
        0,
        vec![trajectory(0, &[2.0]), trajectory(1, &[-2.0]), trajectory(0, &[0.0]), trajectory(1, &[0.0])],
    );
    let cfg = AdvantageConfig { scheme: Scheme::Mars, ..AdvantageConfig::default() };
    let a = agent_specific_advantage(&group, &cfg).unwrap();
    assert_eq!(a.per_turn, vec![vec![1.0], vec![-1.0], vec![-1.0], vec![1.0]]);
    assert_eq!(a.subgroup, vec![Some(0), Some(1), Some(0), Some(1)]);
    let pooled = agent_specific_advantage(&group, &AdvantageConfig { agent_specific: false, ..cfg }).unwrap();
    assert_eq!(pooled.per_turn, vec![vec![2.0], vec![-2.0], vec![0.0], vec![0.0]]);
    assert_eq!(pooled.subgroup, vec![None; 4]);
}

#[test]
fn per_turn_baseline_subtracts_each_turn_mean() {
    let batch = vec![vec![1.0, 2.0], vec![3.0], vec![0.0, 0.0]];
    let cfg = AdvantageConfig { per_turn_baseline: true, ..AdvantageConfig::default() };
    let a = scheme_advantage(&batch, &cfg).unwrap();
    // returns-to-go: [3, 2], [3], [0, 0]; turn means 2 and 1
    assert_eq!(a, vec![vec![1.0, 1.0], vec![1.0], vec![-2.0, -1.0]]);
}

proptest! {
    #[test]
    fn mars_subgroup_means_vanish(batch in rewards_strategy()) {
        let a = mars_turn_advantage(&batch).unwrap();
        prop_assert!(pooled_mean(&a).abs() <= 1e-9);
    }

    #[test]
    fn mars_matches_returns_minus_pooled_mean(batch in rewards_strategy()) {
        let r = returns_to_go(&batch);
        let m = pooled_mean(&r);
        let a = mars_turn_advantage(&batch).unwrap();
        for (ri, ai) in r.iter().zip(&a) {
            for (x, y) in ri.iter().zip(ai) {
                prop_assert!((x - m - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn mars_scales_with_rewards(batch in rewards_strategy(), c in 0.1f64..10.0) {
        let scaled: Vec<Vec<f64>> = batch.iter().map(|r| r.iter().map(|x| x * c).collect()).collect();
        let a = mars_turn_advantage(&batch).unwrap();
        let b = mars_turn_advantage(&scaled).unwrap();
        for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
            prop_assert!((x * c - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn naive_is_affine_invariant(
        returns in prop::collection::vec(-4.0f64..=4.0, 2..=16),
        scale in 0.1f64..10.0,
        shift in -5.0f64..5.0,
    ) {
        let moved: Vec<f64> = returns.iter().map(|r| r * scale + shift).collect();
        let a = naive_group_advantage(&returns).unwrap();
        let b = naive_group_advantage(&moved).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-6);
        }
    }

    #[test]
    fn naive_multi_broadcasts_one_value_per_trajectory(batch in rewards_strategy()) {
        let cfg = AdvantageConfig { scheme: Scheme::NaiveMulti, ..AdvantageConfig::default() };
        let a = scheme_advantage(&batch, &cfg).unwrap();
        for (r, ai) in batch.iter().zip(&a) {
            prop_assert_eq!(r.len(), ai.len());
            prop_assert!(ai.iter().all(|x| *x == ai[0]));
        }
    }

    #[test]
    fn lambda_one_reduces_to_plain_mars(batch in rewards_strategy()) {
        let plain = mars_turn_advantage(&batch).unwrap();
        let cfg = AdvantageConfig { lambda: 1.0, ..AdvantageConfig::default() };
        prop_assert_eq!(scheme_advantage(&batch, &cfg).unwrap(), plain);
    }
}
