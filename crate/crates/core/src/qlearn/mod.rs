//! Tabular Q-learning with ε-greedy exploration.

mod snapshot;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::snake::{observe, GameConfig, GameState, Observation, RelativeAction, OBSERVATION_KEYS};

pub use snapshot::{load_snapshot, parse_snapshot, save_snapshot, write_snapshot, SNAPSHOT_HEADER};

pub type ActionValues = [f64; RelativeAction::COUNT];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnParams {
    /// Discount factor.
    pub gamma: f64,
    /// Learning rate.
    pub nu: f64,
    pub epsilon0: f64,
    pub epsilon_min: f64,
    /// Multiplicative ε decay applied once per episode.
    pub epsilon_decay: f64,
}

impl Default for LearnParams {
    fn default() -> Self {
        Self {
            gamma: 0.9,
            nu: 0.1,
            epsilon0: 0.99,
            epsilon_min: 0.01,
            epsilon_decay: 0.9995,
        }
    }
}

impl LearnParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        if !unit(self.gamma) {
            return Err(Error::Config(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        if !(self.nu.is_finite() && self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::Config(format!("nu must lie in (0, 1], got {}", self.nu)));
        }
        if !unit(self.epsilon0) || !unit(self.epsilon_min) {
            return Err(Error::Config("epsilon0 and epsilon_min must lie in [0, 1]".into()));
        }
        if self.epsilon_min > self.epsilon0 {
            return Err(Error::Config(format!(
                "epsilon_min ({}) must not exceed epsilon0 ({})",
                self.epsilon_min, self.epsilon0
            )));
        }
        if !(self.epsilon_decay.is_finite() && self.epsilon_decay > 0.0 && self.epsilon_decay <= 1.0) {
            return Err(Error::Config(format!(
                "epsilon_decay must lie in (0, 1], got {}",
                self.epsilon_decay
            )));
        }
        Ok(())
    }
}

/// Q-values indexed by observation. Unseen observations read as
/// `default_value` for every action.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    entries: Vec<Option<ActionValues>>,
    default_value: f64,
}

impl Default for QTable {
    fn default() -> Self {
        Self::new()
    }
}

impl QTable {
    /// Empty table with all values initialized to zero.
    pub fn new() -> Self {
        Self {
            entries: vec![None; OBSERVATION_KEYS],
            default_value: 0.0,
        }
    }

    pub fn default_value(&self) -> f64 {
        self.default_value
    }

    pub fn values(&self, obs: &Observation) -> ActionValues {
        self.entries[obs.key() as usize].unwrap_or([self.default_value; RelativeAction::COUNT])
    }

    pub fn get(&self, obs: &Observation, action: RelativeAction) -> f64 {
        self.values(obs)[action.index()]
    }

    pub fn contains(&self, obs: &Observation) -> bool {
        self.entries[obs.key() as usize].is_some()
    }

    pub fn set_values(&mut self, obs: &Observation, values: ActionValues) {
        self.entries[obs.key() as usize] = Some(values);
    }

    /// Number of observations with a stored row.
    pub fn len(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stored rows in ascending key order.
    pub fn iter(&self) -> impl Iterator<Item = (Observation, ActionValues)> + '_ {
        self.entries.iter().enumerate().filter_map(|(k, e)| {
            e.map(|v| (Observation::from_key(k as u16).expect("dense index is a valid key"), v))
        })
    }

    pub fn max_value(&self, obs: &Observation) -> f64 {
        self.values(obs).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// All actions attaining the row maximum.
    pub fn greedy_actions(&self, obs: &Observation) -> Vec<RelativeAction> {
        let row = self.values(obs);
        let best = row.into_iter().fold(f64::NEG_INFINITY, f64::max);
        RelativeAction::ALL.into_iter().filter(|a| row[a.index()] == best).collect()
    }

    /// One tabular Bellman backup:
    /// `Q(s,a) += nu * (target - Q(s,a))`, with
    /// `target = r + gamma * max_a' Q(s',a')`, or `target = r` on terminal steps.
    ///
    /// Returns the new value of `Q(s,a)`.
    pub fn q_update(
        &mut self,
        obs: &Observation,
        action: RelativeAction,
        reward: f64,
        next_obs: &Observation,
        terminal: bool,
        params: &LearnParams,
    ) -> Result<f64> {
        if !reward.is_finite() {
            return Err(Error::Numeric(format!("reward must be finite, got {reward}")));
        }
        let target = if terminal {
            reward
        } else {
            reward + params.gamma * self.max_value(next_obs)
        };
        let mut row = self.values(obs);
        let q = &mut row[action.index()];
        *q += params.nu * (target - *q);
        let updated = *q;
        self.set_values(obs, row);
        Ok(updated)
    }

    /// ε-greedy choice; greedy ties are broken uniformly at random.
    pub fn select_action(&self, obs: &Observation, epsilon: f64, rng: &mut Rng) -> RelativeAction {
        if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
            return RelativeAction::ALL[rng.gen_range(0..RelativeAction::COUNT)];
        }
        let row = self.values(obs);
        let best = row.into_iter().fold(f64::NEG_INFINITY, f64::max);
        let mut ties = [RelativeAction::Straight; RelativeAction::COUNT];
        let mut count = 0;
        for a in RelativeAction::ALL {
            if row[a.index()] == best {
                ties[count] = a;
                count += 1;
            }
        }
        if count == 1 {
            ties[0]
        } else {
            ties[rng.gen_range(0..count)]
        }
    }
}

/// `max(epsilon_min, epsilon0 * epsilon_decay^episode)`.
pub fn epsilon_at(episode: u64, params: &LearnParams) -> f64 {
    let decayed = params.epsilon0 * params.epsilon_decay.powf(episode as f64);
    decayed.max(params.epsilon_min)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EpisodeStats {
    /// Undiscounted sum of rewards.
    pub ret: f64,
    pub steps: u64,
    pub seeds_eaten: u32,
    pub drugs_eaten: u32,
    pub final_length: usize,
}

/// Plays one game to termination, optionally learning after every step.
pub fn run_episode(
    config: &GameConfig,
    table: &mut QTable,
    params: &LearnParams,
    epsilon: f64,
    rng: &mut Rng,
    learn: bool,
) -> Result<EpisodeStats> {
    play(config, table, params, epsilon, rng, learn, None)
}

/// Like [`run_episode`], also returning the chosen action sequence.
pub fn run_episode_recorded(
    config: &GameConfig,
    table: &mut QTable,
    params: &LearnParams,
    epsilon: f64,
    rng: &mut Rng,
    learn: bool,
) -> Result<(EpisodeStats, Vec<RelativeAction>)> {
    let mut actions = Vec::new();
    let stats = play(config, table, params, epsilon, rng, learn, Some(&mut actions))?;
    Ok((stats, actions))
}

fn play(
    config: &GameConfig,
    table: &mut QTable,
    params: &LearnParams,
    epsilon: f64,
    rng: &mut Rng,
    learn: bool,
    mut record: Option<&mut Vec<RelativeAction>>,
) -> Result<EpisodeStats> {
    let mut state = GameState::new(config.clone())?;
    let mut obs = observe(&state);
    let mut ret = 0.0;
    loop {
        let action = table.select_action(&obs, epsilon, rng);
        if let Some(rec) = record.as_deref_mut() {
            rec.push(action);
        }
        let outcome = state.step(action)?;
        ret += outcome.reward;
        let next_obs = observe(&state);
        if learn {
            table.q_update(&obs, action, outcome.reward, &next_obs, outcome.terminal, params)?;
        }
        if outcome.terminal {
            break;
        }
        obs = next_obs;
    }
    Ok(EpisodeStats {
        ret,
        steps: state.steps(),
        seeds_eaten: state.seeds_eaten(),
        drugs_eaten: state.drugs_eaten(),
        final_length: state.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::snake::{Bearing, Direction, RewardParams};

    fn obs(key: u16) -> Observation {
        Observation::from_key(key).unwrap()
    }

    fn params(nu: f64, gamma: f64) -> LearnParams {
        LearnParams {
            nu,
            gamma,
            ..LearnParams::default()
        }
    }

    #[test]
    fn update_from_zero() {
        let mut t = QTable::new();
        let v = t
            .q_update(&obs(1), RelativeAction::Left, 20.0, &obs(2), false, &params(0.5, 0.9))
            .unwrap();
        assert_eq!(v, 10.0);
    }

    #[test]
    fn update_bootstraps_from_next_max() {
        let mut t = QTable::new();
        t.set_values(&obs(1), [10.0, 0.0, 0.0]);
        t.set_values(&obs(2), [0.0, 10.0, 3.0]);
        let v = t
            .q_update(&obs(1), RelativeAction::Left, 0.0, &obs(2), false, &params(0.5, 0.9))
            .unwrap();
        assert_eq!(v, 9.5);
    }

    #[test]
    fn terminal_target_is_reward() {
        let mut t = QTable::new();
        t.set_values(&obs(1), [10.0, 0.0, 0.0]);
        t.set_values(&obs(2), [100.0, 100.0, 100.0]);
        let v = t
            .q_update(&obs(1), RelativeAction::Left, 0.0, &obs(2), true, &params(0.5, 0.9))
            .unwrap();
        assert_eq!(v, 5.0);
    }

    #[test]
    fn update_touches_one_entry() {
        let mut t = QTable::new();
        t.set_values(&obs(7), [1.0, 2.0, 3.0]);
        t.set_values(&obs(8), [4.0, 5.0, 6.0]);
        let before = t.clone();
        t.q_update(&obs(7), RelativeAction::Right, 1.0, &obs(8), false, &params(0.1, 0.9))
            .unwrap();
        for (o, row) in t.iter() {
            let old = before.values(&o);
            for a in RelativeAction::ALL {
                if o.key() == 7 && a == RelativeAction::Right {
                    assert_ne!(row[a.index()], old[a.index()]);
                } else {
                    assert_eq!(row[a.index()], old[a.index()]);
                }
            }
        }
    }

    #[test]
    fn non_finite_reward_is_rejected() {
        let mut t = QTable::new();
        let err = t
            .q_update(&obs(0), RelativeAction::Left, f64::NAN, &obs(0), false, &params(0.1, 0.9))
            .unwrap_err();
        assert!(matches!(err, Error::Numeric(_)));
        assert!(t.is_empty());
    }

    #[test]
    fn absent_lookup_does_not_insert() {
        let t = QTable::new();
        assert_eq!(t.values(&obs(5)), [0.0; 3]);
        assert!(!t.contains(&obs(5)));
        assert!(t.is_empty());
    }

    #[test]
    fn two_state_cycle_reaches_bellman_fixed_point() {
        // A --(r=1)--> B --(r=0)--> A, one action taken: QA = 1/(1-g^2), QB = g/(1-g^2).
        let (a, b) = (obs(3), obs(4));
        let p = params(0.5, 0.9);
        let mut t = QTable::new();
        for _ in 0..2000 {
            t.q_update(&a, RelativeAction::Straight, 1.0, &b, false, &p).unwrap();
            t.q_update(&b, RelativeAction::Straight, 0.0, &a, false, &p).unwrap();
        }
        let qa = 1.0 / (1.0 - 0.81);
        let qb = 0.9 / (1.0 - 0.81);
        assert!((t.get(&a, RelativeAction::Straight) - qa).abs() < 1e-6);
        assert!((t.get(&b, RelativeAction::Straight) - qb).abs() < 1e-6);
    }

    #[test]
    fn greedy_argmax() {
        let mut t = QTable::new();
        t.set_values(&obs(9), [1.0, 5.0, 2.0]);
        let mut rng = rng_from_seed(0);
        for _ in 0..200 {
            assert_eq!(t.select_action(&obs(9), 0.0, &mut rng), RelativeAction::Straight);
        }
    }

    #[test]
    fn greedy_ties_split_evenly() {
        let mut t = QTable::new();
        t.set_values(&obs(9), [3.0, 3.0, 0.0]);
        let mut rng = rng_from_seed(1);
        let draws = 10_000;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            counts[t.select_action(&obs(9), 0.0, &mut rng).index()] += 1;
        }
        assert_eq!(counts[2], 0);
        let frac = counts[0] as f64 / draws as f64;
        assert!((frac - 0.5).abs() < 0.03, "left fraction {frac}");
    }

    #[test]
    fn full_exploration_is_uniform() {
        let mut t = QTable::new();
        t.set_values(&obs(9), [100.0, 0.0, 0.0]);
        let mut rng = rng_from_seed(2);
        let draws = 10_000;
        let mut counts = [0f64; 3];
        for _ in 0..draws {
            counts[t.select_action(&obs(9), 1.0, &mut rng).index()] += 1.0;
        }
        let expected = draws as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
        // 99.9% quantile of chi-square with 2 degrees of freedom.
        assert!(chi2 < 13.816, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn epsilon_schedule() {
        let p = LearnParams::default();
        assert_eq!(epsilon_at(0, &p), 0.99);
        assert!(epsilon_at(1, &p) < 0.99);
        assert_eq!(epsilon_at(1_000_000, &p), p.epsilon_min);
        let flat = LearnParams { epsilon_decay: 1.0, ..p };
        assert!((0..50_000).step_by(997).all(|e| epsilon_at(e, &flat) == 0.99));
        let mut prev = f64::INFINITY;
        for e in 0..30_000 {
            let eps = epsilon_at(e, &p);
            assert!(eps <= prev);
            prev = eps;
        }
    }

    #[test]
    fn learn_params_validation() {
        assert!(LearnParams::default().validate().is_ok());
        assert!(LearnParams { gamma: 1.5, ..Default::default() }.validate().is_err());
        assert!(LearnParams { nu: 0.0, ..Default::default() }.validate().is_err());
        assert!(LearnParams { epsilon_min: 0.995, ..Default::default() }.validate().is_err());
        assert!(LearnParams { epsilon_decay: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn greedy_episode_is_reproducible() {
        let cfg = GameConfig::new(8, 4, RewardParams::new(20.0, 1.5, 4), 17);
        let p = LearnParams::default();
        let run = || {
            let mut t = QTable::new();
            let mut rng = rng_from_seed(5);
            run_episode_recorded(&cfg, &mut t, &p, 0.0, &mut rng, false).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn baseline_return_counts_seeds_only() {
        let cfg = GameConfig::new(8, 4, RewardParams::new(20.0, 0.0, 0), 3);
        let p = LearnParams::default();
        let mut t = QTable::new();
        let mut rng = rng_from_seed(9);
        for ep in 0..300 {
            let stats = run_episode(&cfg.with_seed(ep), &mut t, &p, 0.3, &mut rng, true).unwrap();
            assert_eq!(stats.ret, 20.0 * stats.seeds_eaten as f64);
        }
    }

    #[test]
    fn observation_fields_used_as_keys() {
        let o = Observation {
            danger_left: true,
            danger_ahead: false,
            danger_right: true,
            seed: Bearing::Behind,
            drug: Bearing::AheadLeft,
            facing: Direction::Left,
        };
        let mut t = QTable::new();
        t.set_values(&o, [1.0, 2.0, 3.0]);
        assert_eq!(t.values(&Observation::from_key(o.key()).unwrap()), [1.0, 2.0, 3.0]);
    }
}
