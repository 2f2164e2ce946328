//! State-value TD learning with a non-compensable drug surge.
//!
//! On a transition `s -> s'` the reward-error signal is
//! `delta = gamma * (R(s') + V(s')) - V(s)` and the value update is
//! `V(s) += nu * delta`. When `s'` is a drug state the signal is replaced by
//! `max(delta + D, D)`: whatever the learned values are, the error on the
//! drug transition never drops below `D`, so the value of the state leading
//! to the drug grows without bound.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which reward-error formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TdVariant {
    /// `gamma * (R(s') + V(s')) - V(s)`; the discount multiplies the reward too.
    #[default]
    Verbatim,
    /// `R(s') + gamma * V(s') - V(s)`.
    Standard,
}

/// A deterministic chain: every non-terminal state has exactly one successor.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMdp {
    /// `R(s)`, received on entering `s`.
    rewards: Vec<f64>,
    successors: Vec<Option<usize>>,
    drug_states: BTreeSet<usize>,
    start: usize,
}

impl ChainMdp {
    /// Linear chain `0 -> 1 -> ... -> num_states - 1`, the last state terminal.
    pub fn linear(rewards: Vec<f64>, drug_states: impl IntoIterator<Item = usize>) -> Result<Self> {
        let n = rewards.len();
        let successors = (0..n).map(|s| if s + 1 < n { Some(s + 1) } else { None }).collect();
        Self::new(rewards, successors, drug_states, 0)
    }

    pub fn new(
        rewards: Vec<f64>,
        successors: Vec<Option<usize>>,
        drug_states: impl IntoIterator<Item = usize>,
        start: usize,
    ) -> Result<Self> {
        let n = rewards.len();
        if n < 2 {
            return Err(Error::Config("a chain needs at least two states".into()));
        }
        if successors.len() != n {
            return Err(Error::Config("one successor entry per state is required".into()));
        }
        if let Some(r) = rewards.iter().find(|r| !r.is_finite()) {
            return Err(Error::Config(format!("non-finite reward {r}")));
        }
        if start >= n {
            return Err(Error::Config(format!("start state {start} out of range")));
        }
        if let Some(bad) = successors.iter().flatten().find(|&&s| s >= n) {
            return Err(Error::Config(format!("successor {bad} out of range")));
        }
        let drug_states: BTreeSet<usize> = drug_states.into_iter().collect();
        if let Some(bad) = drug_states.iter().find(|&&s| s >= n) {
            return Err(Error::Config(format!("drug state {bad} out of range")));
        }
        let mdp = Self {
            rewards,
            successors,
            drug_states,
            start,
        };
        if mdp.path().len() > n {
            return Err(Error::Config("chain contains a cycle; it must end in a terminal state".into()));
        }
        Ok(mdp)
    }

    pub fn num_states(&self) -> usize {
        self.rewards.len()
    }

    pub fn reward(&self, s: usize) -> f64 {
        self.rewards[s]
    }

    pub fn is_drug(&self, s: usize) -> bool {
        self.drug_states.contains(&s)
    }

    pub fn successor(&self, s: usize) -> Option<usize> {
        self.successors[s]
    }

    /// States visited by one trial, start to terminal. Stops after
    /// `num_states + 1` entries if the successor map cycles.
    pub fn path(&self) -> Vec<usize> {
        let mut path = vec![self.start];
        let mut s = self.start;
        while let Some(next) = self.successors[s] {
            path.push(next);
            if path.len() > self.num_states() {
                break;
            }
            s = next;
        }
        path
    }

    /// States whose successor is a drug state.
    pub fn pre_drug_states(&self) -> Vec<usize> {
        (0..self.num_states())
            .filter(|&s| self.successors[s].is_some_and(|n| self.is_drug(n)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdrlModel {
    values: Vec<f64>,
    pub nu: f64,
    pub gamma: f64,
    /// Drug surge magnitude `D`.
    pub surge: f64,
    pub variant: TdVariant,
}

impl TdrlModel {
    pub fn new(num_states: usize, nu: f64, gamma: f64, surge: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0 && nu <= 1.0) {
            return Err(Error::Config(format!("nu must lie in (0, 1], got {nu}")));
        }
        if !(gamma.is_finite() && (0.0..=1.0).contains(&gamma)) {
            return Err(Error::Config(format!("gamma must lie in [0, 1], got {gamma}")));
        }
        if !(surge.is_finite() && surge >= 0.0) {
            return Err(Error::Config(format!("drug surge D must be finite and >= 0, got {surge}")));
        }
        Ok(Self {
            values: vec![0.0; num_states],
            nu,
            gamma,
            surge,
            variant: TdVariant::Verbatim,
        })
    }

    pub fn with_variant(mut self, variant: TdVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, s: usize) -> f64 {
        self.values[s]
    }

    pub fn set_value(&mut self, s: usize, v: f64) {
        self.values[s] = v;
    }

    /// Reward-error signal for `s -> s_next` with `reward = R(s_next)`.
    pub fn td_delta(&self, s: usize, s_next: usize, reward: f64) -> f64 {
        match self.variant {
            TdVariant::Verbatim => self.gamma * (reward + self.values[s_next]) - self.values[s],
            TdVariant::Standard => reward + self.gamma * self.values[s_next] - self.values[s],
        }
    }

    /// `V(s) += nu * delta`.
    pub fn value_update(&mut self, s: usize, delta: f64) {
        self.values[s] += self.nu * delta;
    }
}

/// Surge-adjusted reward error: `max(delta + D, D)`, and `delta` itself when `D = 0`.
pub fn apply_surge(delta: f64, surge: f64) -> Result<f64> {
    if !(surge >= 0.0) {
        return Err(Error::Config(format!("drug surge D must be >= 0, got {surge}")));
    }
    if surge == 0.0 {
        return Ok(delta);
    }
    Ok((delta + surge).max(surge))
}

/// Value table after every trial, plus the applied reward errors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValueHistory {
    /// `values[t][s]`: V(s) after trial `t + 1`.
    pub values: Vec<Vec<f64>>,
    /// `deltas[t][i]`: applied error on the i-th transition of trial `t + 1`.
    pub deltas: Vec<Vec<f64>>,
}

impl ValueHistory {
    pub fn trials(&self) -> usize {
        self.values.len()
    }

    /// Trajectory of one state's value across trials.
    pub fn series(&self, s: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[s]).collect()
    }

    /// Largest `|delta|` over the transitions of the last trial.
    pub fn final_max_abs_delta(&self) -> f64 {
        self.deltas
            .last()
            .map(|d| d.iter().fold(0.0f64, |m, x| m.max(x.abs())))
            .unwrap_or(0.0)
    }

    /// CSV with columns `trial,state_index,value`, trials numbered from 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,state_index,value\n");
        for (t, row) in self.values.iter().enumerate() {
            for (s, v) in row.iter().enumerate() {
                writeln!(out, "{},{},{}", t + 1, s, v).unwrap();
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Runs `num_trials` start-to-terminal passes over the chain, updating the
/// model in place and recording values after each pass.
pub fn simulate_trials(mdp: &ChainMdp, model: &mut TdrlModel, num_trials: usize) -> Result<ValueHistory> {
    if model.values.len() != mdp.num_states() {
        return Err(Error::Config(format!(
            "model has {} states but the chain has {}",
            model.values.len(),
            mdp.num_states()
        )));
    }
    let path = mdp.path();
    let mut history = ValueHistory {
        values: Vec::with_capacity(num_trials),
        deltas: Vec::with_capacity(num_trials),
    };
    for _ in 0..num_trials {
        let mut deltas = Vec::with_capacity(path.len() - 1);
        for pair in path.windows(2) {
            let (s, next) = (pair[0], pair[1]);
            let mut delta = model.td_delta(s, next, mdp.reward(next));
            if mdp.is_drug(next) {
                delta = apply_surge(delta, model.surge)?;
            }
            model.value_update(s, delta);
            deltas.push(delta);
        }
        history.values.push(model.values.clone());
        history.deltas.push(deltas);
    }
    Ok(history)
}
