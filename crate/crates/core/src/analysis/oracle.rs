//! Exact value iteration on explicit finite MDPs, used to check the
//! closed-form drug-preference rule independently.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{addiction_preferred, PreferenceInputs};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};

pub const VI_TOLERANCE: f64 = 1e-10;
const MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub next: usize,
    pub prob: f64,
    pub reward: f64,
}

/// States carry a list of actions, each a distribution over successors.
/// A state without actions is terminal and has value 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMdp {
    pub gamma: f64,
    pub actions: Vec<Vec<Vec<Transition>>>,
}

impl FiniteMdp {
    pub fn validate(&self) -> Result<()> {
        let n = self.actions.len();
        if n == 0 || n > 10_000 {
            return Err(Error::Domain(format!("state count must lie in 1..=10000, got {n}")));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Domain(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        for (s, acts) in self.actions.iter().enumerate() {
            for (a, dist) in acts.iter().enumerate() {
                let total: f64 = dist.iter().map(|t| t.prob).sum();
                if (total - 1.0).abs() > 1e-9 || dist.iter().any(|t| t.next >= n || t.prob < 0.0) {
                    return Err(Error::Domain(format!("state {s} action {a} is not a distribution over states")));
                }
            }
        }
        Ok(())
    }

    fn q(&self, values: &[f64], s: usize, a: usize) -> f64 {
        self.actions[s][a]
            .iter()
            .map(|t| t.prob * (t.reward + self.gamma * values[t.next]))
            .sum()
    }

    /// Value iteration until the largest per-sweep change is below `tol`.
    /// Returns `(values, greedy action per state, sweeps)`; greedy ties go
    /// to the lowest action index, terminal states report `None`.
    pub fn value_iteration(&self, tol: f64) -> Result<(Vec<f64>, Vec<Option<usize>>, usize)> {
        self.validate()?;
        let n = self.actions.len();
        let mut values = vec![0.0; n];
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            let mut next = vec![0.0; n];
            let mut residual = 0.0f64;
            for s in 0..n {
                if !self.actions[s].is_empty() {
                    next[s] = (0..self.actions[s].len())
                        .map(|a| self.q(&values, s, a))
                        .fold(f64::NEG_INFINITY, f64::max);
                }
                residual = residual.max((next[s] - values[s]).abs());
            }
            values = next;
            if residual < tol {
                break;
            }
            if sweeps >= MAX_SWEEPS {
                return Err(Error::NonConvergence { sweeps, residual });
            }
        }
        let policy = (0..n)
            .map(|s| {
                let mut best: Option<(usize, f64)> = None;
                for a in 0..self.actions[s].len() {
                    let q = self.q(&values, s, a);
                    if best.is_none_or(|(_, b)| q > b) {
                        best = Some((a, q));
                    }
                }
                best.map(|(a, _)| a)
            })
            .collect();
        Ok((values, policy, sweeps))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChoiceAction {
    Healthy,
    Drug,
}

/// State indices of [`choice_mdp`].
pub mod states {
    pub const CHOICE: usize = 0;
    pub const AFTER_HEALTHY: usize = 1;
    pub const AFTER_DRUG: usize = 2;
    pub const TERMINAL: usize = 3;
}

/// Explicit MDP for a single drug-or-seed decision.
///
/// The choice state has action 0 (healthy: reward `r_c`, go to the healthy
/// successor) and action 1 (drug: reward `k r_c`, go to the drug successor).
/// Each successor pays its continuation value (`v_g`, resp. `v_g / l`) in a
/// single transition to an absorbing terminal.
pub fn choice_mdp(inputs: &PreferenceInputs) -> Result<FiniteMdp> {
    inputs.validate()?;
    let to = |next, reward| vec![Transition { next, prob: 1.0, reward }];
    Ok(FiniteMdp {
        gamma: inputs.gamma,
        actions: vec![
            vec![
                to(states::AFTER_HEALTHY, inputs.r_c),
                to(states::AFTER_DRUG, inputs.k * inputs.r_c),
            ],
            vec![to(states::TERMINAL, inputs.v_g)],
            vec![to(states::TERMINAL, inputs.v_g / inputs.l)],
            vec![],
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub values: Vec<f64>,
    pub action: ChoiceAction,
    pub q_healthy: f64,
    pub q_drug: f64,
    pub sweeps: usize,
}

/// Solves [`choice_mdp`] by value iteration and reports the optimal action
/// at the choice state. The drug is chosen only when strictly better.
pub fn vi_oracle(inputs: &PreferenceInputs) -> Result<OracleReport> {
    let mdp = choice_mdp(inputs)?;
    let (values, policy, sweeps) = mdp.value_iteration(VI_TOLERANCE)?;
    let action = match policy[states::CHOICE] {
        Some(1) => ChoiceAction::Drug,
        _ => ChoiceAction::Healthy,
    };
    Ok(OracleReport {
        q_healthy: mdp.q(&values, states::CHOICE, 0),
        q_drug: mdp.q(&values, states::CHOICE, 1),
        values,
        action,
        sweeps,
    })
}

/// Random inputs with `l > 1`, `v_g > 0` and `gamma > 0`, so the drug
/// successor is strictly worse than the healthy one. `k` is spread over
/// twice the indifference point, so both outcomes occur.
pub fn sample_preference_inputs(rng: &mut Rng) -> PreferenceInputs {
    let r_c = rng.gen_range(1.0..50.0);
    let gamma = rng.gen_range(0.05..=1.0);
    let v_g = rng.gen_range(0.5..2000.0);
    let l = rng.gen_range(1.001..10.0);
    let k_star = 1.0 + gamma * v_g * (1.0 - 1.0 / l) / r_c;
    let k = rng.gen_range(0.0..2.0 * k_star);
    PreferenceInputs { k, r_c, gamma, v_g, l }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub samples: usize,
    pub premise_held: usize,
    pub agreements: usize,
    pub drug_optimal: usize,
    pub disagreements: Vec<PreferenceInputs>,
}

impl SweepReport {
    pub fn all_agree(&self) -> bool {
        self.disagreements.is_empty() && self.agreements == self.premise_held
    }
}

/// Compares [`vi_oracle`] with [`addiction_preferred`] on `samples` random
/// instances drawn from `seed`.
pub fn oracle_sweep(samples: usize, seed: u64) -> Result<SweepReport> {
    let mut rng = rng_from_seed(seed);
    let mut report = SweepReport {
        samples,
        premise_held: 0,
        agreements: 0,
        drug_optimal: 0,
        disagreements: Vec::new(),
    };
    for _ in 0..samples {
        let inputs = sample_preference_inputs(&mut rng);
        // Drug continuation must be strictly worse after discounting.
        if !(inputs.gamma * inputs.v_m() < inputs.gamma * inputs.v_g) {
            continue;
        }
        report.premise_held += 1;
        let oracle = vi_oracle(&inputs)?;
        let predicted = addiction_preferred(&inputs)?;
        if oracle.action == ChoiceAction::Drug {
            report.drug_optimal += 1;
        }
        if (oracle.action == ChoiceAction::Drug) == predicted {
            report.agreements += 1;
        } else {
            report.disagreements.push(inputs);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drug_branch_wins_in_worked_example() {
        let inputs = PreferenceInputs { k: 6.0, r_c: 20.0, gamma: 0.9, v_g: 100.0, l: 2.0 };
        let r = vi_oracle(&inputs).unwrap();
        assert_eq!(r.action, ChoiceAction::Drug);
        assert_eq!((r.q_drug, r.q_healthy), (165.0, 110.0));
        assert_eq!(r.values[states::CHOICE], 165.0);
        assert_eq!(r.values[states::AFTER_DRUG], 50.0);
    }

    #[test]
    fn worthless_drug_is_dominated() {
        let inputs = PreferenceInputs { k: 0.0, r_c: 20.0, gamma: 0.9, v_g: 1e-9, l: 1e9 };
        assert_eq!(vi_oracle(&inputs).unwrap().action, ChoiceAction::Healthy);
    }

    #[test]
    fn ties_go_to_healthy() {
        let inputs = PreferenceInputs { k: 1.5, r_c: 20.0, gamma: 0.5, v_g: 40.0, l: 2.0 };
        assert_eq!(vi_oracle(&inputs).unwrap().action, ChoiceAction::Healthy);
    }

    #[test]
    fn cyclic_undiscounted_mdp_does_not_converge() {
        let mdp = FiniteMdp {
            gamma: 1.0,
            actions: vec![vec![vec![Transition { next: 0, prob: 1.0, reward: 1.0 }]]],
        };
        assert!(matches!(mdp.value_iteration(VI_TOLERANCE), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn discounted_loop_matches_geometric_series() {
        let mdp = FiniteMdp {
            gamma: 0.5,
            actions: vec![vec![
                vec![Transition { next: 0, prob: 1.0, reward: 1.0 }],
                vec![Transition { next: 0, prob: 1.0, reward: 0.5 }],
            ]],
        };
        let (v, policy, _) = mdp.value_iteration(VI_TOLERANCE).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-9);
        assert_eq!(policy[0], Some(0));
    }

    #[test]
    fn rejects_bad_distributions() {
        let mdp = FiniteMdp {
            gamma: 0.5,
            actions: vec![vec![vec![Transition { next: 0, prob: 0.5, reward: 1.0 }]]],
        };
        assert!(mdp.validate().is_err());
    }

    #[test]
    fn sweep_agrees_everywhere() {
        let report = oracle_sweep(600, 2024).unwrap();
        assert!(report.premise_held >= 500);
        assert!(report.all_agree(), "{:?}", report.disagreements);
        // Both outcomes are represented.
        assert!(report.drug_optimal > 100 && report.drug_optimal < report.premise_held - 100);
    }
}
