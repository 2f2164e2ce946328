//! Closed-form conditions under which a Q-learner prefers the drug.
//!
//! At a choice state the drug action is worth `k r_c + gamma V_g / l` and the
//! healthy action `r_c + gamma V_g`, where `l > 1` is how much lower the value
//! after the drug is. The drug is preferred iff
//! `(k - 1) r_c / (gamma (1 - 1/l)) > V_g`. Bounding `V_g` by the best possible
//! score `V_max = r_c (n^2 - L0)` gives the sufficient condition
//! `(k - 1) / gamma > n^2 - L0`; keeping the per-cell drug reward below the
//! seed's requires `k / u < 1`.
//!
//! All comparisons are strict and use plain IEEE arithmetic.

mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use oracle::{
    choice_mdp, oracle_sweep, sample_preference_inputs, vi_oracle, ChoiceAction, FiniteMdp, OracleReport,
    SweepReport, Transition, VI_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionInputs {
    pub k: f64,
    pub u: f64,
    pub r_c: f64,
    pub gamma: f64,
    pub n: u32,
    pub l0: u32,
}

impl ConditionInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::Domain(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        if !(self.r_c.is_finite() && self.r_c > 0.0) {
            return Err(Error::Domain(format!("r_c must be > 0, got {}", self.r_c)));
        }
        if !self.k.is_finite() {
            return Err(Error::Domain(format!("k must be finite, got {}", self.k)));
        }
        free_cells(self.n, self.l0).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreferenceInputs {
    pub k: f64,
    pub r_c: f64,
    pub gamma: f64,
    /// Value after the healthy action.
    pub v_g: f64,
    /// Ratio between the healthy and drug continuation values.
    pub l: f64,
}

impl PreferenceInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.l > 1.0) || !self.l.is_finite() {
            return Err(Error::Domain(format!("value ratio l must be > 1, got {}", self.l)));
        }
        if !(self.v_g >= 0.0) || !self.v_g.is_finite() {
            return Err(Error::Domain(format!("v_g must be >= 0, got {}", self.v_g)));
        }
        if !(self.gamma >= 0.0 && self.gamma <= 1.0) {
            return Err(Error::Domain(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        if !(self.k.is_finite() && self.r_c.is_finite()) {
            return Err(Error::Domain("k and r_c must be finite".into()));
        }
        Ok(())
    }

    /// Continuation value after the drug, `v_g / l`.
    pub fn v_m(&self) -> f64 {
        self.v_g / self.l
    }
}

fn free_cells(n: u32, l0: u32) -> Result<f64> {
    let cells = n as u64 * n as u64;
    if cells <= l0 as u64 {
        return Err(Error::Domain(format!("need n^2 > L0, got n = {n}, L0 = {l0}")));
    }
    Ok((cells - l0 as u64) as f64)
}

/// Upper bound on the game score, `r_c (n^2 - L0)`.
pub fn v_max(r_c: f64, n: u32, l0: u32) -> Result<f64> {
    Ok(r_c * free_cells(n, l0)?)
}

/// `(Q(s_d, drug), Q(s_d, healthy))`.
pub fn q_values_at_choice(inputs: &PreferenceInputs) -> Result<(f64, f64)> {
    inputs.validate()?;
    let q_drug = inputs.k * inputs.r_c + inputs.gamma * inputs.v_m();
    let q_healthy = inputs.r_c + inputs.gamma * inputs.v_g;
    Ok((q_drug, q_healthy))
}

/// Whether the drug action has strictly the higher Q-value.
pub fn addiction_preferred(inputs: &PreferenceInputs) -> Result<bool> {
    let (q_drug, q_healthy) = q_values_at_choice(inputs)?;
    Ok(q_drug > q_healthy)
}

/// The rearranged form `(k - 1) r_c / (gamma (1 - 1/l)) > v_g`.
///
/// Algebraically equal to [`addiction_preferred`] for `gamma > 0`; rounding
/// can separate the two within a few ulps of the boundary.
pub fn preference_threshold(inputs: &PreferenceInputs) -> Result<f64> {
    inputs.validate()?;
    if inputs.gamma == 0.0 {
        return Err(Error::Domain("gamma must be > 0 for the threshold form".into()));
    }
    Ok((inputs.k - 1.0) * inputs.r_c / (inputs.gamma * (1.0 - 1.0 / inputs.l)))
}

/// Sufficient condition `(k - 1) / gamma > n^2 - L0`.
pub fn sufficient_condition(inputs: &ConditionInputs) -> Result<bool> {
    inputs.validate()?;
    Ok((inputs.k - 1.0) / inputs.gamma > free_cells(inputs.n, inputs.l0)?)
}

/// Growth condition `k / u < 1`.
pub fn growth_condition(k: f64, u: f64) -> Result<bool> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("growth u must be > 0, got {u}")));
    }
    Ok(k / u < 1.0)
}

/// Smallest non-negative integer `k` meeting [`sufficient_condition`].
pub fn minimal_k(gamma: f64, n: u32, l0: u32) -> Result<u64> {
    let base = ConditionInputs {
        k: 0.0,
        u: 1.0,
        r_c: 1.0,
        gamma,
        n,
        l0,
    };
    base.validate()?;
    // The threshold is at most 1 + gamma * (n^2 - L0) <= 1 + n^2.
    let cap = 2 + free_cells(n, l0)? as u64;
    (0..=cap)
        .find(|&k| sufficient_condition(&ConditionInputs { k: k as f64, ..base }).unwrap_or(false))
        .ok_or_else(|| Error::Domain("no integer k satisfies the condition below the search cap".into()))
}

/// Everything the `analyze-conditions` command prints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub inputs: ConditionInputs,
    pub v_max: f64,
    pub sufficient: bool,
    /// `None` when `u = 0`, where the growth condition is undefined.
    pub growth: Option<bool>,
    pub minimal_k: u64,
}

pub fn condition_report(inputs: ConditionInputs) -> Result<ConditionReport> {
    inputs.validate()?;
    let growth = if inputs.u > 0.0 {
        Some(growth_condition(inputs.k, inputs.u)?)
    } else {
        None
    };
    Ok(ConditionReport {
        inputs,
        v_max: v_max(inputs.r_c, inputs.n, inputs.l0)?,
        sufficient: sufficient_condition(&inputs)?,
        growth,
        minimal_k: minimal_k(inputs.gamma, inputs.n, inputs.l0)?,
    })
}

impl std::fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let i = &self.inputs;
        writeln!(f, "inputs: k={} u={} r_c={} gamma={} n={} L0={}", i.k, i.u, i.r_c, i.gamma, i.n, i.l0)?;
        writeln!(f, "v_max = r_c * (n^2 - L0) = {}", self.v_max)?;
        writeln!(
            f,
            "sufficient condition (k-1)/gamma > n^2 - L0: {} ({} vs {})",
            self.sufficient,
            (i.k - 1.0) / i.gamma,
            (i.n as u64 * i.n as u64).saturating_sub(i.l0 as u64)
        )?;
        match self.growth {
            Some(g) => writeln!(f, "growth condition k/u < 1: {} (k/u = {})", g, i.k / i.u)?,
            None => writeln!(f, "growth condition k/u < 1: undefined (u = 0)")?,
        }
        write!(
            f,
            "minimal integer k for the sufficient condition at gamma={}, n={}, L0={}: {}",
            i.gamma, i.n, i.l0, self.minimal_k
        )
    }
}
