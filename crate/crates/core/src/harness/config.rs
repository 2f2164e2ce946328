use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlearn::LearnParams;
use crate::snake::{GameConfig, RewardParams};

pub const DEFAULT_CURVE_WINDOW: u64 = 100;

/// Everything that determines an experiment's output.
///
/// `game.rng_seed` is not used by [`run_experiment`](super::run_experiment):
/// every episode gets its own seed derived from `master_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub label: String,
    pub game: GameConfig,
    pub learn: LearnParams,
    /// Training episodes per repeat.
    pub episodes: u64,
    /// Independent training runs.
    pub repeats: u32,
    /// Greedy evaluation episodes per repeat.
    pub test_episodes: u32,
    pub master_seed: u64,
    /// Episodes per training-curve bin.
    #[serde(default = "default_window")]
    pub curve_window: u64,
}

fn default_window() -> u64 {
    DEFAULT_CURVE_WINDOW
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.label.is_empty() || self.label.contains(['/', '\\']) || self.label == "." || self.label == ".." {
            return Err(Error::Config(format!("label `{}` is not usable as a directory name", self.label)));
        }
        if self.episodes < 1 {
            return Err(Error::Config("episodes must be >= 1".into()));
        }
        if self.repeats < 1 {
            return Err(Error::Config("repeats must be >= 1".into()));
        }
        if self.test_episodes < 1 {
            return Err(Error::Config("test_episodes must be >= 1".into()));
        }
        if self.curve_window < 1 {
            return Err(Error::Config("curve_window must be >= 1".into()));
        }
        self.game.validate()?;
        self.learn.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "experiment config".into(),
            detail: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}

/// The three reference experiments: baseline (k = u = 0), a mild drug
/// (k = 1.5, u = 4) and a strong drug (k = 6, u = 8), on an 8x8 grid with
/// L0 = 4, r_c = 20, gamma = 0.9, epsilon0 = 0.99, 22,000 training episodes,
/// 20 repeats and 100 test episodes.
pub fn builtin_experiments(master_seed: u64) -> [ExperimentConfig; 3] {
    let make = |label: &str, k: f64, u: u32| ExperimentConfig {
        label: label.to_string(),
        game: GameConfig::new(8, 4, RewardParams::new(20.0, k, u), 0),
        learn: LearnParams::default(),
        episodes: 22_000,
        repeats: 20,
        test_episodes: 100,
        master_seed,
        curve_window: DEFAULT_CURVE_WINDOW,
    };
    [
        make("e1_baseline", 0.0, 0),
        make("e2_k1.5_u4", 1.5, 4),
        make("e3_k6_u8", 6.0, 8),
    ]
}
