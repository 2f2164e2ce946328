use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::stats::{mean, sample_std};
use crate::error::Result;
use crate::qlearn::{epsilon_at, run_episode, EpisodeStats, QTable};
use crate::rng::{derive_seed, label, repeat_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub bin_start_episode: u64,
    pub mean_return: f64,
    pub std_return: f64,
}

/// One independent training run and its evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatRecord {
    pub repeat: u32,
    pub seed: u64,
    /// Return of every training episode.
    pub train_returns: Vec<f64>,
    pub test: Vec<EpisodeStats>,
    pub table: QTable,
}

impl RepeatRecord {
    pub fn test_returns(&self) -> Vec<f64> {
        self.test.iter().map(|s| s.ret).collect()
    }

    pub fn mean_test_return(&self) -> f64 {
        mean(&self.test_returns())
    }

    /// `(seeds, drugs)` summed over the test episodes.
    pub fn consumption(&self) -> (u64, u64) {
        self.test.iter().fold((0, 0), |(s, d), e| {
            (s + e.seeds_eaten as u64, d + e.drugs_eaten as u64)
        })
    }

    /// Mean training return over the last `window` episodes.
    pub fn final_window_mean(&self, window: usize) -> f64 {
        let start = self.train_returns.len().saturating_sub(window);
        mean(&self.train_returns[start..])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub config: ExperimentConfig,
    pub training_curve: Vec<CurvePoint>,
    /// In repeat-index order.
    pub repeats: Vec<RepeatRecord>,
}

impl RunArtifacts {
    pub fn label(&self) -> &str {
        &self.config.label
    }

    pub fn per_repeat_mean_test_return(&self) -> Vec<f64> {
        self.repeats.iter().map(RepeatRecord::mean_test_return).collect()
    }

    /// Mean seeds and drugs per test episode, one pair per repeat.
    pub fn per_repeat_mean_consumption(&self) -> Vec<(f64, f64)> {
        self.repeats
            .iter()
            .map(|r| {
                let (s, d) = r.consumption();
                let n = r.test.len() as f64;
                (s as f64 / n, d as f64 / n)
            })
            .collect()
    }
}

/// Trains and evaluates one repeat.
///
/// Seeds: the repeat seed is `repeat_seed(master_seed, repeat)`; the agent's
/// exploration stream, each training game and each test game draw from
/// their own streams derived from it (see [`crate::rng`]).
pub fn run_repeat(config: &ExperimentConfig, repeat: u32) -> Result<RepeatRecord> {
    let seed = repeat_seed(config.master_seed, repeat as u64);
    let mut table = QTable::new();
    let mut agent_rng = rng_from_seed(derive_seed(seed, label::AGENT, 0));
    let mut train_returns = Vec::with_capacity(config.episodes as usize);
    for episode in 0..config.episodes {
        let game = config.game.with_seed(derive_seed(seed, label::TRAIN_ENV, episode));
        let eps = epsilon_at(episode, &config.learn);
        let stats = run_episode(&game, &mut table, &config.learn, eps, &mut agent_rng, true)?;
        train_returns.push(stats.ret);
    }
    let mut test_rng = rng_from_seed(derive_seed(seed, label::TEST_AGENT, 0));
    let test = (0..config.test_episodes as u64)
        .map(|t| {
            let game = config.game.with_seed(derive_seed(seed, label::TEST_ENV, t));
            run_episode(&game, &mut table, &config.learn, 0.0, &mut test_rng, false)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RepeatRecord {
        repeat,
        seed,
        train_returns,
        test,
        table,
    })
}

/// Training curve: per-repeat mean return in consecutive `window`-episode
/// bins (the last bin may be shorter), then mean and sample standard
/// deviation of those per-repeat bin means across repeats.
pub fn training_curve(repeats: &[RepeatRecord], episodes: u64, window: u64) -> Vec<CurvePoint> {
    let episodes = episodes as usize;
    let window = window as usize;
    (0..episodes)
        .step_by(window)
        .map(|start| {
            let end = (start + window).min(episodes);
            let bin_means: Vec<f64> = repeats.iter().map(|r| mean(&r.train_returns[start..end])).collect();
            CurvePoint {
                bin_start_episode: start as u64,
                mean_return: mean(&bin_means),
                std_return: sample_std(&bin_means),
            }
        })
        .collect()
}

/// Runs every repeat (concurrently when threads are available) and
/// aggregates in repeat order, so the result depends only on the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let repeats = (0..config.repeats)
        .into_par_iter()
        .map(|r| run_repeat(config, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunArtifacts {
        training_curve: training_curve(&repeats, config.episodes, config.curve_window),
        config: config.clone(),
        repeats,
    })
}
