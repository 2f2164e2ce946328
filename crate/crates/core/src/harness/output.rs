//! CSV and JSON emission. Numbers use Rust's shortest round-trip `f64`
//! formatting, which is locale-independent and uses `.` as separator.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::run::RunArtifacts;
use crate::error::{Error, Result};
use crate::qlearn::save_snapshot;

pub const TRAINING_CURVE_CSV: &str = "training_curve.csv";
pub const TEST_SCORES_CSV: &str = "test_scores.csv";
pub const CONSUMPTION_CSV: &str = "consumption.csv";
pub const CONFIG_JSON: &str = "config.json";

pub fn training_curve_csv(art: &RunArtifacts) -> String {
    let mut out = String::from("bin_start_episode,mean_return,std_return\n");
    for p in &art.training_curve {
        writeln!(out, "{},{},{}", p.bin_start_episode, p.mean_return, p.std_return).unwrap();
    }
    out
}

pub fn test_scores_csv(art: &RunArtifacts) -> String {
    let mut out = String::from("repeat,episode,return\n");
    for rep in &art.repeats {
        for (i, stats) in rep.test.iter().enumerate() {
            writeln!(out, "{},{},{}", rep.repeat, i, stats.ret).unwrap();
        }
    }
    out
}

pub fn consumption_csv(art: &RunArtifacts) -> String {
    let mut out = String::from("repeat,seeds,drugs\n");
    for rep in &art.repeats {
        let (s, d) = rep.consumption();
        writeln!(out, "{},{},{}", rep.repeat, s, d).unwrap();
    }
    out
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes the four artifact files into `out_dir`, overwriting existing ones.
pub fn emit_csv(art: &RunArtifacts, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let files = [
        (TRAINING_CURVE_CSV, training_curve_csv(art)),
        (TEST_SCORES_CSV, test_scores_csv(art)),
        (CONSUMPTION_CSV, consumption_csv(art)),
        (CONFIG_JSON, art.config.to_json()),
    ];
    files
        .into_iter()
        .map(|(name, body)| {
            let path = out_dir.join(name);
            write_file(&path, &body)?;
            Ok(path)
        })
        .collect()
}

/// Saves each repeat's final Q-table as `repeat_NN.qtable` under `dir`.
pub fn emit_qtables(art: &RunArtifacts, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    art.repeats
        .iter()
        .map(|rep| {
            let path = dir.join(format!("repeat_{:02}.qtable", rep.repeat));
            save_snapshot(&rep.table, &path)?;
            Ok(path)
        })
        .collect()
}
