//! Recorded games: the game config plus the action sequence is enough to
//! replay a trajectory exactly.

use std::io::Write;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snake::{render_ascii, GameConfig, GameState, RelativeAction, StepOutcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub game: GameConfig,
    pub actions: Vec<RelativeAction>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub text: String,
    pub outcome: Option<StepOutcome>,
    pub score: f64,
}

impl Trajectory {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trajectory serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "trajectory".into(),
            detail: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Re-simulates the game; the first frame is the initial state.
    pub fn frames(&self) -> Result<Vec<Frame>> {
        let mut state = GameState::new(self.game.clone())?;
        let mut frames = vec![Frame {
            text: render_ascii(&state),
            outcome: None,
            score: 0.0,
        }];
        for &action in &self.actions {
            let outcome = state.step(action)?;
            frames.push(Frame {
                text: render_ascii(&state),
                outcome: Some(outcome),
                score: state.cumulative_score(),
            });
        }
        Ok(frames)
    }
}

/// Prints every frame to `out`, pausing `1 / fps` seconds between frames
/// (no pause when `fps <= 0`).
pub fn replay(traj: &Trajectory, fps: f64, out: &mut impl Write) -> Result<()> {
    let pause = (fps > 0.0).then(|| Duration::from_secs_f64(1.0 / fps));
    let io = |e| Error::io("<stdout>", e);
    for (i, frame) in traj.frames()?.iter().enumerate() {
        let event = frame
            .outcome
            .map(|o| format!("{:?}", o.event))
            .unwrap_or_else(|| "start".into());
        writeln!(out, "frame {i} | score {} | {event}", frame.score).map_err(io)?;
        writeln!(out, "{}\n", frame.text).map_err(io)?;
        out.flush().map_err(io)?;
        if let Some(p) = pause {
            std::thread::sleep(p);
        }
    }
    Ok(())
}
