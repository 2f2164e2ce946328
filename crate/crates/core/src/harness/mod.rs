//! Experiment orchestration and result emission.

mod charts;
mod config;
mod output;
mod run;
pub mod stats;
mod trajectory;

pub use charts::{
    consumption_summary, consumption_svg, emit_charts, test_score_summary, test_scores_svg, training_curves_svg,
    CONSUMPTION_SVG, TEST_SCORES_SVG, TRAINING_CURVES_SVG,
};
pub use config::{builtin_experiments, ExperimentConfig, DEFAULT_CURVE_WINDOW};
pub use output::{
    consumption_csv, emit_csv, emit_qtables, test_scores_csv, training_curve_csv, CONFIG_JSON, CONSUMPTION_CSV,
    TEST_SCORES_CSV, TRAINING_CURVE_CSV,
};
pub use run::{run_experiment, run_repeat, training_curve, CurvePoint, RepeatRecord, RunArtifacts};
pub use trajectory::{replay, Frame, Trajectory};
