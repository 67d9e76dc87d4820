//! Experiment engine: configuration, trace verification and scaling runs.

mod config;
mod scaling;
mod summary;
mod verify;

pub use config::{parse_direction_choice, parse_selection, ExperimentConfig, StartSpec, KNOWN_CHECKS};
pub use scaling::{
    c1_assumption_holds, empirical_c1, fit_slope, run_experiment, run_single, window_counts, CheckResult,
    ScalingReport, ScalingRow, WindowCounts,
};
pub use summary::{summarize, RunSummary};
pub use verify::{verify_lemmas, LemmaCheck, LemmaReport};
