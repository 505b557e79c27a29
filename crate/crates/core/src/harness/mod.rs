//! Experiment runner: multi-seed studies over the benchmark environments,
//! metrics files, and the randomized equivalence checks.

pub mod checks;
pub mod experiment;
pub mod metrics;
pub mod presets;
pub mod specfile;

pub use checks::{equivalence_report, CheckOutcome};
pub use experiment::{run_experiment, EnvKind, ExperimentResult, ExperimentSpec};
pub use metrics::{pad_fictitious_episodes, EpisodeMetrics, RunMetrics};
pub use presets::preset;
