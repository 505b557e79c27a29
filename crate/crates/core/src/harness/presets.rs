//! Named parameter presets for the benchmark studies.
//!
//! Car parking uses gamma = 0.95 and temperature 0.02 throughout; study 1
//! varies lambda at m = 25 (learning rates 0.7 for lambda 0, 0.5 for the
//! mid-range, 0.25 for 0.9 and 1), study 2 varies m at lambda = 0.9.
//! Cart-pole runs one configuration with near-deterministic selection.

use super::experiment::{EnvKind, ExperimentSpec};
use crate::config::TdConfig;
use crate::learner::{Algorithm, LearnerConfig};

fn car_spec(lambda: f64, m: usize, rates: f64) -> ExperimentSpec {
    let td = TdConfig::iterative(0.95, lambda, m).expect("valid preset");
    let learner = LearnerConfig::new(Algorithm::Ahc, rates, rates, 0.02, td).expect("valid preset");
    ExperimentSpec::new(EnvKind::CarParking, learner, 250, 25)
}

fn cartpole_spec() -> ExperimentSpec {
    let td = TdConfig::iterative(0.95, 0.9, 25).expect("valid preset");
    let learner = LearnerConfig::new(Algorithm::Ahc, 0.1, 0.05, 0.0001, td).expect("valid preset");
    let mut spec = ExperimentSpec::new(EnvKind::CartPole, learner, 100, 10);
    spec.step_cap_total = Some(500_000);
    spec
}

/// Look up a preset by name. Names:
/// `car-study1-lambda{0,0.3,0.5,0.7,0.8,0.9,1}`, `car-study2-m{5,10,15,20,25}`,
/// `cartpole`.
pub fn preset(name: &str) -> Option<ExperimentSpec> {
    match name.trim() {
        "car-study1-lambda0" => Some(car_spec(0.0, 25, 0.7)),
        "car-study1-lambda0.3" => Some(car_spec(0.3, 25, 0.5)),
        "car-study1-lambda0.5" => Some(car_spec(0.5, 25, 0.5)),
        "car-study1-lambda0.7" => Some(car_spec(0.7, 25, 0.5)),
        "car-study1-lambda0.8" => Some(car_spec(0.8, 25, 0.5)),
        "car-study1-lambda0.9" => Some(car_spec(0.9, 25, 0.25)),
        "car-study1-lambda1" => Some(car_spec(1.0, 25, 0.25)),
        "car-study2-m5" => Some(car_spec(0.9, 5, 0.25)),
        "car-study2-m10" => Some(car_spec(0.9, 10, 0.25)),
        "car-study2-m15" => Some(car_spec(0.9, 15, 0.25)),
        "car-study2-m20" => Some(car_spec(0.9, 20, 0.25)),
        "car-study2-m25" => Some(car_spec(0.9, 25, 0.25)),
        "cartpole" => Some(cartpole_spec()),
        _ => None,
    }
}

/// All preset names, for listings and error messages.
pub const PRESET_NAMES: [&str; 13] = [
    "car-study1-lambda0",
    "car-study1-lambda0.3",
    "car-study1-lambda0.5",
    "car-study1-lambda0.7",
    "car-study1-lambda0.8",
    "car-study1-lambda0.9",
    "car-study1-lambda1",
    "car-study2-m5",
    "car-study2-m10",
    "car-study2-m15",
    "car-study2-m20",
    "car-study2-m25",
    "cartpole",
];
