//! Flat `key = value` experiment files and CSV metric emission.

use std::collections::BTreeMap;

use super::experiment::{EnvKind, ExperimentResult, ExperimentSpec};
use super::presets::preset;
use crate::config::{Engine, TdConfig};
use crate::error::{Error, Result};
use crate::learner::{Algorithm, LearnerConfig};

/// Parse a flat key-value file: one `key = value` per line, `#` comments.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("line {}: expected `key = value`", line_no + 1))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Keys understood by [`build_spec`], mirrored by CLI flags and `TTD_*`
/// environment variables.
pub const SPEC_KEYS: [&str; 16] = [
    "preset",
    "env",
    "algo",
    "lambda",
    "m",
    "gamma",
    "alpha",
    "beta",
    "temperature",
    "episodes",
    "runs",
    "seed",
    "engine",
    "step_cap",
    "metric_window",
    "adaptive_lambda",
];

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Parse(format!("{key} = `{value}`: {e}")))
}

/// Assemble an experiment from key-value settings, starting from the named
/// preset when one is given (defaults otherwise). Unknown keys are rejected.
pub fn build_spec(settings: &BTreeMap<String, String>) -> Result<ExperimentSpec> {
    for key in settings.keys() {
        if !SPEC_KEYS.contains(&key.as_str()) {
            return Err(Error::Parse(format!("unknown setting `{key}`")));
        }
    }

    let mut spec = match settings.get("preset") {
        Some(name) => {
            preset(name).ok_or_else(|| Error::Parse(format!("unknown preset `{name}`")))?
        }
        None => {
            let environment = match settings.get("env") {
                Some(value) => EnvKind::parse(value)?,
                None => EnvKind::CarParking,
            };
            preset(match environment {
                EnvKind::CarParking => "car-study1-lambda0.9",
                EnvKind::CartPole => "cartpole",
            })
            .expect("built-in preset")
        }
    };

    if let Some(value) = settings.get("env") {
        let environment = EnvKind::parse(value)?;
        if environment != spec.environment {
            // Re-derive environment-dependent defaults.
            let episodes = spec.episodes;
            let runs = spec.runs;
            let learner = spec.learner.clone();
            let mut fresh = ExperimentSpec::new(environment, learner, episodes, runs);
            fresh.seeds = spec.seeds.clone();
            fresh.step_cap_total = spec.step_cap_total;
            fresh.metric_window = spec.metric_window;
            spec = fresh;
        }
    }

    let mut learner = spec.learner.clone();
    let mut td = learner.td;
    if let Some(v) = settings.get("algo") {
        learner.algorithm = Algorithm::parse(v)?;
    }
    if let Some(v) = settings.get("lambda") {
        td.lambda = parse_value("lambda", v)?;
    }
    if let Some(v) = settings.get("m") {
        td.m = parse_value("m", v)?;
    }
    if let Some(v) = settings.get("gamma") {
        td.gamma = parse_value("gamma", v)?;
    }
    if let Some(v) = settings.get("engine") {
        td.engine = Engine::parse(v)?;
    }
    // Revalidate the combined TD settings.
    td = TdConfig::new(td.gamma, td.lambda, td.m, td.engine)?;
    if let Some(v) = settings.get("alpha") {
        learner.alpha = parse_value("alpha", v)?;
    }
    if let Some(v) = settings.get("beta") {
        learner.beta = parse_value("beta", v)?;
    }
    if let Some(v) = settings.get("temperature") {
        learner.temperature = parse_value("temperature", v)?;
    }
    if let Some(v) = settings.get("adaptive_lambda") {
        learner.adaptive_lambda = parse_value("adaptive_lambda", v)?;
    }
    learner.td = td;
    LearnerConfig::new(
        learner.algorithm,
        learner.alpha,
        learner.beta,
        learner.temperature,
        learner.td,
    )?;
    spec.learner = {
        let validated = learner.clone();
        validated.validate()?;
        validated
    };

    if let Some(v) = settings.get("episodes") {
        spec.episodes = parse_value("episodes", v)?;
    }
    if let Some(v) = settings.get("runs") {
        spec.runs = parse_value("runs", v)?;
        spec.seeds = (0..spec.runs as u64).collect();
    }
    if let Some(v) = settings.get("seed") {
        let base: u64 = parse_value("seed", v)?;
        spec = spec.with_base_seed(base);
    }
    if let Some(v) = settings.get("step_cap") {
        spec.step_cap_total = Some(parse_value("step_cap", v)?);
    }
    if let Some(v) = settings.get("metric_window") {
        spec.metric_window = parse_value("metric_window", v)?;
    }
    spec.validate()?;
    Ok(spec)
}

/// CSV rows for one run: `episode,duration,total_reward,avg_reward_per_step,padded`.
pub fn run_csv(run: &super::metrics::RunMetrics) -> String {
    let mut out = String::from("episode,duration,total_reward,avg_reward_per_step,padded\n");
    for (i, e) in run.episodes.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            e.duration,
            e.total_reward,
            e.avg_reward_per_step,
            u8::from(e.padded)
        ));
    }
    out
}

/// Aggregate CSV across runs: pointwise means plus rolling-window curves.
pub fn aggregate_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(
        "episode,mean_duration,mean_total_reward,mean_avg_reward_per_step,\
         rolling_mean_duration,rolling_mean_avg_reward_per_step\n",
    );
    for i in 0..result.mean_duration.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i + 1,
            result.mean_duration[i],
            result.mean_total_reward[i],
            result.mean_avg_reward_per_step[i],
            result.rolling_mean_duration[i],
            result.rolling_mean_avg_reward_per_step[i],
        ));
    }
    out
}

/// Convert an aggregate CSV into gnuplot-ready whitespace-separated columns
/// with a `#`-prefixed header.
pub fn csv_to_plot_columns(csv: &str) -> Result<String> {
    let mut lines = csv.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let mut out = String::from("# ");
    out.push_str(&header.replace(',', " "));
    out.push('\n');
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        out.push_str(&line.replace(',', " "));
        out.push('\n');
    }
    Ok(out)
}
