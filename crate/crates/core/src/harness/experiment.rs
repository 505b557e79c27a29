//! Multi-seed experiment execution over the benchmark environments.

use rand::rngs::StdRng;
use rand::SeedableRng;

use super::metrics::{pad_fictitious_episodes, EpisodeMetrics, RunMetrics};
use crate::env::{
    car_quantizer, car_step, cartpole_quantizer, cartpole_step, CarAction, CarGeometry, CarState,
    CartPoleAction, CartPoleParams, CartPoleState, Quantizer, Terminal,
};
use crate::error::{Error, Result};
use crate::learner::{LearnerConfig, Session};
use crate::StateId;

/// Which benchmark task an experiment runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    CarParking,
    CartPole,
}

impl EnvKind {
    pub fn parse(s: &str) -> Result<EnvKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "car" | "car-parking" | "car_parking" | "parking" => Ok(EnvKind::CarParking),
            "cartpole" | "cart-pole" | "cart_pole" | "pole" => Ok(EnvKind::CartPole),
            other => Err(Error::Parse(format!("unknown environment `{other}`"))),
        }
    }

    pub fn n_actions(self) -> usize {
        match self {
            EnvKind::CarParking => 3,
            EnvKind::CartPole => 2,
        }
    }
}

impl std::fmt::Display for EnvKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnvKind::CarParking => write!(f, "car-parking"),
            EnvKind::CartPole => write!(f, "cart-pole"),
        }
    }
}

/// Default per-episode step cap for car parking, guarding against
/// non-terminating policies. Capped episodes end with reward 0.
pub const CAR_EPISODE_STEP_CAP: u64 = 1000;

/// A complete experiment description: environment, learner, episode/run
/// counts, seeds, and step budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub environment: EnvKind,
    pub learner: LearnerConfig,
    pub episodes: usize,
    pub runs: usize,
    pub seeds: Vec<u64>,
    /// Total step budget per run; a run is truncated (and padded) when the
    /// budget runs out mid-episode.
    pub step_cap_total: Option<u64>,
    /// Width of the rolling metric window.
    pub metric_window: usize,
    /// Per-episode step cap; `None` means unbounded episodes.
    pub episode_step_cap: Option<u64>,
}

impl ExperimentSpec {
    pub fn new(environment: EnvKind, learner: LearnerConfig, episodes: usize, runs: usize) -> Self {
        ExperimentSpec {
            environment,
            learner,
            episodes,
            runs,
            seeds: (0..runs as u64).collect(),
            step_cap_total: None,
            metric_window: 5,
            episode_step_cap: match environment {
                EnvKind::CarParking => Some(CAR_EPISODE_STEP_CAP),
                EnvKind::CartPole => None,
            },
        }
    }

    /// Derive per-run seeds as `base_seed + run_index`.
    pub fn with_base_seed(mut self, base_seed: u64) -> Self {
        self.seeds = (0..self.runs as u64).map(|i| base_seed + i).collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.learner.validate()?;
        if self.episodes == 0 {
            return Err(Error::InvalidConfig("episodes must be >= 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be >= 1".into()));
        }
        if self.runs != self.seeds.len() {
            return Err(Error::InvalidConfig(format!(
                "runs = {} but {} seeds were supplied",
                self.runs,
                self.seeds.len()
            )));
        }
        if self.metric_window == 0 {
            return Err(Error::InvalidConfig("metric window must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-run metrics plus pointwise cross-run mean curves.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub spec_episodes: usize,
    pub metric_window: usize,
    pub runs: Vec<RunMetrics>,
    pub mean_duration: Vec<f64>,
    pub mean_total_reward: Vec<f64>,
    pub mean_avg_reward_per_step: Vec<f64>,
    /// Cross-run means of the per-run rolling windows.
    pub rolling_mean_duration: Vec<f64>,
    pub rolling_mean_avg_reward_per_step: Vec<f64>,
}

impl ExperimentResult {
    /// Mean over runs of the 1-based first-success episode, counting
    /// never-succeeding runs as `episodes + 1`.
    pub fn mean_first_success_episode(&self) -> f64 {
        let fallback = self.spec_episodes + 1;
        let total: usize = self
            .runs
            .iter()
            .map(|r| r.first_success_episode.unwrap_or(fallback))
            .sum();
        total as f64 / self.runs.len() as f64
    }

    /// Mean of the final `window` entries of a curve.
    pub fn final_window_mean(curve: &[f64], window: usize) -> f64 {
        let start = curve.len().saturating_sub(window);
        let tail = &curve[start..];
        tail.iter().sum::<f64>() / tail.len() as f64
    }
}

fn cross_run_mean<F: Fn(&EpisodeMetrics) -> f64>(
    runs: &[RunMetrics],
    episodes: usize,
    f: F,
) -> Vec<f64> {
    (0..episodes)
        .map(|i| runs.iter().map(|r| f(&r.episodes[i])).sum::<f64>() / runs.len() as f64)
        .collect()
}

fn mean_of_rollings<F: Fn(&EpisodeMetrics) -> f64 + Copy>(
    runs: &[RunMetrics],
    episodes: usize,
    window: usize,
    f: F,
) -> Vec<f64> {
    let rolled: Vec<Vec<f64>> = runs.iter().map(|r| r.rolling(window, f)).collect();
    (0..episodes)
        .map(|i| rolled.iter().map(|r| r[i]).sum::<f64>() / rolled.len() as f64)
        .collect()
}

/// Run every seed of the experiment and aggregate the curves. Runs execute
/// independently and deterministically; results are merged in seed order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let mut runs: Vec<RunMetrics> = Vec::with_capacity(spec.runs);
    if spec.runs > 1 {
        let results: Vec<Result<RunMetrics>> = std::thread::scope(|scope| {
            let handles: Vec<_> = spec
                .seeds
                .iter()
                .map(|&seed| scope.spawn(move || run_single(spec, seed)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("run thread panicked"))
                .collect()
        });
        for result in results {
            runs.push(result?);
        }
    } else {
        runs.push(run_single(spec, spec.seeds[0])?);
    }

    for run in &mut runs {
        if run.truncated {
            pad_fictitious_episodes(run, spec.episodes)?;
        }
    }

    let episodes = spec.episodes;
    Ok(ExperimentResult {
        spec_episodes: episodes,
        metric_window: spec.metric_window,
        mean_duration: cross_run_mean(&runs, episodes, |e| e.duration as f64),
        mean_total_reward: cross_run_mean(&runs, episodes, |e| e.total_reward),
        mean_avg_reward_per_step: cross_run_mean(&runs, episodes, |e| e.avg_reward_per_step),
        rolling_mean_duration: mean_of_rollings(&runs, episodes, spec.metric_window, |e| {
            e.duration as f64
        }),
        rolling_mean_avg_reward_per_step: mean_of_rollings(
            &runs,
            episodes,
            spec.metric_window,
            |e| e.avg_reward_per_step,
        ),
        runs,
    })
}

/// One seed's run: fresh session, `episodes` episodes (subject to the step
/// budget), per-episode metrics.
pub fn run_single(spec: &ExperimentSpec, seed: u64) -> Result<RunMetrics> {
    let mut session = Session::new(spec.learner.clone(), spec.environment.n_actions())?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut run = RunMetrics {
        seed,
        episodes: Vec::with_capacity(spec.episodes),
        first_success_episode: None,
        truncated: false,
        total_steps: 0,
    };

    let car_geometry = CarGeometry::default();
    let car_quant = car_quantizer();
    let pole_params = CartPoleParams::default();
    let pole_quant = cartpole_quantizer();

    'episodes: for episode_index in 1..=spec.episodes {
        let mut duration = 0u64;
        let mut total_reward = 0.0;
        let mut succeeded = false;

        match spec.environment {
            EnvKind::CarParking => {
                let mut state = CarState::INITIAL;
                loop {
                    let state_id = car_quant.quantize(&[state.x, state.y, state.theta]);
                    let sample = session.select_action(state_id, &mut rng)?;
                    let action = CarAction::from_index(sample.action).expect("3 actions");
                    let outcome = car_step(&state, action, &car_geometry)?;
                    duration += 1;
                    run.total_steps += 1;

                    let capped = spec
                        .episode_step_cap
                        .is_some_and(|cap| duration >= cap && outcome.terminal == Terminal::None);
                    if outcome.terminal.is_terminal() {
                        total_reward += outcome.reward;
                        succeeded = outcome.terminal == Terminal::Success;
                        session.finish_episode(state_id, sample.action, outcome.reward)?;
                    } else if capped {
                        // Cap reached: episode ends with the punishment
                        // suppressed. The transition was ordinary, so it is
                        // observed first and the pending window then flushes.
                        let next = &outcome.next_state;
                        let next_id = car_quant.quantize(&[next.x, next.y, next.theta]);
                        session.observe(state_id, sample.action, 0.0, next_id)?;
                        session.reset_operation()?;
                    } else {
                        let next = &outcome.next_state;
                        let next_id = car_quant.quantize(&[next.x, next.y, next.theta]);
                        session.observe(state_id, sample.action, outcome.reward, next_id)?;
                        state = outcome.next_state;
                    }

                    let budget_exhausted = spec
                        .step_cap_total
                        .is_some_and(|cap| run.total_steps >= cap);
                    if outcome.terminal.is_terminal() || capped {
                        break;
                    }
                    if budget_exhausted {
                        run.truncated = true;
                        run.episodes.push(EpisodeMetrics::new(duration, total_reward));
                        break 'episodes;
                    }
                }
            }
            EnvKind::CartPole => {
                let mut state = CartPoleState::START;
                loop {
                    let state_id = pole_quant
                        .quantize(&[state.x, state.x_dot, state.theta, state.theta_dot]);
                    let sample = session.select_action(state_id, &mut rng)?;
                    let action = CartPoleAction::from_index(sample.action).expect("2 actions");
                    let outcome = cartpole_step(&state, action, &pole_params)?;
                    duration += 1;
                    run.total_steps += 1;

                    if outcome.terminal.is_terminal() {
                        total_reward += outcome.reward;
                        session.finish_episode(state_id, sample.action, outcome.reward)?;
                        break;
                    }
                    let next = &outcome.next_state;
                    let next_id =
                        pole_quant.quantize(&[next.x, next.x_dot, next.theta, next.theta_dot]);
                    session.observe(state_id, sample.action, outcome.reward, next_id)?;
                    state = outcome.next_state;

                    if spec.step_cap_total.is_some_and(|cap| run.total_steps >= cap) {
                        run.truncated = true;
                        run.episodes.push(EpisodeMetrics::new(duration, total_reward));
                        break 'episodes;
                    }
                }
            }
        }

        run.episodes.push(EpisodeMetrics::new(duration, total_reward));
        if succeeded && run.first_success_episode.is_none() {
            run.first_success_episode = Some(episode_index);
        }
    }
    Ok(run)
}

/// State id of a continuous car pose under the standard quantizer.
pub fn car_state_id(state: &CarState, quantizer: &Quantizer) -> StateId {
    quantizer.quantize(&[state.x, state.y, state.theta])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TdConfig;
    use crate::learner::Algorithm;

    fn tiny_spec(environment: EnvKind) -> ExperimentSpec {
        let td = TdConfig::iterative(0.95, 0.9, 5).unwrap();
        let learner = LearnerConfig::new(Algorithm::Ahc, 0.25, 0.25, 0.02, td).unwrap();
        ExperimentSpec::new(environment, learner, 3, 2)
    }

    #[test]
    fn identical_seeds_give_identical_metrics() {
        let mut spec = tiny_spec(EnvKind::CarParking);
        spec.runs = 1;
        spec.seeds = vec![7];
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a.runs[0], b.runs[0]);
    }

    #[test]
    fn single_run_single_episode_is_one_row() {
        let mut spec = tiny_spec(EnvKind::CartPole);
        spec.runs = 1;
        spec.seeds = vec![0];
        spec.episodes = 1;
        let result = run_experiment(&spec).unwrap();
        assert_eq!(result.runs.len(), 1);
        assert_eq!(result.runs[0].episodes.len(), 1);
        assert!(result.runs[0].episodes[0].duration > 0);
    }

    #[test]
    fn seed_mismatch_is_rejected_before_running() {
        let mut spec = tiny_spec(EnvKind::CarParking);
        spec.seeds = vec![1];

        assert!(matches!(
            run_experiment(&spec),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn step_budget_truncates_and_pads() {
        let mut spec = tiny_spec(EnvKind::CartPole);
        spec.runs = 1;
        spec.seeds = vec![3];
        spec.episodes = 50;
        spec.step_cap_total = Some(200);
        let result = run_experiment(&spec).unwrap();
        let run = &result.runs[0];
        assert_eq!(run.episodes.len(), 50);
        assert!(run.episodes.iter().any(|e| e.padded));
        assert!(run.total_steps <= 200 + 1);
    }

    #[test]
    fn cross_run_mean_is_the_arithmetic_mean() {
        let spec = tiny_spec(EnvKind::CarParking);
        let result = run_experiment(&spec).unwrap();
        for i in 0..spec.episodes {
            let expected: f64 = result
                .runs
                .iter()
                .map(|r| r.episodes[i].duration as f64)
                .sum::<f64>()
                / result.runs.len() as f64;
            assert_eq!(result.mean_duration[i], expected);
        }
    }

    #[test]
    fn parallel_and_sequential_runs_agree() {
        let spec = tiny_spec(EnvKind::CarParking);
        let parallel = run_experiment(&spec).unwrap();
        for (i, &seed) in spec.seeds.iter().enumerate() {
            let sequential = run_single(&spec, seed).unwrap();
            assert_eq!(parallel.runs[i], sequential);
        }
    }
}
