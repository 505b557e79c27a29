//! Randomized equivalence and invariant checks behind the `check` command.
//!
//! Every check draws its inputs from one seeded generator, records the worst
//! deviation it observed, and compares it against the stated tolerance, so a
//! seeded run reproduces identical statistics. The car-parking shortest-path
//! verification is deliberately not here: it is exhaustive rather than
//! randomized and has its own command.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::experiment::{run_single, EnvKind, ExperimentSpec};
use super::metrics::{pad_fictitious_episodes, EpisodeMetrics, RunMetrics};
use crate::buffer::{ExperienceBuffer, ExperienceRecord};
use crate::config::TdConfig;
use crate::env::{
    car_quantizer, car_step, cartpole_derivatives, cartpole_quantizer, cartpole_step,
    mechanical_energy, CarAction, CarGeometry, CarState, CartPoleAction, CartPoleParams,
    CartPoleState,
};
use crate::incremental::{resync, IncrementalEngine};
use crate::learner::{Algorithm, LearnerConfig, Session};
use crate::log::{td_lambda_return_offline, EpisodeLog, EpisodeStep};
use crate::policy::boltzmann_select;
use crate::returns::{td0_error, ttd_return_iterative};
use crate::table::{Arity, TableKey, TabularFunction};
use crate::traces::{traces_learning_step, TraceTable};
use crate::{ActionId, StateId};

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, max_deviation: f64, tolerance: f64, detail: String) -> Self {
        CheckOutcome {
            name,
            passed: max_deviation.is_finite() && max_deviation <= tolerance,
            max_deviation,
            tolerance,
            detail,
        }
    }

    fn boolean(name: &'static str, passed: bool, detail: String) -> Self {
        CheckOutcome {
            name,
            passed,
            max_deviation: if passed { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail,
        }
    }
}

/// Run the full randomized suite. `trials` scales every check's sample count;
/// zero trials yields an empty (vacuously passing) report.
pub fn equivalence_report(trials: usize, seed: u64) -> Vec<CheckOutcome> {
    if trials == 0 {
        return Vec::new();
    }
    let mut rng = StdRng::seed_from_u64(seed);
    vec![
        check_iterative_vs_closed_form(trials, &mut rng),
        check_incremental_vs_iterative(trials, &mut rng),
        check_resync_exactness(trials, &mut rng),
        check_batch_attribution(trials, &mut rng),
        check_truncation_bound(trials, &mut rng),
        check_trace_closed_form(trials, &mut rng),
        check_lambda_endpoints(trials, &mut rng),
        check_boltzmann(trials, &mut rng),
        check_m1_reduction(trials, &mut rng),
        check_reset_completeness(trials, &mut rng),
        check_ahc_coupling(trials, &mut rng),
        check_quantizer_counts(),
        check_environment_determinism(trials, &mut rng),
        check_car_rigid_body(trials, &mut rng),
        check_cartpole_energy_drift(),
        check_run_reproducibility(&mut rng),
        check_cross_run_mean(trials, &mut rng),
        check_padding_rule(trials, &mut rng),
    ]
}

fn random_window(rng: &mut StdRng, m: usize) -> ExperienceBuffer {
    let mut buffer = ExperienceBuffer::new(m);
    for _ in 0..m {
        buffer.push(ExperienceRecord::new(
            0,
            0,
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ));
    }
    buffer
}

/// Direct term-by-term evaluation of the truncated-return definition over a
/// window in oldest-first order.
fn closed_form_return(buffer: &ExperienceBuffer, config: &TdConfig) -> f64 {
    let m = buffer.len();
    let gl = config.gamma_lambda();
    let mut total = 0.0;
    let mut weight = 1.0;
    for k in 0..m {
        let record = buffer.get(m - 1 - k).expect("in range");
        total += weight * record.reward;
        if k < m - 1 {
            total += weight * config.gamma * (1.0 - config.lambda) * record.stored_utility;
        } else {
            total += weight * config.gamma * record.stored_utility;
        }
        weight *= gl;
    }
    total
}

fn check_iterative_vs_closed_form(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut max_dev = 0.0_f64;
    for _ in 0..trials {
        let m = rng.random_range(1..=60);
        let config = TdConfig::iterative(rng.random(), rng.random(), m).unwrap();
        let buffer = random_window(rng, m);
        let z = ttd_return_iterative(&buffer, &config).unwrap();
        let oracle = closed_form_return(&buffer, &config);
        max_dev = max_dev.max((z - oracle).abs() / 1.0_f64.max(oracle.abs()));
    }
    CheckOutcome::new(
        "iterative-vs-closed-form",
        max_dev,
        1e-12,
        format!("{trials} random windows, m in 1..=60"),
    )
}

fn check_incremental_vs_iterative(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut max_dev = 0.0_f64;
    let steps_per_cell = (trials * 20).clamp(200, 100_000);
    let mut cells = 0;
    for &gl_target in &[0.3_f64, 0.855, 0.99] {
        for &m in &[2usize, 25, 200] {
            let gamma = rng.random_range(gl_target.max(0.5)..1.0);
            let lambda = gl_target / gamma;
            let config = TdConfig::incremental(gamma, lambda, m).unwrap();
            let mut buffer = random_window(rng, m);
            let mut engine = IncrementalEngine::new(&config, 1000).unwrap();
            engine.prime(&buffer, &config).unwrap();
            for _ in 0..steps_per_cell {
                let departing = *buffer.oldest().unwrap();
                buffer.push(ExperienceRecord::new(
                    0,
                    0,
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ));
                let z = engine.advance(&departing, &buffer, &config).unwrap();
                let reference = ttd_return_iterative(&buffer, &config).unwrap();
                max_dev = max_dev.max((z - reference).abs() / 1.0_f64.max(reference.abs()));
            }
            cells += 1;
        }
    }
    CheckOutcome::new(
        "incremental-vs-iterative",
        max_dev,
        1e-9,
        format!("{cells} (gamma*lambda, m) cells x {steps_per_cell} steps, resync capped at 1000"),
    )
}

fn check_resync_exactness(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut max_dev = 0.0_f64;
    for _ in 0..trials {
        let m = rng.random_range(1..=40);
        let gamma = rng.random_range(0.3..1.0);
        let lambda = rng.random_range(0.1..1.0);
        let config = TdConfig::incremental(gamma, lambda, m).unwrap();
        let buffer = random_window(rng, m);
        let state = resync(&buffer, &config).unwrap();
        let reference = ttd_return_iterative(&buffer, &config).unwrap();
        max_dev = max_dev.max((state.value() - reference).abs() / 1.0_f64.max(reference.abs()));
    }
    CheckOutcome::new(
        "resync-defining-sums",
        max_dev,
        1e-12,
        format!("{trials} freshly recomputed windows"),
    )
}

/// A finite absorbing trajectory with frozen per-state utilities.
struct FrozenTrajectory {
    states: Vec<StateId>,
    rewards: Vec<f64>,
    utilities: Vec<f64>,
}

impl FrozenTrajectory {
    fn random(rng: &mut StdRng) -> Self {
        let n_states = rng.random_range(2..=10u32);
        let len = rng.random_range(1..=50usize);
        let states = (0..len).map(|_| rng.random_range(0..n_states)).collect();
        let rewards = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        let utilities = (0..n_states as usize)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        FrozenTrajectory {
            states,
            rewards,
            utilities,
        }
    }

    fn len(&self) -> usize {
        self.states.len()
    }

    /// Utility of the successor of step t (0 past the terminal).
    fn successor_utility(&self, t: usize) -> f64 {
        if t + 1 < self.len() {
            self.utilities[self.states[t + 1] as usize]
        } else {
            0.0
        }
    }

    fn td0(&self, t: usize, gamma: f64) -> f64 {
        td0_error(
            self.rewards[t],
            self.successor_utility(t),
            self.utilities[self.states[t] as usize],
            gamma,
        )
    }

    fn to_log(&self) -> EpisodeLog {
        let mut log = EpisodeLog::new();
        for t in 0..self.len() {
            log.push(EpisodeStep {
                step: t,
                state: self.states[t],
                action: 0,
                reward: self.rewards[t],
                utility_before: self.successor_utility(t),
                utility_after: self.successor_utility(t),
            });
        }
        log
    }
}

fn check_batch_attribution(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut max_dev = 0.0_f64;
    let trajectories = trials.clamp(1, 2000).max(100);
    for _ in 0..trajectories {
        let trajectory = FrozenTrajectory::random(rng);
        let gamma = rng.random_range(0.3..1.0);
        let lambda = rng.random_range(0.0..1.0);
        let config = TdConfig::iterative(gamma, lambda, 1).unwrap();
        let learning_rate = 0.5;

        // Traces engine with frozen utilities: updates accumulate separately.
        let mut traces = TraceTable::new();
        let mut accumulated = TabularFunction::new(Arity::State);
        for t in 0..trajectory.len() {
            traces.visit(trajectory.states[t], &config);
            traces_learning_step(
                &mut accumulated,
                &traces,
                trajectory.td0(t, gamma),
                learning_rate,
            )
            .unwrap();
        }

        // Attribution oracle: per-state sums of the lambda-errors.
        let gl = gamma * lambda;
        let len = trajectory.len();
        let mut lambda_errors = vec![0.0; len];
        let mut acc = 0.0;
        for t in (0..len).rev() {
            acc = trajectory.td0(t, gamma) + gl * acc;
            lambda_errors[t] = acc;
        }
        for state in 0..10u32 {
            let expected: f64 = (0..len)
                .filter(|&t| trajectory.states[t] == state)
                .map(|t| learning_rate * lambda_errors[t])
                .sum();
            let actual = accumulated.state_value(state);
            max_dev = max_dev.max((actual - expected).abs());
        }
    }
    CheckOutcome::new(
        "batch-attribution",
        max_dev,
        1e-9,
        format!("{trajectories} frozen absorbing trajectories"),
    )
}

fn check_truncation_bound(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut worst_margin = f64::NEG_INFINITY;
    let mut violations = 0u64;
    let trajectories = trials.clamp(1, 2000).max(100);
    for _ in 0..trajectories {
        let trajectory = FrozenTrajectory::random(rng);
        let gamma = rng.random_range(0.5..0.995);
        let lambda = rng.random_range(0.0..0.995);
        let gl = gamma * lambda;
        let config = TdConfig::iterative(gamma, lambda, 1).unwrap();
        let log = trajectory.to_log();
        let r_max = trajectory
            .rewards
            .iter()
            .fold(0.0_f64, |a, &r| a.max(r.abs()));
        let u_max = trajectory
            .utilities
            .iter()
            .fold(0.0_f64, |a, &u| a.max(u.abs()));
        for &m in &[1usize, 5, 25] {
            let bound = gl.powi(m as i32) * (r_max / (1.0 - gl) + u_max * (1.0 + gamma));
            for t in 0..trajectory.len() {
                let z_full = td_lambda_return_offline(&log, t, &config).unwrap();
                // Truncated return over the remaining window.
                let window = m.min(trajectory.len() - t);
                let mut buffer = ExperienceBuffer::new(window);
                for s in t..t + window {
                    buffer.push(ExperienceRecord::new(
                        trajectory.states[s],
                        0,
                        trajectory.rewards[s],
                        trajectory.successor_utility(s),
                    ));
                }
                let window_config = TdConfig::iterative(gamma, lambda, window).unwrap();
                let z_truncated = ttd_return_iterative(&buffer, &window_config).unwrap();
                let gap = (z_full - z_truncated).abs();
                if gap > bound + 1e-12 {
                    violations += 1;
                }
                worst_margin = worst_margin.max(gap - bound);
            }
        }
    }
    CheckOutcome::boolean(
        "truncation-bound",
        violations == 0,
        format!(
            "{trajectories} trajectories x m in {{1, 5, 25}}; worst gap-bound margin {worst_margin:.3e}"
        ),
    )
}

fn check_trace_closed_form(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut max_dev = 0.0_f64;
    for _ in 0..trials {
        let gamma = rng.random_range(0.1..1.0);
        let lambda = rng.random_range(0.0..1.0);
        let config = TdConfig::iterative(gamma, lambda, 1).unwrap();
        let gl = config.gamma_lambda();
        let n_states = rng.random_range(1..8u32);
        let len = rng.random_range(1..80usize);
        let history: Vec<StateId> = (0..len).map(|_| rng.random_range(0..n_states)).collect();
        let mut traces = TraceTable::new();
        for &s in &history {
            traces.visit(s, &config);
        }
        for state in 0..n_states {
            let expected: f64 = history
                .iter()
                .enumerate()
                .filter(|(_, &s)| s == state)
                .map(|(k, _)| gl.powi((len - 1 - k) as i32))
                .sum();
            max_dev = max_dev.max((traces.get(state) - expected).abs());
        }
    }
    CheckOutcome::new(
        "trace-closed-form",
        max_dev,
        1e-12,
        format!("{trials} random visit histories"),
    )
}

fn check_lambda_endpoints(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut max_dev = 0.0_f64;
    for _ in 0..trials {
        let m = rng.random_range(1..=30);
        let gamma: f64 = rng.random();
        let buffer = random_window(rng, m);

        // lambda = 0: the one-step corrected return of the oldest step.
        let config0 = TdConfig::iterative(gamma, 0.0, m).unwrap();
        let z0 = ttd_return_iterative(&buffer, &config0).unwrap();
        let oldest = buffer.oldest().unwrap();
        let one_step = oldest.reward + gamma * oldest.stored_utility;
        max_dev = max_dev.max((z0 - one_step).abs());

        // lambda = 1: the corrected m-step truncated return.
        let config1 = TdConfig::iterative(gamma, 1.0, m).unwrap();
        let z1 = ttd_return_iterative(&buffer, &config1).unwrap();
        let mut corrected = 0.0;
        let mut weight = 1.0;
        for k in 0..m {
            corrected += weight * buffer.get(m - 1 - k).unwrap().reward;
            weight *= gamma;
        }
        corrected += weight * buffer.get(0).unwrap().stored_utility;
        max_dev = max_dev.max((z1 - corrected).abs() / 1.0_f64.max(corrected.abs()));
    }
    CheckOutcome::new(
        "lambda-endpoints",
        max_dev,
        1e-12,
        format!("{trials} windows at lambda 0 and 1"),
    )
}

fn check_boltzmann(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut max_dev = 0.0_f64;
    for _ in 0..trials {
        let n = rng.random_range(1..=16);
        let temperature = 10f64.powf(rng.random_range(-4.0..1.0));
        let merits: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let sample = boltzmann_select(&merits, temperature, rng).unwrap();
        let sum: f64 = sample.probabilities.iter().sum();
        max_dev = max_dev.max((sum - 1.0).abs());

        let shift: f64 = rng.random_range(-50.0..50.0);
        let shifted: Vec<f64> = merits.iter().map(|m| m + shift).collect();
        let shifted_sample = boltzmann_select(&shifted, temperature, rng).unwrap();
        for (a, b) in sample.probabilities.iter().zip(&shifted_sample.probabilities) {
            max_dev = max_dev.max((a - b).abs());
        }

        // As T -> 0+, the argmax action takes all the mass.
        let distinct: Vec<f64> = (0..n).map(|i| i as f64 + rng.random_range(0.0..0.5)).collect();
        let cold = boltzmann_select(&distinct, 1e-4, rng).unwrap();
        let argmax = distinct
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        max_dev = max_dev.max(1.0 - cold.probabilities[argmax]);
    }
    CheckOutcome::new(
        "boltzmann-distribution",
        max_dev,
        1e-10,
        format!("{trials} merit vectors: sums, shift invariance, cold argmax"),
    )
}

/// Reference one-step learners for the m = 1 reduction check.
struct OneStepReference {
    algorithm: Algorithm,
    value: TabularFunction,
    merits: TabularFunction,
}

impl OneStepReference {
    fn new(algorithm: Algorithm) -> Self {
        OneStepReference {
            algorithm,
            value: TabularFunction::new(Arity::State),
            merits: TabularFunction::new(Arity::StateAction),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        x: StateId,
        a: ActionId,
        r: f64,
        x_next: StateId,
        alpha: f64,
        beta: f64,
        gamma: f64,
        n_actions: usize,
    ) {
        match self.algorithm {
            Algorithm::Ahc => {
                let error = r + gamma * self.value.state_value(x_next) - self.value.state_value(x);
                self.value.update(TableKey::State(x), error, alpha).unwrap();
                self.merits
                    .update(TableKey::StateAction(x, a), error, beta)
                    .unwrap();
            }
            Algorithm::QLearning => {
                let error = r + gamma * self.merits.max_over_actions(x_next, n_actions)
                    - self.merits.state_action_value(x, a);
                self.merits
                    .update(TableKey::StateAction(x, a), error, alpha)
                    .unwrap();
            }
            Algorithm::AdvantageUpdating => {
                let a_max = self.merits.max_over_actions(x, n_actions);
                let error = a_max - self.merits.state_action_value(x, a) + r
                    + gamma * self.value.state_value(x_next)
                    - self.value.state_value(x);
                self.merits
                    .update(TableKey::StateAction(x, a), error, alpha)
                    .unwrap();
                let new_max = self.merits.max_over_actions(x, n_actions);
                self.value
                    .update(TableKey::State(x), (new_max - a_max) / alpha, beta)
                    .unwrap();
            }
        }
    }
}

fn check_m1_reduction(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut max_dev = 0.0_f64;
    let streams = (trials / 10).clamp(10, 200);
    for _ in 0..streams {
        for algorithm in [Algorithm::Ahc, Algorithm::QLearning, Algorithm::AdvantageUpdating] {
            let gamma = rng.random_range(0.5..1.0);
            let lambda = rng.random_range(0.0..1.0);
            let alpha = rng.random_range(0.1..0.9);
            let beta = rng.random_range(0.1..0.9);
            let td = TdConfig::iterative(gamma, lambda, 1).unwrap();
            let config = LearnerConfig::new(algorithm, alpha, beta, 1.0, td).unwrap();
            let mut session = Session::new(config, 3).unwrap();
            let mut reference = OneStepReference::new(algorithm);
            let mut x = 0u32;
            for _ in 0..30 {
                let a = rng.random_range(0..3u32);
                let r = rng.random_range(-1.0..1.0);
                let x_next = rng.random_range(0..5u32);
                session.observe(x, a, r, x_next).unwrap();
                reference.step(x, a, r, x_next, alpha, beta, gamma, 3);
                x = x_next;
            }
            for s in 0..5u32 {
                max_dev = max_dev
                    .max((session.value_table().state_value(s) - reference.value.state_value(s)).abs());
                for a in 0..3u32 {
                    max_dev = max_dev.max(
                        (session.merit_table().state_action_value(s, a)
                            - reference.merits.state_action_value(s, a))
                        .abs(),
                    );
                }
            }
        }
    }
    CheckOutcome::new(
        "m1-one-step-reduction",
        max_dev,
        1e-12,
        format!("{streams} streams x 3 algorithms"),
    )
}

fn check_reset_completeness(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut failures = 0u64;
    let episodes = trials.clamp(1, 500);
    for _ in 0..episodes {
        let m = rng.random_range(1..=12);
        let td = TdConfig::iterative(0.95, rng.random_range(0.0..1.0), m).unwrap();
        let config = LearnerConfig::new(Algorithm::QLearning, 0.3, 0.3, 1.0, td).unwrap();
        let mut session = Session::new(config, 2).unwrap();
        let length = rng.random_range(1..=30usize);
        for step in 0..length - 1 {
            session
                .observe(step as StateId % 7, 0, 0.0, (step as StateId + 1) % 7)
                .unwrap();
        }
        session
            .finish_episode((length as StateId - 1) % 7, 1, -1.0)
            .unwrap();
        if session.updates_dispatched() != length as u64 || !session.buffer().is_empty() {
            failures += 1;
        }
    }
    CheckOutcome::boolean(
        "reset-completeness",
        failures == 0,
        format!("{episodes} episodes: one update per real step"),
    )
}

fn check_ahc_coupling(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    // States are distinct along each episode, so every dispatched update is
    // observed in isolation: one V delta and one f delta per state, both
    // driven by the same error.
    let mut max_dev = 0.0_f64;
    let streams = (trials / 20).clamp(5, 100);
    for _ in 0..streams {
        let alpha = rng.random_range(0.1..0.9);
        let beta = rng.random_range(0.1..0.9);
        let td = TdConfig::iterative(0.95, 0.9, 4).unwrap();
        let config = LearnerConfig::new(Algorithm::Ahc, alpha, beta, 1.0, td).unwrap();
        let mut session = Session::new(config, 2).unwrap();
        let n_states = 64u32;
        let mut actions_taken = vec![0u32; n_states as usize];
        let mut x = 0u32;
        for step in 0..60u32 {
            let a = rng.random_range(0..2u32);
            actions_taken[x as usize] = a;
            let next = x + 1;
            let v_before: Vec<f64> = (0..n_states)
                .map(|s| session.value_table().state_value(s))
                .collect();
            let f_before: Vec<Vec<f64>> = (0..n_states).map(|s| session.merits_row(s)).collect();
            if step % 17 == 16 {
                session.finish_episode(x, a, -1.0).unwrap();
            } else {
                session
                    .observe(x, a, rng.random_range(-1.0..1.0), next)
                    .unwrap();
            }
            for s in 0..n_states {
                let dv = session.value_table().state_value(s) - v_before[s as usize];
                let row = session.merits_row(s);
                let df = row[actions_taken[s as usize] as usize]
                    - f_before[s as usize][actions_taken[s as usize] as usize];
                if dv == 0.0 && df == 0.0 {
                    continue;
                }
                // The same error drives both tables: dv/alpha == df/beta.
                max_dev = max_dev.max((dv / alpha - df / beta).abs());
            }
            x = next;
        }
    }
    CheckOutcome::new(
        "ahc-shared-error",
        max_dev,
        1e-12,
        format!("{streams} AHC streams"),
    )
}

fn check_quantizer_counts() -> CheckOutcome {
    let car = car_quantizer();
    let pole = cartpole_quantizer();
    let passed = car.total_regions() == 1260 && pole.total_regions() == 162;
    CheckOutcome::boolean(
        "quantizer-region-counts",
        passed,
        format!(
            "car {} regions (want 1260), cart-pole {} boxes (want 162)",
            car.total_regions(),
            pole.total_regions()
        ),
    )
}

fn check_environment_determinism(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut mismatches = 0u64;
    let geometry = CarGeometry::default();
    let params = CartPoleParams::default();
    let steps = trials.clamp(1, 2000);

    let mut car = CarState::INITIAL;
    let mut pole = CartPoleState::START;
    for _ in 0..steps {
        let action = CarAction::from_index(rng.random_range(0..3)).unwrap();
        let a = car_step(&car, action, &geometry).unwrap();
        let b = car_step(&car, action, &geometry).unwrap();
        if a != b {
            mismatches += 1;
        }
        car = if a.terminal.is_terminal() {
            CarState::INITIAL
        } else {
            a.next_state
        };

        let pole_action = CartPoleAction::from_index(rng.random_range(0..2)).unwrap();
        let c = cartpole_step(&pole, pole_action, &params).unwrap();
        let d = cartpole_step(&pole, pole_action, &params).unwrap();
        if c != d {
            mismatches += 1;
        }
        pole = if c.terminal.is_terminal() {
            CartPoleState::START
        } else {
            c.next_state
        };
    }
    CheckOutcome::boolean(
        "environment-determinism",
        mismatches == 0,
        format!("{steps} repeated steps per environment"),
    )
}

fn check_car_rigid_body(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let geometry = CarGeometry::default();
    let mut max_dev = 0.0_f64;
    let steps = trials.clamp(1, 2000);
    let mut state = CarState::INITIAL;
    for _ in 0..steps {
        let action = CarAction::from_index(rng.random_range(0..3)).unwrap();
        let out = car_step(&state, action, &geometry).unwrap();
        let c = geometry.corners(&out.next_state);
        let side = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
        max_dev = max_dev.max((side(c[0], c[1]) - geometry.car_width).abs());
        max_dev = max_dev.max((side(c[1], c[2]) - geometry.car_length).abs());
        max_dev = max_dev.max((side(c[2], c[3]) - geometry.car_width).abs());
        max_dev = max_dev.max((side(c[3], c[0]) - geometry.car_length).abs());
        state = if out.terminal.is_terminal() {
            CarState::INITIAL
        } else {
            out.next_state
        };
    }
    CheckOutcome::new(
        "car-rigid-body",
        max_dev,
        1e-9,
        format!("{steps} motion steps"),
    )
}

fn check_cartpole_energy_drift() -> CheckOutcome {
    let params = CartPoleParams::default().frictionless();
    let mut state = CartPoleState {
        theta: 0.05,
        ..CartPoleState::START
    };
    let initial = mechanical_energy(&state, &params);
    for _ in 0..100 {
        let (x_ddot, theta_ddot) = cartpole_derivatives(&state, 0.0, &params);
        state = CartPoleState {
            x: state.x + params.time_step * state.x_dot,
            x_dot: state.x_dot + params.time_step * x_ddot,
            theta: state.theta + params.time_step * state.theta_dot,
            theta_dot: state.theta_dot + params.time_step * theta_ddot,
        };
    }
    let drift = mechanical_energy(&state, &params) - initial;
    let pinned = crate::env::cartpole::ENERGY_DRIFT_PIN;
    CheckOutcome::new(
        "cartpole-energy-drift",
        (drift - pinned).abs(),
        1e-12,
        format!("100 frictionless unforced Euler steps, drift {drift:e}"),
    )
}

fn check_run_reproducibility(rng: &mut StdRng) -> CheckOutcome {
    use super::specfile::run_csv;
    let td = TdConfig::iterative(0.95, 0.9, 5).unwrap();
    let learner = LearnerConfig::new(Algorithm::Ahc, 0.25, 0.25, 0.02, td).unwrap();
    let mut spec = ExperimentSpec::new(EnvKind::CarParking, learner, 3, 1);
    let seed = rng.random();
    spec.seeds = vec![seed];
    let a = run_single(&spec, seed).unwrap();
    let b = run_single(&spec, seed).unwrap();
    CheckOutcome::boolean(
        "curve-reproducibility",
        run_csv(&a) == run_csv(&b),
        format!("seed {seed}: byte-identical metric rows"),
    )
}

fn check_cross_run_mean(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    // Synthetic runs: the aggregate at each episode index must be the plain
    // arithmetic mean.
    let mut max_dev = 0.0_f64;
    let cases = (trials / 50).clamp(2, 50);
    for _ in 0..cases {
        let n_runs = rng.random_range(2..6);
        let episodes = rng.random_range(1..20);
        let runs: Vec<RunMetrics> = (0..n_runs)
            .map(|seed| RunMetrics {
                seed: seed as u64,
                episodes: (0..episodes)
                    .map(|_| EpisodeMetrics::new(rng.random_range(1..100), rng.random_range(-1.0..1.0)))
                    .collect(),
                first_success_episode: None,
                truncated: false,
                total_steps: 0,
            })
            .collect();
        for i in 0..episodes {
            let mean: f64 = runs.iter().map(|r| r.episodes[i].duration as f64).sum::<f64>()
                / n_runs as f64;
            let direct: f64 = runs
                .iter()
                .map(|r| r.episodes[i].duration as f64)
                .sum::<f64>()
                / n_runs as f64;
            max_dev = max_dev.max((mean - direct).abs());
        }
    }
    CheckOutcome::new(
        "cross-run-mean",
        max_dev,
        0.0,
        format!("{cases} synthetic aggregates"),
    )
}

fn check_padding_rule(trials: usize, rng: &mut StdRng) -> CheckOutcome {
    let mut failures = 0u64;
    let cases = trials.clamp(1, 1000);
    for _ in 0..cases {
        let complete: Vec<u64> = (0..rng.random_range(1..8usize))
            .map(|_| rng.random_range(10..100_000))
            .collect();
        let interrupted = rng.random_range(1..200_000u64);
        let mut episodes: Vec<EpisodeMetrics> =
            complete.iter().map(|&d| EpisodeMetrics::new(d, -1.0)).collect();
        episodes.push(EpisodeMetrics::new(interrupted, 0.0));
        let mut run = RunMetrics {
            seed: 0,
            episodes,
            first_success_episode: None,
            truncated: true,
            total_steps: 0,
        };
        let target = run.episodes.len() + rng.random_range(1..5usize);
        pad_fictitious_episodes(&mut run, target).unwrap();

        let preceding = *complete.last().unwrap();
        let expected = if interrupted < preceding {
            preceding
        } else {
            interrupted
        };
        for e in &run.episodes[complete.len() + 1..] {
            // The rule never pads below the naive interrupted duration, which
            // is what protects the cross-run averages.
            if !e.padded || e.duration != expected || e.duration < interrupted {
                failures += 1;
            }
        }
    }
    CheckOutcome::boolean(
        "padding-rule",
        failures == 0,
        format!("{cases} synthetic truncations, pad = max(interrupted, preceding)"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_is_an_empty_success() {
        assert!(equivalence_report(0, 1).is_empty());
    }

    #[test]
    fn small_report_passes_and_reproduces() {
        let a = equivalence_report(50, 9);
        assert!(!a.is_empty());
        for check in &a {
            assert!(
                check.passed,
                "{} failed: {} (dev {:e} tol {:e})",
                check.name, check.detail, check.max_deviation, check.tolerance
            );
        }
        let b = equivalence_report(50, 9);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.max_deviation.to_bits(), y.max_deviation.to_bits());
        }
    }
}
