//! The three truncated-return learners and the session driving them.

use rand::Rng;

use crate::buffer::{ExperienceBuffer, ExperienceRecord};
use crate::config::{Engine, TdConfig};
use crate::error::{Error, Result};
use crate::incremental::{IncrementalEngine, DEFAULT_RESYNC_PERIOD};
use crate::policy::{boltzmann_select, PolicySample};
use crate::returns::{backward_returns, ttd_return_iterative};
use crate::table::{Arity, TableKey, TabularFunction};
use crate::{ActionId, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Adaptive heuristic critic: evaluation function V plus policy merits f.
    Ahc,
    /// Single action-utility function Q with a max bootstrap.
    QLearning,
    /// Evaluation function V plus per-action advantages A.
    AdvantageUpdating,
}

impl Algorithm {
    pub fn parse(s: &str) -> Result<Algorithm> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ahc" => Ok(Algorithm::Ahc),
            "q" | "q-learning" | "q_learning" | "qlearning" => Ok(Algorithm::QLearning),
            "advantage" | "advantage-updating" | "advantage_updating" | "au" => {
                Ok(Algorithm::AdvantageUpdating)
            }
            other => Err(Error::Parse(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::Ahc => write!(f, "ahc"),
            Algorithm::QLearning => write!(f, "q-learning"),
            Algorithm::AdvantageUpdating => write!(f, "advantage-updating"),
        }
    }
}

/// Learning-rate, temperature, and return-engine settings for one learner.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub algorithm: Algorithm,
    /// Learning rate for the evaluation/utility function.
    pub alpha: f64,
    /// Learning rate for the policy/secondary function.
    pub beta: f64,
    /// Boltzmann temperature.
    pub temperature: f64,
    pub td: TdConfig,
    /// Watkins-style adaptive lambda: non-greedy steps record a per-step
    /// lambda of 0. Iterative engine only; off by default.
    pub adaptive_lambda: bool,
}

impl LearnerConfig {
    pub fn new(
        algorithm: Algorithm,
        alpha: f64,
        beta: f64,
        temperature: f64,
        td: TdConfig,
    ) -> Result<Self> {
        let config = LearnerConfig {
            algorithm,
            alpha,
            beta,
            temperature,
            td,
            adaptive_lambda: false,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(Error::DomainError {
                what: "alpha",
                value: self.alpha,
                domain: "(0, inf)",
            });
        }
        if self.beta.is_nan() || self.beta <= 0.0 {
            return Err(Error::DomainError {
                what: "beta",
                value: self.beta,
                domain: "(0, inf)",
            });
        }
        if self.temperature.is_nan() || self.temperature <= 0.0 {
            return Err(Error::DomainError {
                what: "temperature",
                value: self.temperature,
                domain: "(0, inf)",
            });
        }
        if self.adaptive_lambda && self.td.engine == Engine::Incremental {
            return Err(Error::InvalidConfig(
                "adaptive lambda requires the iterative engine".into(),
            ));
        }
        Ok(())
    }
}

/// AHC update pair: V and f both move by the same pre-update error `z - v`.
pub fn ahc_learn(
    value: &mut TabularFunction,
    policy: &mut TabularFunction,
    state: StateId,
    action: ActionId,
    z: f64,
    config: &LearnerConfig,
) -> Result<()> {
    let v = value.get(TableKey::State(state))?;
    value.update(TableKey::State(state), z - v, config.alpha)?;
    policy.update(TableKey::StateAction(state, action), z - v, config.beta)?;
    Ok(())
}

/// Q-learning update against the current Q(x, a) baseline.
pub fn q_learn(
    q: &mut TabularFunction,
    state: StateId,
    action: ActionId,
    z: f64,
    config: &LearnerConfig,
) -> Result<()> {
    let current = q.get(TableKey::StateAction(state, action))?;
    q.update(TableKey::StateAction(state, action), z - current, config.alpha)?;
    Ok(())
}

/// Advantage-updating pair: the advantage row moves toward `z - V` relative
/// to its pre-update maximum, then V absorbs the change in that maximum.
pub fn advantage_learn(
    advantage: &mut TabularFunction,
    value: &mut TabularFunction,
    state: StateId,
    action: ActionId,
    z: f64,
    config: &LearnerConfig,
    n_actions: usize,
) -> Result<()> {
    if config.alpha.is_nan() || config.alpha <= 0.0 {
        return Err(Error::DegenerateAlpha);
    }
    let a_max = advantage.max_over_actions(state, n_actions);
    let current = advantage.get(TableKey::StateAction(state, action))?;
    let v = value.get(TableKey::State(state))?;
    advantage.update(
        TableKey::StateAction(state, action),
        a_max - current + z - v,
        config.alpha,
    )?;
    let new_max = advantage.max_over_actions(state, n_actions);
    value.update(
        TableKey::State(state),
        (new_max - a_max) / config.alpha,
        config.beta,
    )?;
    Ok(())
}

/// One learning agent: tables, the experience window, and a return engine,
/// driven by select/observe pairs from an episode loop.
///
/// The first `m - 1` steps of an episode only fill the window; from then on
/// each observed transition updates the oldest buffered step, and the
/// end-of-episode reset flushes one update for every remaining record, so an
/// episode of length L dispatches exactly L updates.
#[derive(Debug, Clone)]
pub struct Session {
    config: LearnerConfig,
    n_actions: usize,
    /// V for AHC and advantage updating; unused by Q-learning.
    value: TabularFunction,
    /// The merit source: f (AHC), Q (Q-learning), or A (advantage updating).
    merits: TabularFunction,
    buffer: ExperienceBuffer,
    engine: Option<IncrementalEngine>,
    updates_dispatched: u64,
}

impl Session {
    pub fn new(config: LearnerConfig, n_actions: usize) -> Result<Self> {
        config.validate()?;
        if n_actions == 0 {
            return Err(Error::EmptyActionSet);
        }
        let engine = match config.td.engine {
            Engine::Iterative => None,
            Engine::Incremental => Some(IncrementalEngine::new(&config.td, DEFAULT_RESYNC_PERIOD)?),
        };
        Ok(Session {
            buffer: ExperienceBuffer::new(config.td.m),
            value: TabularFunction::new(Arity::State),
            merits: TabularFunction::new(Arity::StateAction),
            n_actions,
            engine,
            config,
            updates_dispatched: 0,
        })
    }

    /// Replace the incremental engine's resync cadence (still capped by the
    /// numerically stable span).
    pub fn with_resync_period(mut self, period: usize) -> Result<Self> {
        if self.config.td.engine == Engine::Incremental {
            self.engine = Some(IncrementalEngine::new(&self.config.td, period)?);
        }
        Ok(self)
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// The evaluation function V (meaningful for AHC and advantage updating).
    pub fn value_table(&self) -> &TabularFunction {
        &self.value
    }

    pub fn value_table_mut(&mut self) -> &mut TabularFunction {
        &mut self.value
    }

    /// The merit table: f, Q, or A depending on the algorithm.
    pub fn merit_table(&self) -> &TabularFunction {
        &self.merits
    }

    pub fn merit_table_mut(&mut self) -> &mut TabularFunction {
        &mut self.merits
    }

    pub fn buffer(&self) -> &ExperienceBuffer {
        &self.buffer
    }

    /// Total learning updates dispatched across the session.
    pub fn updates_dispatched(&self) -> u64 {
        self.updates_dispatched
    }

    pub fn merits_row(&self, state: StateId) -> Vec<f64> {
        self.merits.merits_row(state, self.n_actions)
    }

    /// Boltzmann draw over the algorithm's merit source for this state.
    pub fn select_action<R: Rng + ?Sized>(
        &self,
        state: StateId,
        rng: &mut R,
    ) -> Result<PolicySample> {
        boltzmann_select(&self.merits_row(state), self.config.temperature, rng)
    }

    /// The utility stored with a new record: V(x') for AHC and advantage
    /// updating, max_a Q(x', a) for Q-learning.
    fn bootstrap(&self, state: StateId) -> f64 {
        match self.config.algorithm {
            Algorithm::Ahc | Algorithm::AdvantageUpdating => self.value.state_value(state),
            Algorithm::QLearning => self.merits.max_over_actions(state, self.n_actions),
        }
    }

    fn lambda_override_for(&self, state: StateId, action: ActionId) -> Option<f64> {
        if !self.config.adaptive_lambda {
            return None;
        }
        let taken = self.merits.state_action_value(state, action);
        let best = self.merits.max_over_actions(state, self.n_actions);
        (taken < best).then_some(0.0)
    }

    /// Feed back one non-terminal transition. Inserts the record (with the
    /// successor utility captured now) and, once the window is full, learns
    /// for the oldest buffered step.
    pub fn observe(
        &mut self,
        state: StateId,
        action: ActionId,
        reward: f64,
        next_state: StateId,
    ) -> Result<()> {
        let record = ExperienceRecord {
            state,
            action,
            reward,
            stored_utility: self.bootstrap(next_state),
            lambda_override: self.lambda_override_for(state, action),
        };
        self.push_and_learn(record)
    }

    fn push_and_learn(&mut self, record: ExperienceRecord) -> Result<()> {
        let was_full = self.buffer.is_full();
        let departing = self.buffer.push(record);
        if !self.buffer.is_full() {
            return Ok(()); // warm-up: the window is still filling
        }
        let z = match &mut self.engine {
            None => ttd_return_iterative(&self.buffer, &self.config.td)?,
            Some(engine) => {
                if was_full {
                    let departing = departing.expect("eviction when already full");
                    engine.advance(&departing, &self.buffer, &self.config.td)?
                } else {
                    engine.prime(&self.buffer, &self.config.td)?;
                    engine.state().value()
                }
            }
        };
        let oldest = *self.buffer.oldest().expect("full buffer");
        self.dispatch(oldest.state, oldest.action, z)
    }

    /// Insert the terminal transition and run the reset operation.
    pub fn finish_episode(
        &mut self,
        state: StateId,
        action: ActionId,
        final_reward: f64,
    ) -> Result<()> {
        let record = ExperienceRecord {
            state,
            action,
            reward: final_reward,
            stored_utility: 0.0, // fictitious successor utility
            lambda_override: self.lambda_override_for(state, action),
        };
        // The evicted record, if any, was already learned on its own tick.
        self.buffer.push(record);
        self.reset_operation()
    }

    /// End-of-episode flush: with the newest stored utility forced to 0, every
    /// remaining real record gets exactly one update, oldest first, each
    /// return chained over the real records only. Fictitious steps beyond the
    /// terminal contribute nothing, and the buffer empties afterwards.
    pub fn reset_operation(&mut self) -> Result<()> {
        self.buffer.set_newest_utility(0.0);
        let returns = backward_returns(&self.buffer, &self.config.td);
        for k in (0..self.buffer.len()).rev() {
            let record = *self.buffer.get(k).expect("in range");
            self.dispatch(record.state, record.action, returns[k])?;
        }
        self.buffer.clear();
        if let Some(engine) = &mut self.engine {
            engine.invalidate();
        }
        Ok(())
    }

    fn dispatch(&mut self, state: StateId, action: ActionId, z: f64) -> Result<()> {
        self.updates_dispatched += 1;
        match self.config.algorithm {
            Algorithm::Ahc => {
                ahc_learn(&mut self.value, &mut self.merits, state, action, z, &self.config)
            }
            Algorithm::QLearning => q_learn(&mut self.merits, state, action, z, &self.config),
            Algorithm::AdvantageUpdating => advantage_learn(
                &mut self.merits,
                &mut self.value,
                state,
                action,
                z,
                &self.config,
                self.n_actions,
            ),
        }
    }
}
