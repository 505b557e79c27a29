//! Per-step episode logs and the diagnostic quantities computed from them.

use crate::config::TdConfig;
use crate::error::{Error, Result};
use crate::{ActionId, StateId};

/// One logged step: the transition taken at `step`, plus the successor-state
/// utility read just before and just after that step's learning update. For
/// the terminal step of an absorbing episode both utilities are 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeStep {
    pub step: usize,
    pub state: StateId,
    pub action: ActionId,
    pub reward: f64,
    pub utility_before: f64,
    pub utility_after: f64,
}

/// A finite recorded trajectory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeLog {
    steps: Vec<EpisodeStep>,
}

impl EpisodeLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: EpisodeStep) {
        self.steps.push(step);
    }

    pub fn steps(&self) -> &[EpisodeStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Row-per-step text form:
    /// `step state action reward utility_before utility_after`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!(
                "{} {} {} {} {} {}\n",
                s.step, s.state, s.action, s.reward, s.utility_before, s.utility_after
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut log = EpisodeLog::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(Error::Parse(format!(
                    "line {}: expected 6 fields, found {}",
                    line_no + 1,
                    fields.len()
                )));
            }
            let parse_err = |e: &dyn std::fmt::Display| {
                Error::Parse(format!("line {}: {e}", line_no + 1))
            };
            log.push(EpisodeStep {
                step: fields[0].parse().map_err(|e| parse_err(&e))?,
                state: fields[1].parse().map_err(|e| parse_err(&e))?,
                action: fields[2].parse().map_err(|e| parse_err(&e))?,
                reward: fields[3].parse().map_err(|e| parse_err(&e))?,
                utility_before: fields[4].parse().map_err(|e| parse_err(&e))?,
                utility_after: fields[5].parse().map_err(|e| parse_err(&e))?,
            });
        }
        Ok(log)
    }
}

/// The TD(λ) return for step `t` of a finite absorbing trajectory with frozen
/// utilities, chained over the whole remainder with terminal utility 0.
pub fn td_lambda_return_offline(
    trajectory: &EpisodeLog,
    t: usize,
    config: &TdConfig,
) -> Result<f64> {
    let steps = trajectory.steps();
    if t >= steps.len() {
        return Err(Error::IndexOutOfRange {
            index: t,
            len: steps.len(),
        });
    }
    let last = steps.len() - 1;
    let mut z = 0.0;
    for i in (t..=last).rev() {
        let s = &steps[i];
        let utility_next = if i == last { 0.0 } else { s.utility_before };
        z = s.reward + config.gamma * (config.lambda * z + (1.0 - config.lambda) * utility_next);
    }
    Ok(z)
}

/// Finite-horizon discrepancy between on-line and frozen-utility learning:
///
/// `D = sum_{k=1..horizon} (gamma*lambda)^k
///        [U_{t+k-1}(x_{t+k}) - U_{t+k}(x_{t+k})]`
///
/// Each bracket is the successor utility recorded at step t+k-1 before minus
/// after that step's update, which is exactly what the log rows carry.
pub fn discrepancy_term(
    trajectory: &EpisodeLog,
    t: usize,
    horizon: usize,
    config: &TdConfig,
) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::DomainError {
            what: "horizon",
            value: 0.0,
            domain: "positive integers",
        });
    }
    let steps = trajectory.steps();
    if steps.len() < t + horizon {
        return Err(Error::InsufficientLog {
            required: t + horizon,
            len: steps.len(),
        });
    }
    let gl = config.gamma_lambda();
    let mut total = 0.0;
    let mut weight = gl;
    for k in 1..=horizon {
        let row = &steps[t + k - 1];
        total += weight * (row.utility_before - row.utility_after);
        weight *= gl;
    }
    Ok(total)
}
