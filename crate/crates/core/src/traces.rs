//! Eligibility traces, the classical TD(λ) engine the truncated procedure
//! approximates. Kept as the reference baseline for the equivalence checks.

use std::collections::HashMap;

use crate::config::TdConfig;
use crate::error::Result;
use crate::table::{TabularFunction, TableKey};
use crate::StateId;

/// Per-state eligibility values. A visit decays every trace by gamma*lambda
/// and then bumps the visited state by 1, so each trace equals the discounted
/// count of its visits.
#[derive(Debug, Clone, Default)]
pub struct TraceTable {
    traces: HashMap<StateId, f64>,
}

impl TraceTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, state: StateId) -> f64 {
        self.traces.get(&state).copied().unwrap_or(0.0)
    }

    /// Record a visit: decay everything, then increment the visited state.
    pub fn visit(&mut self, state: StateId, config: &TdConfig) {
        let gl = config.gamma_lambda();
        for value in self.traces.values_mut() {
            *value *= gl;
        }
        *self.traces.entry(state).or_insert(0.0) += 1.0;
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, f64)> + '_ {
        self.traces.iter().map(|(&s, &e)| (s, e))
    }

    /// Number of states with a stored trace (including decayed-to-zero ones).
    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn clear(&mut self) {
        self.traces.clear();
    }
}

/// One on-line TD(λ) learning step: every traced state moves by
/// `learning_rate * td0_error * trace`.
pub fn traces_learning_step(
    utilities: &mut TabularFunction,
    traces: &TraceTable,
    td0_err: f64,
    learning_rate: f64,
) -> Result<()> {
    if td0_err == 0.0 {
        return Ok(());
    }
    for (state, eligibility) in traces.iter() {
        if eligibility != 0.0 {
            utilities.update(TableKey::State(state), td0_err * eligibility, learning_rate)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Arity;

    fn config(gamma: f64, lambda: f64) -> TdConfig {
        TdConfig::iterative(gamma, lambda, 1).unwrap()
    }

    /// Closed form: e_x(t) = sum over visits k of (gamma*lambda)^(t-k).
    fn closed_form_trace(visits: &[usize], t: usize, gl: f64) -> f64 {
        visits
            .iter()
            .filter(|&&k| k <= t)
            .map(|&k| gl.powi((t - k) as i32))
            .sum()
    }

    #[test]
    fn single_visit_decays_geometrically() {
        // gamma*lambda = 0.45, visited only at t = 0: e(2) = 0.45^2.
        let cfg = config(0.9, 0.5);
        let mut traces = TraceTable::new();
        traces.visit(7, &cfg); // t = 0
        traces.visit(8, &cfg); // t = 1
        traces.visit(9, &cfg); // t = 2
        assert!((traces.get(7) - 0.2025).abs() < 1e-15);
        assert!(
            (traces.get(7) - closed_form_trace(&[0], 2, 0.45)).abs() < 1e-15
        );
    }

    #[test]
    fn revisit_accumulates_on_top_of_decay() {
        let cfg = config(0.9, 0.5);
        let mut traces = TraceTable::new();
        traces.visit(7, &cfg); // t = 0
        traces.visit(8, &cfg); // t = 1
        traces.visit(7, &cfg); // t = 2
        assert!((traces.get(7) - 1.2025).abs() < 1e-15);
        assert!(
            (traces.get(7) - closed_form_trace(&[0, 2], 2, 0.45)).abs() < 1e-15
        );
    }

    #[test]
    fn lambda_zero_wipes_history() {
        let cfg = config(0.9, 0.0);
        let mut traces = TraceTable::new();
        traces.visit(1, &cfg);
        traces.visit(2, &cfg);
        traces.visit(3, &cfg);
        assert_eq!(traces.get(1), 0.0);
        assert_eq!(traces.get(2), 0.0);
        assert_eq!(traces.get(3), 1.0);
    }

    #[test]
    fn traces_match_closed_form_over_random_histories() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let gamma = rng.random_range(0.1..1.0);
            let lambda = rng.random_range(0.0..1.0);
            let cfg = config(gamma, lambda);
            let gl = cfg.gamma_lambda();
            let n_states = rng.random_range(1..6u32);
            let len = rng.random_range(1..60usize);
            let history: Vec<StateId> =
                (0..len).map(|_| rng.random_range(0..n_states)).collect();
            let mut traces = TraceTable::new();
            for &s in &history {
                traces.visit(s, &cfg);
            }
            let t = len - 1;
            for state in 0..n_states {
                let visits: Vec<usize> = history
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| s == state)
                    .map(|(k, _)| k)
                    .collect();
                let expected = closed_form_trace(&visits, t, gl);
                assert!(
                    (traces.get(state) - expected).abs() < 1e-12,
                    "state {state}: {} vs {expected}",
                    traces.get(state)
                );
            }
        }
    }

    #[test]
    fn zero_error_changes_nothing() {
        let cfg = config(0.9, 0.5);
        let mut traces = TraceTable::new();
        traces.visit(3, &cfg);
        let mut utilities = TabularFunction::new(Arity::State);
        traces_learning_step(&mut utilities, &traces, 0.0, 0.5).unwrap();
        assert_eq!(utilities.state_value(3), 0.0);
    }

    #[test]
    fn lambda_zero_reduces_to_td0() {
        let cfg = config(0.9, 0.0);
        let mut traces = TraceTable::new();
        traces.visit(1, &cfg);
        traces.visit(2, &cfg);
        let mut utilities = TabularFunction::new(Arity::State);
        traces_learning_step(&mut utilities, &traces, 2.0, 0.25).unwrap();
        assert_eq!(utilities.state_value(1), 0.0);
        assert_eq!(utilities.state_value(2), 0.5);
    }
}
