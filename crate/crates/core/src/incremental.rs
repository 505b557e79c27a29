//! Constant-time maintenance of the truncated return.
//!
//! The truncated return for the oldest buffered step decomposes into a
//! discounted reward sum `S`, a discounted stored-utility sum `T`, and a
//! horizon correction `W`. Shifting the window one step forward updates `S`
//! and `T` in O(1) and recomputes `W` directly from the newest record.
//!
//! Each shift divides by gamma*lambda, so accumulated floating-point error is
//! amplified by `1/(gamma*lambda)` per step. [`IncrementalEngine`] therefore
//! recomputes the state exactly from the buffer on a cadence capped by
//! [`stable_resync_period`]; without that cap the drift for small
//! gamma*lambda overwhelms the result within tens of steps.

use crate::buffer::{ExperienceBuffer, ExperienceRecord};
use crate::config::{TdConfig, DISCOUNT_FLOOR};
use crate::error::{Error, Result};

/// The (S, T, W) decomposition of the truncated return for the oldest
/// buffered step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IncrementalReturnState {
    /// Discounted reward sum over the window.
    pub s_acc: f64,
    /// Discounted sum of stored utilities, weighted by gamma*(1 - lambda).
    pub t_acc: f64,
    /// Horizon correction: the newest stored utility discounted to the
    /// oldest step.
    pub w_term: f64,
}

impl IncrementalReturnState {
    /// The truncated return this state represents.
    pub fn value(&self) -> f64 {
        self.s_acc + self.t_acc + self.w_term
    }
}

/// Shift the return state one step forward: drop the departing (oldest)
/// record's contributions, admit the arriving (newest) record's.
pub fn incremental_step(
    state: &IncrementalReturnState,
    departing_reward: f64,
    departing_utility: f64,
    arriving_reward: f64,
    arriving_utility: f64,
    config: &TdConfig,
) -> Result<IncrementalReturnState> {
    let gl = config.gamma_lambda();
    if gl <= DISCOUNT_FLOOR {
        return Err(Error::DegenerateDiscount {
            gamma_lambda: gl,
            floor: DISCOUNT_FLOOR,
        });
    }
    let m = config.m as i32;
    let lambda = config.lambda;
    let s_acc = (state.s_acc - departing_reward + gl.powi(m) * arriving_reward) / gl;
    let t_acc = (state.t_acc - config.gamma * (1.0 - lambda) * departing_utility
        + (1.0 - lambda) * state.w_term)
        / gl;
    let w_term = gl.powi(m - 1) * config.gamma * arriving_utility;
    Ok(IncrementalReturnState {
        s_acc,
        t_acc,
        w_term,
    })
}

/// Recompute the (S, T, W) state exactly from a full buffer via the defining
/// sums, discarding any accumulated drift.
pub fn resync(buffer: &ExperienceBuffer, config: &TdConfig) -> Result<IncrementalReturnState> {
    if !buffer.is_full() {
        return Err(Error::BufferNotFull {
            len: buffer.len(),
            capacity: buffer.capacity(),
        });
    }
    let m = config.m;
    let gl = config.gamma_lambda();
    let mut s_acc = 0.0;
    let mut t_acc = 0.0;
    let mut w_term = 0.0;
    let mut weight = 1.0;
    for k in 0..m {
        // k-th term counts from the oldest step; buffer index m-1-k.
        let record = buffer.get(m - 1 - k).expect("full buffer");
        s_acc += weight * record.reward;
        if k < m - 1 {
            t_acc += weight * config.gamma * (1.0 - config.lambda) * record.stored_utility;
        } else {
            w_term = weight * config.gamma * record.stored_utility;
        }
        weight *= gl;
    }
    Ok(IncrementalReturnState {
        s_acc,
        t_acc,
        w_term,
    })
}

/// Default cadence for exact recomputation, an upper bound on top of the
/// numerically stable period.
pub const DEFAULT_RESYNC_PERIOD: usize = 1000;

/// Largest number of consecutive incremental shifts that keeps the amplified
/// round-off comfortably below 1e-12 of scale. Error grows by a factor of
/// `1/(gamma*lambda)` per shift, so the span satisfies
/// `(1/gl)^n <= 1e4` over machine epsilon.
pub fn stable_resync_period(gamma_lambda: f64) -> usize {
    if gamma_lambda >= 1.0 {
        return usize::MAX;
    }
    let ln_gl = gamma_lambda.ln();
    let span = (1e4_f64.ln() / -ln_gl).floor();
    if span < 1.0 {
        1
    } else if span >= usize::MAX as f64 {
        usize::MAX
    } else {
        span as usize
    }
}

/// Constant-time return engine with scheduled exact recomputation.
#[derive(Debug, Clone)]
pub struct IncrementalEngine {
    state: IncrementalReturnState,
    steps_since_resync: usize,
    effective_period: usize,
    primed: bool,
}

impl IncrementalEngine {
    /// `requested_period` is the configured resync cadence; the engine uses
    /// the smaller of it and the numerically stable span for this discount.
    pub fn new(config: &TdConfig, requested_period: usize) -> Result<Self> {
        let gl = config.gamma_lambda();
        if gl <= DISCOUNT_FLOOR {
            return Err(Error::DegenerateDiscount {
                gamma_lambda: gl,
                floor: DISCOUNT_FLOOR,
            });
        }
        let effective_period = requested_period.max(1).min(stable_resync_period(gl));
        Ok(IncrementalEngine {
            state: IncrementalReturnState::default(),
            steps_since_resync: 0,
            effective_period,
            primed: false,
        })
    }

    pub fn effective_period(&self) -> usize {
        self.effective_period
    }

    pub fn is_primed(&self) -> bool {
        self.primed
    }

    pub fn state(&self) -> &IncrementalReturnState {
        &self.state
    }

    /// Initialize from a freshly filled buffer.
    pub fn prime(&mut self, buffer: &ExperienceBuffer, config: &TdConfig) -> Result<()> {
        self.state = resync(buffer, config)?;
        self.steps_since_resync = 0;
        self.primed = true;
        Ok(())
    }

    /// Advance past one buffer shift and return the truncated return for the
    /// new oldest step. `buffer_after` is the post-insertion window; it backs
    /// the scheduled exact recomputation.
    pub fn advance(
        &mut self,
        departing: &ExperienceRecord,
        buffer_after: &ExperienceBuffer,
        config: &TdConfig,
    ) -> Result<f64> {
        if !self.primed {
            return Err(Error::InvalidConfig(
                "incremental engine advanced before priming".into(),
            ));
        }
        let arriving = buffer_after.newest().ok_or(Error::BufferNotFull {
            len: 0,
            capacity: buffer_after.capacity(),
        })?;
        debug_assert!(
            arriving.lambda_override.is_none() && departing.lambda_override.is_none(),
            "incremental engine cannot honor per-step lambda overrides"
        );
        self.state = incremental_step(
            &self.state,
            departing.reward,
            departing.stored_utility,
            arriving.reward,
            arriving.stored_utility,
            config,
        )?;
        self.steps_since_resync += 1;
        if self.steps_since_resync >= self.effective_period {
            self.prime(buffer_after, config)?;
        }
        Ok(self.state.value())
    }

    /// Drop the current state; the next full buffer must re-prime.
    pub fn invalidate(&mut self) {
        self.primed = false;
        self.state = IncrementalReturnState::default();
        self.steps_since_resync = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::returns::ttd_return_iterative;
    use rand::{Rng, SeedableRng};

    fn push_random(
        buf: &mut ExperienceBuffer,
        rng: &mut impl Rng,
    ) -> ExperienceRecord {
        let record = ExperienceRecord::new(
            0,
            0,
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        buf.push(record);
        record
    }

    #[test]
    fn constant_stream_is_a_fixed_point() {
        let config = TdConfig::incremental(0.9, 0.8, 7).unwrap();
        let mut buf = ExperienceBuffer::new(7);
        for _ in 0..7 {
            buf.push(ExperienceRecord::new(0, 0, 0.25, -1.5));
        }
        let state = resync(&buf, &config).unwrap();
        let next = incremental_step(&state, 0.25, -1.5, 0.25, -1.5, &config).unwrap();
        assert!((next.s_acc - state.s_acc).abs() < 1e-12);
        assert!((next.t_acc - state.t_acc).abs() < 1e-12);
        assert!((next.w_term - state.w_term).abs() < 1e-12);
    }

    #[test]
    fn lambda_one_keeps_t_at_zero() {
        let config = TdConfig::incremental(0.9, 1.0, 5).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let mut buf = ExperienceBuffer::new(5);
        for _ in 0..5 {
            push_random(&mut buf, &mut rng);
        }
        let mut state = resync(&buf, &config).unwrap();
        assert_eq!(state.t_acc, 0.0);
        for _ in 0..50 {
            let departing = *buf.oldest().unwrap();
            let arriving = push_random(&mut buf, &mut rng);
            state = incremental_step(
                &state,
                departing.reward,
                departing.stored_utility,
                arriving.reward,
                arriving.stored_utility,
                &config,
            )
            .unwrap();
            assert_eq!(state.t_acc, 0.0);
        }
    }

    #[test]
    fn degenerate_discount_is_refused() {
        let config = TdConfig::iterative(0.9, 0.0, 3).unwrap();
        let state = IncrementalReturnState::default();
        assert!(matches!(
            incremental_step(&state, 0.0, 0.0, 0.0, 0.0, &config),
            Err(Error::DegenerateDiscount { .. })
        ));
    }

    #[test]
    fn resync_matches_iterative_immediately() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let m = rng.random_range(1..=30);
            let gamma = rng.random_range(0.5..1.0);
            let lambda = rng.random_range(0.1..1.0);
            let config = TdConfig::incremental(gamma, lambda, m).unwrap();
            let mut buf = ExperienceBuffer::new(m);
            for _ in 0..m {
                push_random(&mut buf, &mut rng);
            }
            let state = resync(&buf, &config).unwrap();
            let z = ttd_return_iterative(&buf, &config).unwrap();
            let scale = 1.0_f64.max(z.abs());
            assert!(
                (state.value() - z).abs() / scale < 1e-12,
                "m={m} gamma={gamma} lambda={lambda}"
            );
        }
    }

    #[test]
    fn resync_of_zero_stream_is_zero() {
        let config = TdConfig::incremental(0.9, 0.5, 4).unwrap();
        let mut buf = ExperienceBuffer::new(4);
        for _ in 0..4 {
            buf.push(ExperienceRecord::new(0, 0, 0.0, 0.0));
        }
        let state = resync(&buf, &config).unwrap();
        assert_eq!(state, IncrementalReturnState::default());
    }

    #[test]
    fn resync_requires_full_buffer() {
        let config = TdConfig::incremental(0.9, 0.5, 4).unwrap();
        let buf = ExperienceBuffer::new(4);
        assert!(matches!(
            resync(&buf, &config),
            Err(Error::BufferNotFull { .. })
        ));
    }

    /// Raw (unsynced) stepping drifts; a 100-step cadence holds it far below
    /// the tolerance whereupon recomputation zeroes it.
    #[test]
    fn drift_with_and_without_resync() {
        let gamma = 0.95;
        let lambda = 0.9;
        let m = 25;
        let config = TdConfig::incremental(gamma, lambda, m).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(77);

        let mut buf = ExperienceBuffer::new(m);
        for _ in 0..m {
            push_random(&mut buf, &mut rng);
        }
        let mut raw = resync(&buf, &config).unwrap();
        let mut synced = raw;
        let mut max_drift_synced = 0.0_f64;
        let mut max_drift_raw = 0.0_f64;
        let mut post_resync_drift = 0.0_f64;

        for step in 1..=10_000usize {
            let departing = *buf.oldest().unwrap();
            let arriving = push_random(&mut buf, &mut rng);
            let reference = ttd_return_iterative(&buf, &config).unwrap();
            let scale = 1.0_f64.max(reference.abs());

            raw = incremental_step(
                &raw,
                departing.reward,
                departing.stored_utility,
                arriving.reward,
                arriving.stored_utility,
                &config,
            )
            .unwrap();
            let raw_drift = (raw.value() - reference).abs() / scale;
            if raw_drift.is_finite() {
                max_drift_raw = max_drift_raw.max(raw_drift);
            } else {
                max_drift_raw = f64::INFINITY;
            }

            synced = incremental_step(
                &synced,
                departing.reward,
                departing.stored_utility,
                arriving.reward,
                arriving.stored_utility,
                &config,
            )
            .unwrap();
            max_drift_synced = max_drift_synced.max((synced.value() - reference).abs() / scale);
            if step % 100 == 0 {
                synced = resync(&buf, &config).unwrap();
                post_resync_drift =
                    post_resync_drift.max((synced.value() - reference).abs() / scale);
            }
        }

        assert!(post_resync_drift < 1e-12, "post-resync {post_resync_drift}");
        assert!(max_drift_synced <= 1e-6, "pre-resync {max_drift_synced}");
        assert!(
            max_drift_raw.is_nan() || max_drift_raw > 1e-6,
            "unsynced drift should blow up, got {max_drift_raw}"
        );
    }

    /// 1e5-step stream at a representative discount: engine output tracks the
    /// iterative recursion to 1e-9 relative.
    #[test]
    fn long_stream_engine_matches_iterative() {
        let config = TdConfig::incremental(0.95, 0.9, 25).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
        let mut buf = ExperienceBuffer::new(25);
        let mut engine = IncrementalEngine::new(&config, DEFAULT_RESYNC_PERIOD).unwrap();
        for _ in 0..25 {
            push_random(&mut buf, &mut rng);
        }
        engine.prime(&buf, &config).unwrap();
        let mut max_rel = 0.0_f64;
        for _ in 0..100_000 {
            let departing = *buf.oldest().unwrap();
            push_random(&mut buf, &mut rng);
            let z = engine.advance(&departing, &buf, &config).unwrap();
            let reference = ttd_return_iterative(&buf, &config).unwrap();
            let rel = (z - reference).abs() / 1.0_f64.max(reference.abs());
            max_rel = max_rel.max(rel);
        }
        assert!(max_rel <= 1e-9, "max relative deviation {max_rel}");
    }

    #[test]
    fn stability_cap_tightens_for_small_discounts() {
        assert!(stable_resync_period(0.3) < 10);
        assert!(stable_resync_period(0.855) < 100);
        assert!(stable_resync_period(0.99) > 500);
        assert_eq!(stable_resync_period(1.0), usize::MAX);
    }
}
