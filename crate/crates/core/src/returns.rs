//! Return and error computations over the experience window.

use crate::buffer::ExperienceBuffer;
use crate::config::TdConfig;
use crate::error::{Error, Result};

/// One-step temporal-difference error: `r + gamma * U(x') - U(x)`.
pub fn td0_error(reward: f64, utility_next: f64, utility_current: f64, gamma: f64) -> f64 {
    reward + gamma * utility_next - utility_current
}

/// Backward pass producing the truncated return for every buffered record.
///
/// `z[0]` is the newest step's return `r_[0] + gamma * u_[0]` — the horizon
/// correction multiplies the last stored prediction by gamma alone, which is
/// the same as forcing lambda = 0 for that step. Each earlier record blends
/// the chained return with its own stored utility:
///
/// `z[k] = r_[k] + gamma * (lambda_k * z[k-1] + (1 - lambda_k) * u_[k])`
///
/// where `lambda_k` is the record's override when present. The reset
/// operation reuses this pass with the newest stored utility zeroed, so the
/// returns chain over real records only.
pub(crate) fn backward_returns(buffer: &ExperienceBuffer, config: &TdConfig) -> Vec<f64> {
    let mut out = Vec::with_capacity(buffer.len());
    let mut z = 0.0;
    for (k, record) in buffer.iter().enumerate() {
        if k == 0 {
            z = record.reward + config.gamma * record.stored_utility;
        } else {
            let lambda = record.lambda_override.unwrap_or(config.lambda);
            z = record.reward
                + config.gamma * (lambda * z + (1.0 - lambda) * record.stored_utility);
        }
        out.push(z);
    }
    out
}

/// The m-step truncated TD(λ) return for the oldest buffered step, computed
/// by the backward recursion over a full window.
pub fn ttd_return_iterative(buffer: &ExperienceBuffer, config: &TdConfig) -> Result<f64> {
    if !buffer.is_full() {
        return Err(Error::BufferNotFull {
            len: buffer.len(),
            capacity: buffer.capacity(),
        });
    }
    Ok(*backward_returns(buffer, config).last().expect("full buffer"))
}

/// Smallest truncation period whose residual discount is "small": the least
/// `m` with `(gamma*lambda)^m < ratio * gamma*lambda`.
pub fn choose_m_with_ratio(gamma_lambda: f64, ratio: f64) -> Result<usize> {
    if !(gamma_lambda > 0.0 && gamma_lambda < 1.0) {
        return Err(Error::DomainError {
            what: "gamma_lambda",
            value: gamma_lambda,
            domain: "(0, 1)",
        });
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::DomainError {
            what: "ratio",
            value: ratio,
            domain: "(0, 1)",
        });
    }
    let target = ratio * gamma_lambda;
    let mut power = gamma_lambda;
    let mut m = 1usize;
    while power >= target {
        power *= gamma_lambda;
        m += 1;
    }
    Ok(m)
}

/// [`choose_m_with_ratio`] at the conventional ratio of one tenth.
pub fn choose_m(gamma_lambda: f64) -> Result<usize> {
    choose_m_with_ratio(gamma_lambda, 0.1)
}
