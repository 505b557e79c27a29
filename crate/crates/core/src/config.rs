use crate::error::{Error, Result};

/// How the truncated return for the oldest buffered step is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Backward recursion over the experience buffer, O(m) per step.
    /// Supports per-step lambda overrides.
    Iterative,
    /// Constant-time maintenance of the return decomposition, with periodic
    /// exact recomputation from the buffer. Requires a fixed lambda and
    /// gamma*lambda above [`DISCOUNT_FLOOR`].
    Incremental,
}

impl Engine {
    pub fn parse(s: &str) -> Result<Engine> {
        match s.trim().to_ascii_lowercase().as_str() {
            "iterative" => Ok(Engine::Iterative),
            "incremental" => Ok(Engine::Incremental),
            other => Err(Error::Parse(format!("unknown engine `{other}`"))),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Engine::Iterative => write!(f, "iterative"),
            Engine::Incremental => write!(f, "incremental"),
        }
    }
}

/// Below this product of gamma and lambda the incremental engine refuses to
/// run: its recursions divide by gamma*lambda.
pub const DISCOUNT_FLOOR: f64 = 1e-6;

/// Discount, recency, and truncation parameters shared by every return
/// computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdConfig {
    /// Discount factor, in [0, 1].
    pub gamma: f64,
    /// Recency factor, in [0, 1].
    pub lambda: f64,
    /// Truncation period: the experience window holds the last `m` steps.
    pub m: usize,
    pub engine: Engine,
}

impl TdConfig {
    pub fn new(gamma: f64, lambda: f64, m: usize, engine: Engine) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) || !gamma.is_finite() {
            return Err(Error::DomainError {
                what: "gamma",
                value: gamma,
                domain: "[0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
            return Err(Error::DomainError {
                what: "lambda",
                value: lambda,
                domain: "[0, 1]",
            });
        }
        if m == 0 {
            return Err(Error::InvalidConfig("truncation period m must be >= 1".into()));
        }
        let config = TdConfig {
            gamma,
            lambda,
            m,
            engine,
        };
        if engine == Engine::Incremental && config.gamma_lambda() <= DISCOUNT_FLOOR {
            return Err(Error::DegenerateDiscount {
                gamma_lambda: config.gamma_lambda(),
                floor: DISCOUNT_FLOOR,
            });
        }
        Ok(config)
    }

    pub fn iterative(gamma: f64, lambda: f64, m: usize) -> Result<Self> {
        Self::new(gamma, lambda, m, Engine::Iterative)
    }

    pub fn incremental(gamma: f64, lambda: f64, m: usize) -> Result<Self> {
        Self::new(gamma, lambda, m, Engine::Incremental)
    }

    /// The combined per-step discount applied to older prediction differences.
    pub fn gamma_lambda(&self) -> f64 {
        self.gamma * self.lambda
    }
}
