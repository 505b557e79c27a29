//! Truncated temporal-difference learning toolkit.
//!
//! The central quantity is the m-step truncated TD(λ) return: a λ-weighted
//! blend of observed rewards and stored utility predictions over a sliding
//! window of the last `m` steps, with a bootstrap correction at the horizon.
//! Two engines compute it — a backward recursion over the experience buffer
//! and a constant-time incremental form — and three tabular learners (AHC,
//! Q-learning, advantage updating) consume it. The classical eligibility-trace
//! engine is included as the baseline the truncated form approximates.
//!
//! The [`env`] module provides the two benchmark tasks (car parking and
//! cart-pole balancing) behind box-quantized discrete state ids, and
//! [`harness`] runs multi-seed experiments and the randomized equivalence
//! checks.

pub mod buffer;
pub mod config;
pub mod env;
pub mod error;
pub mod harness;
pub mod incremental;
pub mod learner;
pub mod log;
pub mod policy;
pub mod returns;
pub mod table;
pub mod traces;

/// Discretized state identifier produced by a quantizer.
pub type StateId = u32;
/// Discrete action identifier, indexing into a merit vector.
pub type ActionId = u32;

pub use buffer::{ExperienceBuffer, ExperienceRecord};
pub use config::{Engine, TdConfig, DISCOUNT_FLOOR};
pub use error::{Error, Result};
pub use incremental::{incremental_step, resync, IncrementalEngine, IncrementalReturnState};
pub use learner::{
    advantage_learn, ahc_learn, q_learn, Algorithm, LearnerConfig, Session,
};
pub use log::{discrepancy_term, td_lambda_return_offline, EpisodeLog, EpisodeStep};
pub use policy::{boltzmann_select, PolicySample};
pub use returns::{choose_m, choose_m_with_ratio, td0_error, ttd_return_iterative};
pub use table::{Arity, TableKey, TabularFunction};
pub use traces::{traces_learning_step, TraceTable};
