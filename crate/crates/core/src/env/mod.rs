//! Benchmark environments: car parking and cart-pole balancing, plus the box
//! quantizers that map their continuous states to table indices.

pub mod car;
pub mod cartpole;
pub mod quantizer;

pub use car::{
    car_is_failure, car_is_success, car_step, shortest_success_depth, CarAction, CarGeometry,
    CarState, SearchReport,
};
pub use cartpole::{
    cartpole_derivatives, cartpole_step, is_cartpole_failure, mechanical_energy, CartPoleAction,
    CartPoleParams, CartPoleState,
};
pub use quantizer::{car_quantizer, cartpole_quantizer, Quantizer};

/// How a step ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    None,
    Success,
    Failure,
}

impl Terminal {
    pub fn is_terminal(self) -> bool {
        self != Terminal::None
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome<S> {
    pub next_state: S,
    pub reward: f64,
    pub terminal: Terminal,
}
