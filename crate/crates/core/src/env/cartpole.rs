//! Cart-pole balancing: a pole hinged to a cart on a bounded track, pushed
//! left or right with a fixed-magnitude force at every tick.

use super::{StepOutcome, Terminal};
use crate::error::{Error, Result};

/// Cart position/velocity and pole angle/angular velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartPoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

impl CartPoleState {
    /// Episodes start balanced and at rest in the middle of the track.
    pub const START: CartPoleState = CartPoleState {
        x: 0.0,
        x_dot: 0.0,
        theta: 0.0,
        theta_dot: 0.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CartPoleAction {
    PushLeft,
    PushRight,
}

impl CartPoleAction {
    pub const ALL: [CartPoleAction; 2] = [CartPoleAction::PushLeft, CartPoleAction::PushRight];

    pub fn index(self) -> u32 {
        match self {
            CartPoleAction::PushLeft => 0,
            CartPoleAction::PushRight => 1,
        }
    }

    pub fn from_index(index: u32) -> Option<CartPoleAction> {
        CartPoleAction::ALL.get(index as usize).copied()
    }
}

/// Physical constants of the simulated system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartPoleParams {
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    /// Half of the pole length.
    pub pole_half_length: f64,
    /// Friction coefficient of the cart on the track.
    pub cart_friction: f64,
    /// Friction coefficient of the pole on the cart.
    pub pole_friction: f64,
    pub force_magnitude: f64,
    pub time_step: f64,
    /// Pole-angle failure threshold (strict).
    pub theta_limit: f64,
    /// Track half-length failure threshold (strict).
    pub x_limit: f64,
}

impl Default for CartPoleParams {
    fn default() -> Self {
        CartPoleParams {
            gravity: 9.8,
            cart_mass: 1.0,
            pole_mass: 0.1,
            pole_half_length: 0.5,
            cart_friction: 0.0005,
            pole_friction: 0.000002,
            force_magnitude: 10.0,
            time_step: 0.02,
            theta_limit: 0.21,
            x_limit: 2.4,
        }
    }
}

impl CartPoleParams {
    /// For the energy-drift check: no friction, no applied force.
    pub fn frictionless(mut self) -> Self {
        self.cart_friction = 0.0;
        self.pole_friction = 0.0;
        self
    }
}

fn signum_zero(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Accelerations for the given state and applied force. The angular equation
/// is self-contained and evaluated first; the linear one then uses it.
pub fn cartpole_derivatives(
    state: &CartPoleState,
    force: f64,
    params: &CartPoleParams,
) -> (f64, f64) {
    let (sin_t, cos_t) = state.theta.sin_cos();
    let total_mass = params.cart_mass + params.pole_mass;
    let ml = params.pole_mass * params.pole_half_length;
    let friction = params.cart_friction * signum_zero(state.x_dot);

    let theta_ddot = (params.gravity * sin_t
        + cos_t * ((-force - ml * state.theta_dot.powi(2) * sin_t + friction) / total_mass)
        - params.pole_friction * state.theta_dot / ml)
        / (params.pole_half_length
            * (4.0 / 3.0 - params.pole_mass * cos_t.powi(2) / total_mass));

    let x_ddot =
        (force + ml * (state.theta_dot.powi(2) * sin_t - theta_ddot * cos_t) - friction)
            / total_mass;

    (x_ddot, theta_ddot)
}

pub fn is_cartpole_failure(state: &CartPoleState, params: &CartPoleParams) -> bool {
    state.theta.abs() > params.theta_limit || state.x.abs() > params.x_limit
}

/// One explicit Euler step: every variable advances by tau times its
/// derivative at the pre-step state.
pub fn cartpole_step(
    state: &CartPoleState,
    action: CartPoleAction,
    params: &CartPoleParams,
) -> Result<StepOutcome<CartPoleState>> {
    if is_cartpole_failure(state, params) {
        return Err(Error::EpisodeFinished);
    }
    let force = match action {
        CartPoleAction::PushLeft => -params.force_magnitude,
        CartPoleAction::PushRight => params.force_magnitude,
    };
    let (x_ddot, theta_ddot) = cartpole_derivatives(state, force, params);
    let tau = params.time_step;
    let next = CartPoleState {
        x: state.x + tau * state.x_dot,
        x_dot: state.x_dot + tau * x_ddot,
        theta: state.theta + tau * state.theta_dot,
        theta_dot: state.theta_dot + tau * theta_ddot,
    };
    let (reward, terminal) = if is_cartpole_failure(&next, params) {
        (-1.0, Terminal::Failure)
    } else {
        (0.0, Terminal::None)
    };
    Ok(StepOutcome {
        next_state: next,
        reward,
        terminal,
    })
}

/// Regression pin: energy drift over 100 frictionless unforced Euler steps
/// from theta = 0.05 at rest. Explicit Euler is not conservative; this value
/// documents the reproducible drift of this integrator.
pub const ENERGY_DRIFT_PIN: f64 = 0.093_490_930_179_465_8;

/// Total mechanical energy of cart plus (uniform rod) pole, for the
/// frictionless drift regression.
pub fn mechanical_energy(state: &CartPoleState, params: &CartPoleParams) -> f64 {
    let l = params.pole_half_length;
    let mp = params.pole_mass;
    let kinetic_cart = 0.5 * params.cart_mass * state.x_dot.powi(2);
    let kinetic_pole = 0.5 * mp * state.x_dot.powi(2)
        + mp * l * state.x_dot * state.theta_dot * state.theta.cos()
        + (2.0 / 3.0) * mp * l.powi(2) * state.theta_dot.powi(2);
    let potential = mp * params.gravity * l * state.theta.cos();
    kinetic_cart + kinetic_pole + potential
}
