//! The car parking task: a 2 m x 4 m car driving at constant speed inside a
//! walled area, to be parked fully inside a garage opening off one side.
//!
//! Episodes end with reward +1 when all four corners are strictly inside the
//! garage, or -1 when any side of the car crosses a wall. The geometry here
//! is pinned by [`shortest_success_depth`]: from the fixed start pose the
//! minimal action sequence reaching success is exactly 21 steps long, and the
//! exhaustive search below verifies it.

use std::collections::HashSet;

use super::{StepOutcome, Terminal};
use crate::error::{Error, Result};

/// Pose of the car: center coordinates and heading angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl CarState {
    /// The fixed episode start pose.
    pub const INITIAL: CarState = CarState {
        x: 6.15,
        y: 10.47,
        theta: 3.7,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarAction {
    Straight,
    Left,
    Right,
}

impl CarAction {
    pub const ALL: [CarAction; 3] = [CarAction::Straight, CarAction::Left, CarAction::Right];

    /// Arc radius of the move: 0 drives straight ahead.
    pub fn turn_radius(self) -> f64 {
        match self {
            CarAction::Straight => 0.0,
            CarAction::Left => -5.0,
            CarAction::Right => 5.0,
        }
    }

    pub fn index(self) -> u32 {
        match self {
            CarAction::Straight => 0,
            CarAction::Left => 1,
            CarAction::Right => 2,
        }
    }

    pub fn from_index(index: u32) -> Option<CarAction> {
        CarAction::ALL.get(index as usize).copied()
    }
}

/// Axis-aligned rectangle as [x0, x1] x [y0, y1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn contains_strict(&self, x: f64, y: f64) -> bool {
        x > self.x0 && x < self.x1 && y > self.y0 && y < self.y1
    }
}

type Segment = ((f64, f64), (f64, f64));

/// Dimensions of the car, garage, driving area, and motion constants.
///
/// The layout: a 10 x 10 driving area sits above a garage that opens upward
/// through the shared boundary line; the garage's other three sides and the
/// rest of the area boundary are walls. The start pose, speed, and step size
/// make the shortest successful parking sequence exactly 21 actions.
#[derive(Debug, Clone)]
pub struct CarGeometry {
    pub car_width: f64,
    pub car_length: f64,
    /// Success region: the car must be strictly inside this rectangle.
    pub garage: Rect,
    /// Bounded region the car drives in before entering the garage.
    pub area: Rect,
    pub velocity: f64,
    pub time_step: f64,
    walls: Vec<Segment>,
}

impl Default for CarGeometry {
    fn default() -> Self {
        let garage = Rect {
            x0: 1.5,
            y0: -3.0,
            x1: 8.5,
            y1: 3.0,
        };
        let area = Rect {
            x0: -1.5,
            y0: 3.0,
            x1: 8.5,
            y1: 13.0,
        };
        CarGeometry::new(2.0, 4.0, garage, area, 1.0, 0.5)
    }
}

impl CarGeometry {
    pub fn new(
        car_width: f64,
        car_length: f64,
        garage: Rect,
        area: Rect,
        velocity: f64,
        time_step: f64,
    ) -> Self {
        // The garage mouth is the stretch of the shared line y = area.y0
        // between the garage's x-range; everything else is a wall.
        let walls = vec![
            // Driving-area boundary.
            ((area.x0, area.y0), (area.x0, area.y1)),
            ((area.x0, area.y1), (area.x1, area.y1)),
            ((area.x1, area.y0), (area.x1, area.y1)),
            ((area.x0, area.y0), (garage.x0, area.y0)),
            // The garage's three closed sides.
            ((garage.x0, garage.y0), (garage.x0, garage.y1)),
            ((garage.x0, garage.y0), (garage.x1, garage.y0)),
            ((garage.x1, garage.y0), (garage.x1, garage.y1)),
        ];
        CarGeometry {
            car_width,
            car_length,
            garage,
            area,
            velocity,
            time_step,
            walls,
        }
    }

    pub fn walls(&self) -> &[Segment] {
        &self.walls
    }

    /// Corner coordinates in cyclic order.
    pub fn corners(&self, state: &CarState) -> [(f64, f64); 4] {
        let (sin_t, cos_t) = state.theta.sin_cos();
        let (ax, ay) = (cos_t * self.car_length / 2.0, sin_t * self.car_length / 2.0);
        let (px, py) = (-sin_t * self.car_width / 2.0, cos_t * self.car_width / 2.0);
        [
            (state.x + ax + px, state.y + ay + py),
            (state.x + ax - px, state.y + ay - py),
            (state.x - ax - px, state.y - ay - py),
            (state.x - ax + px, state.y - ay + py),
        ]
    }
}

fn orientation(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> f64 {
    (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
}

fn on_segment(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> bool {
    r.0 >= p.0.min(q.0) && r.0 <= p.0.max(q.0) && r.1 >= p.1.min(q.1) && r.1 <= p.1.max(q.1)
}

/// Proper and degenerate segment intersection.
fn segments_intersect(a: Segment, b: Segment) -> bool {
    let o1 = orientation(a.0, a.1, b.0);
    let o2 = orientation(a.0, a.1, b.1);
    let o3 = orientation(b.0, b.1, a.0);
    let o4 = orientation(b.0, b.1, a.1);
    if ((o1 > 0.0) != (o2 > 0.0) && o1 != 0.0 && o2 != 0.0)
        && ((o3 > 0.0) != (o4 > 0.0) && o3 != 0.0 && o4 != 0.0)
    {
        return true;
    }
    (o1 == 0.0 && on_segment(a.0, a.1, b.0))
        || (o2 == 0.0 && on_segment(a.0, a.1, b.1))
        || (o3 == 0.0 && on_segment(b.0, b.1, a.0))
        || (o4 == 0.0 && on_segment(b.0, b.1, a.1))
}

/// Wall-hit test: any side of the car intersecting any wall segment.
pub fn car_is_failure(state: &CarState, geometry: &CarGeometry) -> bool {
    let corners = geometry.corners(state);
    for i in 0..4 {
        let side = (corners[i], corners[(i + 1) % 4]);
        for &wall in geometry.walls() {
            if segments_intersect(side, wall) {
                return true;
            }
        }
    }
    false
}

/// Success test: all four corners strictly inside the garage rectangle.
pub fn car_is_success(state: &CarState, geometry: &CarGeometry) -> bool {
    geometry
        .corners(state)
        .iter()
        .all(|&(x, y)| geometry.garage.contains_strict(x, y))
}

/// One motion step followed by the wall test and then the success test.
pub fn car_step(
    state: &CarState,
    action: CarAction,
    geometry: &CarGeometry,
) -> Result<StepOutcome<CarState>> {
    if car_is_failure(state, geometry) || car_is_success(state, geometry) {
        return Err(Error::EpisodeFinished);
    }
    let r = action.turn_radius();
    let v = geometry.velocity;
    let tau = geometry.time_step;
    let next = if r != 0.0 {
        let theta = state.theta + tau * v / r;
        CarState {
            x: state.x - r * state.theta.sin() + r * theta.sin(),
            y: state.y + r * state.theta.cos() - r * theta.cos(),
            theta,
        }
    } else {
        CarState {
            x: state.x + tau * v * state.theta.cos(),
            y: state.y + tau * v * state.theta.sin(),
            theta: state.theta,
        }
    };
    let (reward, terminal) = if car_is_failure(&next, geometry) {
        (-1.0, Terminal::Failure)
    } else if car_is_success(&next, geometry) {
        (1.0, Terminal::Success)
    } else {
        (0.0, Terminal::None)
    };
    Ok(StepOutcome {
        next_state: next,
        reward,
        terminal,
    })
}

/// Outcome of the exhaustive shortest-path search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    /// Depth of the first level containing a success, if one was found
    /// within the searched horizon.
    pub success_depth: Option<usize>,
    /// Number of successful poses at that depth.
    pub successes: u64,
    pub expanded: u64,
    pub visited: u64,
}

/// Smallest rectangle that must contain the car's center in any successful
/// pose: the corner spread from the center is at least 1 m on each axis.
fn parked_center_bounds(geometry: &CarGeometry) -> Rect {
    Rect {
        x0: geometry.garage.x0 + 1.0,
        y0: geometry.garage.y0 + 1.0,
        x1: geometry.garage.x1 - 1.0,
        y1: geometry.garage.y1 - 1.0,
    }
}

/// Quantized pose key for visited-set deduplication at 1e-6 resolution.
/// Headings are exact multiples of 0.1 rad off the start heading, so the
/// turn count is stored directly.
fn pose_key(state: &CarState) -> u64 {
    let qx = ((state.x + 2.0) * 1e6).round() as u64; // < 2^24
    let qy = ((state.y + 4.0) * 1e6).round() as u64; // < 2^25
    let turns = ((state.theta - CarState::INITIAL.theta) / 0.1).round() as i64;
    let qt = (turns + 512) as u64; // < 2^10
    (qx << 35) | (qy << 10) | qt
}

/// Breadth-first search over exact continuous poses from the fixed start,
/// deduplicated on a 1e-6 grid, reporting the depth of the first success.
///
/// States that provably cannot reach a successful pose within the remaining
/// depth (each step displaces the center by at most velocity * time_step)
/// are pruned, which keeps the frontier small without affecting minimality.
pub fn shortest_success_depth(geometry: &CarGeometry, max_depth: usize) -> SearchReport {
    let step_reach = geometry.velocity * geometry.time_step;
    let target = parked_center_bounds(geometry);
    let reachable = |state: &CarState, steps_left: usize| {
        let dx = (target.x0 - state.x).max(state.x - target.x1).max(0.0);
        let dy = (target.y0 - state.y).max(state.y - target.y1).max(0.0);
        let distance = (dx * dx + dy * dy).sqrt();
        distance <= step_reach * steps_left as f64 + 1e-9
    };

    let mut visited: HashSet<u64> = HashSet::new();
    let mut frontier = vec![CarState::INITIAL];
    visited.insert(pose_key(&CarState::INITIAL));
    let mut expanded = 0u64;

    for depth in 1..=max_depth {
        let steps_left = max_depth - depth;
        let mut next_frontier = Vec::new();
        let mut successes = 0u64;
        for state in &frontier {
            expanded += 1;
            for action in CarAction::ALL {
                let outcome = car_step(state, action, geometry).expect("frontier poses are live");
                match outcome.terminal {
                    Terminal::Success => successes += 1,
                    Terminal::Failure => {}
                    Terminal::None => {
                        if reachable(&outcome.next_state, steps_left)
                            && visited.insert(pose_key(&outcome.next_state))
                        {
                            next_frontier.push(outcome.next_state);
                        }
                    }
                }
            }
        }
        if successes > 0 {
            return SearchReport {
                success_depth: Some(depth),
                successes,
                expanded,
                visited: visited.len() as u64,
            };
        }
        frontier = next_frontier;
        if frontier.is_empty() {
            break;
        }
    }
    SearchReport {
        success_depth: None,
        successes: 0,
        expanded,
        visited: visited.len() as u64,
    }
}
