//! Numerical integration of the replicator field and itinerary extraction.
//!
//! The integrator is a classical fixed-step 4th-order Runge–Kutta scheme.  A
//! fixed step is deliberate: trajectories of interest spend most of their
//! time creeping along saddle equilibria where adaptive controllers stall.
//! After each step, negative coordinates are clamped to zero (so faces are
//! absorbing numerically, matching the exact dynamics, which never crosses a
//! face) and each player's simplex is renormalised; a coordinate more
//! negative than `−1e−9` before clamping rejects the step as a signal that
//! the step size is too large.  Coordinates that are exactly zero stay
//! exactly zero without any special casing, because every Runge–Kutta stage
//! multiplies by the coordinate itself.
//!
//! The itinerary of a trajectory is the sequence of its visits near the nine
//! vertex equilibria, labelled by the node group the vertex belongs to;
//! grazing visits shorter than five steps are discarded as noise.

use crate::game::{GameState, PayoffParams, ReplicatorField};
use crate::network::{build_quotient_network, NodeLabel, Player, Vertex};
use std::sync::OnceLock;
use thiserror::Error;

/// Default integrator step size.
pub const DEFAULT_DT: f64 = 1e-3;
/// Default vertex-proximity threshold for itineraries.
pub const DEFAULT_NEAR_THRESHOLD: f64 = 0.1;

/// Errors raised by the integrator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    /// A coordinate fell below `−1e−9` before clamping: the step size is too
    /// large for the local dynamics.
    #[error("step to t = {time} drove coordinate {index} to {value:e}; reduce dt")]
    StepRejected { time: f64, index: usize, value: f64 },
}

/// A single-step driver around the replicator field; usable directly when
/// the full state history is not needed.
pub struct Stepper {
    field: ReplicatorField,
    state: [f64; 6],
    dt: f64,
    steps_taken: u64,
    max_sum_drift: f64,
}

impl Stepper {
    pub fn new(initial: &GameState, params: &PayoffParams, dt: f64) -> Self {
        assert!(dt > 0.0 && dt.is_finite(), "step size must be positive");
        Self {
            field: ReplicatorField::new(params),
            state: initial.as_array(),
            dt,
            steps_taken: 0,
            max_sum_drift: 0.0,
        }
    }

    pub fn time(&self) -> f64 {
        self.steps_taken as f64 * self.dt
    }

    pub fn state(&self) -> [f64; 6] {
        self.state
    }

    pub fn game_state(&self) -> GameState {
        GameState::from_array(self.state).expect("stepper state stays on the simplex pair")
    }

    /// Largest pre-renormalisation deviation of a simplex sum from one seen
    /// so far.
    pub fn max_sum_drift(&self) -> f64 {
        self.max_sum_drift
    }

    /// Advance by one step of size `dt`.
    pub fn step(&mut self) -> Result<(), FlowError> {
        let dt = self.dt;
        let y = &self.state;
        let k1 = self.field.eval(y);
        let k2 = self.field.eval(&stage(y, &k1, dt / 2.0));
        let k3 = self.field.eval(&stage(y, &k2, dt / 2.0));
        let k4 = self.field.eval(&stage(y, &k3, dt));
        let mut next = [0.0; 6];
        for i in 0..6 {
            next[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t_next = (self.steps_taken + 1) as f64 * dt;
        for (i, &c) in next.iter().enumerate() {
            if c < -1e-9 {
                return Err(FlowError::StepRejected { time: t_next, index: i, value: c });
            }
        }
        for c in &mut next {
            if *c < 0.0 {
                *c = 0.0;
            }
        }
        for half in 0..2 {
            let s = next[3 * half] + next[3 * half + 1] + next[3 * half + 2];
            let drift = (s - 1.0).abs();
            if drift > self.max_sum_drift {
                self.max_sum_drift = drift;
            }
            for i in 0..3 {
                next[3 * half + i] /= s;
            }
        }
        self.state = next;
        self.steps_taken += 1;
        Ok(())
    }
}

#[inline]
fn stage(y: &[f64; 6], k: &[f64; 6], h: f64) -> [f64; 6] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

/// A time-ordered record of an integrated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<GameState>,
    dt: f64,
    max_sum_drift: f64,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[GameState] {
        &self.states
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &GameState {
        self.states.last().expect("a trajectory contains its initial state")
    }

    /// Largest pre-renormalisation deviation of a simplex sum from one along
    /// the whole trajectory.
    pub fn max_sum_drift(&self) -> f64 {
        self.max_sum_drift
    }

    #[cfg(test)]
    pub(crate) fn from_samples(times: Vec<f64>, states: Vec<GameState>, dt: f64) -> Self {
        assert_eq!(times.len(), states.len());
        Self { times, states, dt, max_sum_drift: 0.0 }
    }
}

/// Integrate the replicator field from `initial` with fixed step `dt`,
/// recording every sample up to the smallest step multiple at or above
/// `t_max`.
pub fn integrate(
    initial: &GameState,
    params: &PayoffParams,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory, FlowError> {
    assert!(t_max > 0.0 && t_max.is_finite(), "integration horizon must be positive");
    let steps = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
    let mut stepper = Stepper::new(initial, params, dt);
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(initial.clone());
    for _ in 0..steps {
        stepper.step()?;
        times.push(stepper.time());
        states.push(stepper.game_state());
    }
    Ok(Trajectory { times, states, dt, max_sum_drift: stepper.max_sum_drift() })
}

/// One stay near a node's vertex group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visit {
    pub node: NodeLabel,
    pub entry: f64,
    pub exit: f64,
}

impl Visit {
    pub fn duration(&self) -> f64 {
        self.exit - self.entry
    }
}

/// The sequence of node visits of a trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Itinerary {
    pub visits: Vec<Visit>,
}

impl Itinerary {
    pub fn labels(&self) -> Vec<NodeLabel> {
        self.visits.iter().map(|v| v.node).collect()
    }
}

fn squared_distance(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Extract the itinerary: a visit starts when the state comes within
/// `near_threshold` (Euclidean, ambient 6-space) of any of the nine
/// vertices and ends when it leaves; visits shorter than five steps are
/// discarded as grazing, and consecutive visits with the same node label are
/// merged.
pub fn itinerary(traj: &Trajectory, near_threshold: f64) -> Itinerary {
    assert!(
        near_threshold > 0.0 && near_threshold < 0.5,
        "near_threshold must lie in (0, 0.5)"
    );
    let thr_sq = near_threshold * near_threshold;
    let vertex_states: Vec<(NodeLabel, [f64; 6])> =
        Vertex::ALL.iter().map(|v| (v.node(), v.state().as_array())).collect();

    // Raw inside-intervals per vertex.
    let mut raw: Vec<Visit> = Vec::new();
    let mut current: Option<(usize, f64, f64)> = None; // (vertex index, entry, last inside)
    for (&t, state) in traj.times().iter().zip(traj.states()) {
        let arr = state.as_array();
        let inside = vertex_states
            .iter()
            .enumerate()
            .find(|(_, (_, vs))| squared_distance(&arr, vs) < thr_sq)
            .map(|(i, _)| i);
        match (current, inside) {
            (Some((vi, entry, _)), Some(ni)) if vi == ni => current = Some((vi, entry, t)),
            (prev, next) => {
                if let Some((vi, entry, exit)) = prev {
                    raw.push(Visit { node: vertex_states[vi].0, entry, exit });
                }
                current = next.map(|ni| (ni, t, t));
            }
        }
    }
    if let Some((vi, entry, exit)) = current {
        raw.push(Visit { node: vertex_states[vi].0, entry, exit });
    }

    // Discard grazing visits, then merge consecutive same-label visits.
    let min_duration = 5.0 * traj.dt() - 1e-12;
    let mut visits: Vec<Visit> = Vec::new();
    for v in raw.into_iter().filter(|v| v.duration() >= min_duration) {
        match visits.last_mut() {
            Some(last) if last.node == v.node => last.exit = v.exit,
            _ => visits.push(v),
        }
    }
    Itinerary { visits }
}

/// A connection face for distance computations: one player moves along the
/// edge between two pure strategies while the other stays pinned.
struct ConnectionFace {
    mover: Player,
    edge: (usize, usize),
    pinned: usize,
}

fn connection_faces() -> &'static Vec<ConnectionFace> {
    static FACES: OnceLock<Vec<ConnectionFace>> = OnceLock::new();
    FACES.get_or_init(|| {
        let net = build_quotient_network();
        let mut faces = Vec::with_capacity(18);
        for conn in &net.connections {
            let mover = conn.moving_player();
            for (vf, vt) in conn.orbit() {
                let face = match mover {
                    Player::X => ConnectionFace {
                        mover,
                        edge: (vf.x.index(), vt.x.index()),
                        pinned: vf.y.index(),
                    },
                    Player::Y => ConnectionFace {
                        mover,
                        edge: (vf.y.index(), vt.y.index()),
                        pinned: vf.x.index(),
                    },
                };
                faces.push(face);
            }
        }
        faces
    })
}

/// Squared distance from a 3-simplex point to the closed segment between two
/// pure-strategy vertices.
fn edge_distance_sq(p: &[f64], a: usize, b: usize) -> f64 {
    // Parametrise the segment as e_a + t (e_b - e_a); the direction has
    // squared norm 2, and <p - e_a, e_b - e_a> = p_b - p_a + 1.
    let t = ((p[b] - p[a] + 1.0) / 2.0).clamp(0.0, 1.0);
    let mut d = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        let ci = if i == a {
            1.0 - t
        } else if i == b {
            t
        } else {
            0.0
        };
        d += (pi - ci) * (pi - ci);
    }
    d
}

fn vertex_distance_sq(p: &[f64], v: usize) -> f64 {
    let mut d = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        let ci = if i == v { 1.0 } else { 0.0 };
        d += (pi - ci) * (pi - ci);
    }
    d
}

/// Minimum Euclidean distance (ambient 6-space) from a state to the union of
/// the nine vertex equilibria and the eighteen connection faces.
pub fn distance_to_network(state: &GameState) -> f64 {
    let x = state.x.coords();
    let y = state.y.coords();
    let mut best = f64::INFINITY;
    for vx in 0..3 {
        for vy in 0..3 {
            let d = vertex_distance_sq(&x, vx) + vertex_distance_sq(&y, vy);
            if d < best {
                best = d;
            }
        }
    }
    for face in connection_faces() {
        let d = match face.mover {
            Player::X => edge_distance_sq(&x, face.edge.0, face.edge.1)
                + vertex_distance_sq(&y, face.pinned),
            Player::Y => edge_distance_sq(&y, face.edge.0, face.edge.1)
                + vertex_distance_sq(&x, face.pinned),
        };
        if d < best {
            best = d;
        }
    }
    best.sqrt()
}
