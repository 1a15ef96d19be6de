//! Flow-level validation of the transition-matrix model.
//!
//! The transition matrices of [`crate::maps`] describe the idealised
//! leading-order passage past the vertices.  This module realises the same
//! construction on the actual ODE flow: it places an incoming cross section
//! at a fixed small Euclidean distance from a member vertex along the
//! contracting direction of the cycle's incoming connection, seeds a point
//! on it whose scaled section coordinates are all `δ`, integrates until the
//! trajectory crosses the corresponding section at the next vertex of the
//! same node group, and compares the observed section coordinates (in logs)
//! with the composite matrix prediction `M · (ln δ)𝟙`.
//!
//! The section offset must stay fixed while `δ` shrinks: the travel between
//! consecutive sections multiplies every coordinate by constants that depend
//! on the offset, and the matrix model absorbs those constants into its
//! error term.  Were the offset tied to `δ`, the inter-section travel time
//! would itself grow like `ln(1/δ)` and contribute spurious powers of `δ`,
//! and the prediction would miss them at leading order.  The theory is
//! asymptotic, so no fixed tolerance is meaningful; the assertion is a
//! trend — the relative error shrinks as the seed scale does.

use crate::flow::{FlowError, Stepper};
use crate::game::{GameState, PayoffParams, ReplicatorField};
use crate::maps::cycle_transition_matrix;
use crate::network::{vertex_tangent_directions, CycleId, NodeLabel, Vertex};
use thiserror::Error;

/// Errors raised by the section-return machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SectionsError {
    /// The vertex's node group does not lie on the requested cycle.
    #[error("node {node} of vertex {vertex} does not belong to cycle {cycle}")]
    NodeNotInCycle { cycle: CycleId, vertex: Vertex, node: NodeLabel },
    /// The trajectory never crossed the return section within the horizon.
    #[error("no section return within t_max = {t_max}")]
    NoReturn { t_max: f64 },
    /// The trajectory reached the return section with a vanishing section
    /// coordinate: it left the cycle's neighbourhood.
    #[error("trajectory left the section neighbourhood at t = {time}")]
    EscapedNeighbourhood { time: f64 },
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Local coordinate roles at a member vertex under a cycle context: which of
/// the four off-coordinates plays the incoming-radial (`v`),
/// outgoing-radial (`w`), transverse-contracting (`z1`) and
/// transverse-expanding (`z2`) part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionFrame {
    pub cycle: CycleId,
    pub vertex: Vertex,
    /// Flat-state index of the contracting coordinate along the incoming
    /// connection; the section lives at `state[v_coord] = h`.
    pub v_coord: usize,
    /// Expanding coordinate along the outgoing connection.
    pub w_coord: usize,
    /// Transverse contracting coordinate.
    pub z1_coord: usize,
    /// Transverse expanding coordinate.
    pub z2_coord: usize,
    /// The next vertex along the cycle (the far end of the `w` direction).
    pub next_vertex: Vertex,
}

/// Classify the four tangent directions at a member vertex into section
/// roles by their sign and the node group of the neighbouring vertex.
pub fn section_frame(
    cycle: CycleId,
    vertex: Vertex,
    params: &PayoffParams,
) -> Result<SectionFrame, SectionsError> {
    let node = vertex.node();
    let ctx = cycle
        .context(node)
        .ok_or(SectionsError::NodeNotInCycle { cycle, vertex, node })?;
    let dirs = vertex_tangent_directions(vertex, params);
    let mut v = None;
    let mut w = None;
    let mut z1 = None;
    let mut z2 = None;
    for d in dirs {
        let n = d.neighbour.node();
        if d.rate < 0.0 && n == ctx.incoming && v.is_none() {
            v = Some(d);
        } else if d.rate > 0.0 && n == ctx.outgoing && w.is_none() {
            w = Some(d);
        } else if d.rate < 0.0 {
            z1 = Some(d);
        } else {
            z2 = Some(d);
        }
    }
    let (v, w, z1, z2) = (
        v.expect("saddle structure provides an incoming contracting direction"),
        w.expect("saddle structure provides an outgoing expanding direction"),
        z1.expect("saddle structure provides a transverse contracting direction"),
        z2.expect("saddle structure provides a transverse expanding direction"),
    );
    Ok(SectionFrame {
        cycle,
        vertex,
        v_coord: v.coord,
        w_coord: w.coord,
        z1_coord: z1.coord,
        z2_coord: z2.coord,
        next_vertex: w.neighbour,
    })
}

impl SectionFrame {
    /// Flat-state indices of the vertex's own coordinates (one per player).
    fn main_coords(&self) -> (usize, usize) {
        (self.vertex.x.index(), 3 + self.vertex.y.index())
    }

    /// A state on the incoming section of height `h`: the `v` coordinate is
    /// `h`, the remaining section coordinates are `h` times the scaled
    /// values `rel`, and each player's own coordinate absorbs the slack so
    /// the simplex sums are exact.
    pub fn seed_state(&self, h: f64, rel: [f64; 3]) -> GameState {
        let mut arr = [0.0; 6];
        arr[self.v_coord] = h;
        arr[self.w_coord] = h * rel[0];
        arr[self.z1_coord] = h * rel[1];
        arr[self.z2_coord] = h * rel[2];
        let (mx, my) = self.main_coords();
        arr[mx] = 1.0 - arr[0] - arr[1] - arr[2];
        arr[my] = 1.0 - arr[3] - arr[4] - arr[5];
        GameState::from_array(arr).expect("section seeds stay on the simplex pair")
    }

    /// Scaled section coordinates `(w, z1, z2) / h` of a flat state.
    pub fn scaled_coords(&self, state: &[f64; 6], h: f64) -> [f64; 3] {
        [
            state[self.w_coord] / h,
            state[self.z1_coord] / h,
            state[self.z2_coord] / h,
        ]
    }
}

/// Outcome of one measured first return.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnObservation {
    /// Log section coordinates observed on the return section.
    pub observed_log: [f64; 3],
    /// Composite-matrix prediction in log coordinates.
    pub predicted_log: [f64; 3],
    /// `‖observed − predicted‖ / ‖predicted‖`.
    pub relative_error: f64,
    /// Flow time of the section crossing.
    pub return_time: f64,
}

/// Distance of every cross section from its vertex.  Held fixed so that all
/// `δ`-dependence lives in the scaled section coordinates; see the module
/// docs for why the two scales must not be coupled.
pub const SECTION_HEIGHT: f64 = 1e-2;

/// Integrate the flow from a seed with scaled coordinates
/// `(w, z1, z2) = (δ, δ, δ)` on the incoming section at `base_vertex`,
/// detect the first crossing of the corresponding section at the next
/// same-node vertex along the cycle, and compare the observed scaled log
/// coordinates with the composite prediction `M · (ln δ, ln δ, ln δ)`.
pub fn first_return(
    cycle: CycleId,
    base_vertex: Vertex,
    params: &PayoffParams,
    delta: f64,
    dt: f64,
    t_max: f64,
) -> Result<ReturnObservation, SectionsError> {
    assert!(delta > 0.0 && delta < 0.1, "seed scale must be small and positive");
    let frame0 = section_frame(cycle, base_vertex, params)?;

    // Walk the member chain one full loop to find the return vertex and its
    // frame; for a k-node cycle that is k hops along the outgoing directions.
    let mut return_vertex = frame0.next_vertex;
    for _ in 1..cycle.nodes().len() {
        return_vertex = section_frame(cycle, return_vertex, params)?.next_vertex;
    }
    debug_assert_eq!(return_vertex.node(), base_vertex.node());
    let return_frame = section_frame(cycle, return_vertex, params)?;

    let h = SECTION_HEIGHT;
    let seed = frame0.seed_state(h, [delta, delta, delta]);
    let seed_arr = seed.as_array();
    let field = ReplicatorField::new(params);
    let mut stepper = Stepper::new(&seed, params, dt);
    let (rmx, rmy) = return_frame.main_coords();

    let mut armed = false;
    let mut prev = seed_arr;
    let mut prev_t = 0.0;
    while stepper.time() < t_max {
        stepper.step()?;
        let cur = stepper.state();
        let t = stepper.time();
        if !armed {
            let d2: f64 = cur
                .iter()
                .zip(&seed_arr)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2 > 9.0 * h * h {
                armed = true;
            }
        }
        let near_return = cur[rmx] > 0.5 && cur[rmy] > 0.5;
        if armed && near_return && prev[return_frame.v_coord] > h && cur[return_frame.v_coord] <= h
        {
            let crossing = refine_crossing(&field, &prev, prev_t, dt, return_frame.v_coord, h);
            let (state, time) = crossing;
            let scaled = return_frame.scaled_coords(&state, h);
            if scaled.iter().any(|c| *c <= 0.0) {
                return Err(SectionsError::EscapedNeighbourhood { time });
            }
            let observed_log = scaled.map(f64::ln);
            let m = cycle_transition_matrix(cycle, base_vertex.node(), params)
                .expect("base vertex node lies on the cycle");
            let eta = delta.ln();
            let mm = m.matrix();
            let predicted_log = [
                (mm[(0, 0)] + mm[(0, 1)] + mm[(0, 2)]) * eta,
                (mm[(1, 0)] + mm[(1, 1)] + mm[(1, 2)]) * eta,
                (mm[(2, 0)] + mm[(2, 1)] + mm[(2, 2)]) * eta,
            ];
            let diff: f64 = observed_log
                .iter()
                .zip(&predicted_log)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let norm: f64 = predicted_log.iter().map(|a| a * a).sum();
            return Ok(ReturnObservation {
                observed_log,
                predicted_log,
                relative_error: (diff / norm).sqrt(),
                return_time: time,
            });
        }
        prev = cur;
        prev_t = t;
    }
    Err(SectionsError::NoReturn { t_max })
}

/// One classical Runge–Kutta step of size `h_step` from `y`.
fn rk4_step(field: &ReplicatorField, y: &[f64; 6], h_step: f64) -> [f64; 6] {
    let k1 = field.eval(y);
    let k2 = field.eval(&combine(y, &k1, h_step / 2.0));
    let k3 = field.eval(&combine(y, &k2, h_step / 2.0));
    let k4 = field.eval(&combine(y, &k3, h_step));
    std::array::from_fn(|i| {
        y[i] + h_step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    })
}

fn combine(y: &[f64; 6], k: &[f64; 6], h: f64) -> [f64; 6] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

/// Bisect the step fraction to land on the section `state[coord] = h`,
/// starting from the last pre-crossing sample.
fn refine_crossing(
    field: &ReplicatorField,
    prev: &[f64; 6],
    prev_t: f64,
    dt: f64,
    coord: usize,
    h: f64,
) -> ([f64; 6], f64) {
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut state = rk4_step(field, prev, dt);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let trial = rk4_step(field, prev, mid * dt);
        if trial[coord] > h {
            lo = mid;
        } else {
            hi = mid;
            state = trial;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    (state, prev_t + hi * dt)
}
