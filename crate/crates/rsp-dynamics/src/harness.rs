//! Parameter sweeps, plot-ready CSV emission and Monte Carlo basin
//! estimation.
//!
//! Everything here is deterministic: grid cells are evaluated in index
//! order (concurrently, reduced by index), and basin samples draw from
//! per-sample RNG substreams so the result is independent of thread
//! scheduling.

use crate::flow::{
    distance_to_network, Itinerary, Stepper, Trajectory, DEFAULT_DT, DEFAULT_NEAR_THRESHOLD,
};
use crate::game::{GameState, PayoffParams, SimplexPoint};
use crate::network::{build_quotient_network, CycleId, NodeLabel, Player, Vertex};
use crate::stability::{classify, Classification};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

// ---------------------------------------------------------------------------
// Region sweep
// ---------------------------------------------------------------------------

/// Classification of all five cycles at one parameter cell centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCell {
    pub eps_x: f64,
    pub eps_y: f64,
    /// One label per cycle, indexed in `CycleId::ALL` order.
    pub class: [Classification; 5],
}

/// A full grid of per-cycle classifications over the open parameter square.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    resolution: usize,
    cells: Vec<RegionCell>,
}

impl RegionGrid {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Cells in row-major order: the tie-payoff of the second player varies
    /// slowest, the first player's fastest.
    pub fn cells(&self) -> &[RegionCell] {
        &self.cells
    }

    /// Cell at column `i` (first-player axis) and row `j` (second-player
    /// axis).
    pub fn cell(&self, i: usize, j: usize) -> &RegionCell {
        &self.cells[j * self.resolution + i]
    }
}

/// Centre of grid cell `i` of `resolution` over `(−1, 1)`.
pub fn grid_center(resolution: usize, i: usize) -> f64 {
    -1.0 + (i as f64 + 0.5) * 2.0 / resolution as f64
}

/// Classify every cycle on a `resolution × resolution` grid of cell centres
/// over the open parameter square.
pub fn run_region_sweep(resolution: usize) -> RegionGrid {
    assert!(resolution >= 11, "region sweeps need at least an 11-cell grid");
    let cells: Vec<RegionCell> = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let i = idx % resolution;
            let j = idx / resolution;
            let eps_x = grid_center(resolution, i);
            let eps_y = grid_center(resolution, j);
            let params =
                PayoffParams::new(eps_x, eps_y).expect("cell centres lie inside the open square");
            let class =
                CycleId::ALL.map(|cycle| classify(cycle, &params).classification);
            RegionCell { eps_x, eps_y, class }
        })
        .collect();
    RegionGrid { resolution, cells }
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

/// Write a region grid as CSV with columns `eps_x,eps_y,C0,...,C4`.
pub fn write_regions_csv<W: Write>(grid: &RegionGrid, out: &mut W) -> io::Result<()> {
    writeln!(out, "eps_x,eps_y,C0,C1,C2,C3,C4")?;
    for cell in &grid.cells {
        writeln!(
            out,
            "{:.16e},{:.16e},{},{},{},{},{}",
            cell.eps_x,
            cell.eps_y,
            cell.class[0].tag(),
            cell.class[1].tag(),
            cell.class[2].tag(),
            cell.class[3].tag(),
            cell.class[4].tag(),
        )?;
    }
    Ok(())
}

/// Write a trajectory as CSV with columns `t,x1,x2,x3,y1,y2,y3`.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: &mut W) -> io::Result<()> {
    writeln!(out, "t,x1,x2,x3,y1,y2,y3")?;
    for (t, state) in traj.times().iter().zip(traj.states()) {
        let a = state.as_array();
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            t, a[0], a[1], a[2], a[3], a[4], a[5],
        )?;
    }
    Ok(())
}

/// Write an itinerary as CSV with columns `label,entry,exit`.
pub fn write_itinerary_csv<W: Write>(itin: &Itinerary, out: &mut W) -> io::Result<()> {
    writeln!(out, "label,entry,exit")?;
    for v in &itin.visits {
        writeln!(out, "{},{:.16e},{:.16e}", v.node.name(), v.entry, v.exit)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Online visit tracking
// ---------------------------------------------------------------------------

/// A completed node visit annotated with the distance to the heteroclinic
/// network at the moment of entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedVisit {
    pub node: NodeLabel,
    pub entry: f64,
    pub exit: f64,
    pub entry_distance: f64,
}

#[derive(Debug, Clone, Copy)]
struct CurrentVisit {
    vertex: usize,
    entry: f64,
    last_inside: f64,
    entry_distance: f64,
}

/// Streaming equivalent of [`crate::flow::itinerary`]: feed samples one at a
/// time and read off completed visits without storing the trajectory.
/// Grazing visits (shorter than five steps) are discarded and consecutive
/// same-label visits merged, exactly as in the batch version.
#[derive(Debug, Clone)]
pub struct VisitTracker {
    vertex_states: Vec<(NodeLabel, [f64; 6])>,
    thr_sq: f64,
    min_duration: f64,
    current: Option<CurrentVisit>,
    visits: Vec<TrackedVisit>,
}

impl VisitTracker {
    pub fn new(dt: f64, near_threshold: f64) -> Self {
        assert!(
            near_threshold > 0.0 && near_threshold < 0.5,
            "near_threshold must lie in (0, 0.5)"
        );
        Self {
            vertex_states: Vertex::ALL
                .iter()
                .map(|v| (v.node(), v.state().as_array()))
                .collect(),
            thr_sq: near_threshold * near_threshold,
            min_duration: 5.0 * dt - 1e-12,
            current: None,
            visits: Vec::new(),
        }
    }

    /// Feed one sample; returns `true` when a new visit was appended (a
    /// merge into the previous visit does not count).
    pub fn observe(&mut self, t: f64, state: &[f64; 6]) -> bool {
        let inside = self
            .vertex_states
            .iter()
            .enumerate()
            .find(|(_, (_, vs))| {
                state.iter().zip(vs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < self.thr_sq
            })
            .map(|(i, _)| i);
        match (self.current, inside) {
            (Some(c), Some(ni)) if c.vertex == ni => {
                self.current = Some(CurrentVisit { last_inside: t, ..c });
                false
            }
            (prev, next) => {
                let pushed = match prev {
                    Some(c) => self.close(c),
                    None => false,
                };
                self.current = next.map(|ni| {
                    let gs = GameState::from_array(*state)
                        .expect("tracked samples stay on the simplex pair");
                    CurrentVisit {
                        vertex: ni,
                        entry: t,
                        last_inside: t,
                        entry_distance: distance_to_network(&gs),
                    }
                });
                pushed
            }
        }
    }

    fn close(&mut self, c: CurrentVisit) -> bool {
        if c.last_inside - c.entry < self.min_duration {
            return false;
        }
        let node = self.vertex_states[c.vertex].0;
        match self.visits.last_mut() {
            Some(last) if last.node == node => {
                last.exit = c.last_inside;
                false
            }
            _ => {
                self.visits.push(TrackedVisit {
                    node,
                    entry: c.entry,
                    exit: c.last_inside,
                    entry_distance: c.entry_distance,
                });
                true
            }
        }
    }

    /// Close the visit in progress, if any.
    pub fn finish(&mut self) -> bool {
        match self.current.take() {
            Some(c) => self.close(c),
            None => false,
        }
    }

    pub fn visits(&self) -> &[TrackedVisit] {
        &self.visits
    }

    /// Whether the last nine visits follow `cycle`'s node pattern (eight
    /// consecutive transitions) while the entry distance to the network
    /// decreases across the window.
    pub fn tail_matches(&self, cycle: CycleId) -> bool {
        const WINDOW: usize = 9;
        if self.visits.len() < WINDOW {
            return false;
        }
        let w = &self.visits[self.visits.len() - WINDOW..];
        for k in 0..WINDOW - 1 {
            if cycle.successor(w[k].node) != Some(w[k + 1].node) {
                return false;
            }
        }
        w[WINDOW - 1].entry_distance < w[0].entry_distance
    }
}

// ---------------------------------------------------------------------------
// Basin estimation
// ---------------------------------------------------------------------------

/// Monte Carlo estimate of the fraction of near-cycle seeds that converge
/// to the cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinEstimate {
    pub cycle: CycleId,
    pub eps_x: f64,
    pub eps_y: f64,
    pub delta: f64,
    pub samples: usize,
    pub horizon: f64,
    pub converged: usize,
    pub fraction: f64,
    pub seed: u64,
}

/// The cycle's connection faces as vertex pairs, three symmetry copies per
/// connection, with the player that moves along each edge.
fn cycle_edges(cycle: CycleId) -> Vec<(Vertex, Vertex, Player)> {
    let net = build_quotient_network();
    let nodes = cycle.nodes();
    let mut edges = Vec::with_capacity(nodes.len() * 3);
    for (k, &from) in nodes.iter().enumerate() {
        let to = nodes[(k + 1) % nodes.len()];
        let conn = net.connection(from, to).expect("cycle connections exist in the network");
        let mover = conn.moving_player();
        for (a, b) in conn.orbit() {
            edges.push((a, b, mover));
        }
    }
    edges
}

/// Draw one seed: uniform over the cycle's edges, uniform along the edge,
/// and uniform over a face-aligned box of side `delta` in the three
/// transverse coordinates.
fn sample_seed_state(
    edges: &[(Vertex, Vertex, Player)],
    delta: f64,
    rng: &mut impl Rng,
) -> GameState {
    let (a, b, mover) = edges[rng.gen_range(0..edges.len())];
    let t: f64 = rng.gen();
    let u = [
        rng.gen::<f64>() * delta,
        rng.gen::<f64>() * delta,
        rng.gen::<f64>() * delta,
    ];
    let (s_from, s_to, pinned) = match mover {
        Player::X => (a.x.index(), b.x.index(), a.y.index()),
        Player::Y => (a.y.index(), b.y.index(), a.x.index()),
    };
    let mut moving = [0.0; 3];
    let third = 3 - s_from - s_to;
    moving[third] = u[0];
    moving[s_to] = t * (1.0 - u[0]);
    moving[s_from] = (1.0 - u[0]) - moving[s_to];
    let mut still = [0.0; 3];
    let mut others = (0..3).filter(|&s| s != pinned);
    let (o1, o2) = (others.next().unwrap(), others.next().unwrap());
    still[o1] = u[1];
    still[o2] = u[2];
    still[pinned] = 1.0 - u[1] - u[2];
    let (x, y) = match mover {
        Player::X => (moving, still),
        Player::Y => (still, moving),
    };
    GameState::new(
        SimplexPoint::new(x).expect("seed stays on the simplex"),
        SimplexPoint::new(y).expect("seed stays on the simplex"),
    )
}

/// Whether one seeded trajectory converges to the cycle within the horizon:
/// its itinerary must follow the cycle's node pattern for eight consecutive
/// transitions with decreasing entry distance. Integrator failures count as
/// non-converged.
fn basin_trial(cycle: CycleId, params: &PayoffParams, initial: &GameState, horizon: f64) -> bool {
    let dt = DEFAULT_DT;
    let mut stepper = Stepper::new(initial, params, dt);
    let mut tracker = VisitTracker::new(dt, DEFAULT_NEAR_THRESHOLD);
    if tracker.observe(0.0, &initial.as_array()) && tracker.tail_matches(cycle) {
        return true;
    }
    while stepper.time() < horizon {
        if stepper.step().is_err() {
            return false;
        }
        if tracker.observe(stepper.time(), &stepper.state()) && tracker.tail_matches(cycle) {
            return true;
        }
    }
    tracker.finish() && tracker.tail_matches(cycle)
}

/// Estimate the local basin fraction of a cycle by seeding trajectories
/// within `delta` of its connection faces. Deterministic for a given seed:
/// sample `i` draws from substream `i` of a counter-based RNG.
pub fn estimate_basin_fraction(
    cycle: CycleId,
    params: &PayoffParams,
    delta: f64,
    samples: usize,
    horizon: f64,
    seed: u64,
) -> BasinEstimate {
    assert!(delta > 0.0 && delta < 0.2, "seeding distance must lie in (0, 0.2)");
    assert!(samples >= 100, "basin estimates need at least 100 samples");
    let edges = cycle_edges(cycle);
    let converged = (0..samples)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let initial = sample_seed_state(&edges, delta, &mut rng);
            basin_trial(cycle, params, &initial, horizon)
        })
        .count();
    BasinEstimate {
        cycle,
        eps_x: params.eps_x(),
        eps_y: params.eps_y(),
        delta,
        samples,
        horizon,
        converged,
        fraction: converged as f64 / samples as f64,
        seed,
    }
}
