//! Section coordinates and transition maps along the cycles.
//!
//! Near a vertex equilibrium the flow is essentially linear in the four local
//! coordinates `(v, w, z1, z2)`: `v` contracts along the incoming connection
//! of the current cycle context, `w` expands along the outgoing connection,
//! and `(z1, z2)` are the remaining contracting/expanding transverse pair.
//! Incoming and outgoing cross sections are placed at `v = 1` and `w = 1` in
//! these units, so a section point keeps three coordinates in `(0, 1)`.
//!
//! Passing a node maps the incoming section to the outgoing one by
//!
//! ```text
//! phi(w, z1, z2) = (w^(c/e), z1 * w^(ct/e), z2 * w^(-et/e)),
//! ```
//!
//! where `c, e` are the radial contracting/expanding rates and `ct, et` the
//! transverse ones; the map is defined while `0 < z2 < w^(et/e)` (otherwise
//! the trajectory escapes along the transverse expanding direction before
//! reaching the outgoing section).  Travelling along a connection to the next
//! node permutes the coordinates into the roles they play there; to leading
//! order no coefficients appear.  In logarithmic coordinates
//! `eta = (ln w, ln z1, ln z2)` the pass-plus-travel composition is linear,
//! `eta -> M eta`, and the `M` are the basic transition matrices; ordered
//! products around a cycle give the composite matrices that drive the
//! stability analysis in [`crate::stability`].

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::PayoffParams;
use crate::network::{local_eigen, Connection, CycleId, LocalEigenData, NodeLabel};

/// Errors raised by section and map operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapsError {
    /// A section coordinate left the open interval `(0, 1)`.
    #[error("section coordinate {0} lies outside the open interval (0, 1)")]
    CoordinateOutOfRange(f64),
    /// A log coordinate must be strictly negative.
    #[error("log coordinate {0} is not strictly negative")]
    LogCoordOutOfRange(f64),
    /// An incoming point was passed where an outgoing one was expected, or vice versa.
    #[error("expected a {expected:?} section point")]
    WrongSectionSide { expected: SectionKind },
    /// The requested node does not lie on the requested cycle.
    #[error("node {node} does not belong to cycle {cycle}")]
    NodeNotInCycle { cycle: CycleId, node: NodeLabel },
    /// The requested connection is not traversed by the requested cycle.
    #[error("connection {from} -> {to} is not traversed by cycle {cycle}")]
    ConnectionNotInCycle { cycle: CycleId, from: NodeLabel, to: NodeLabel },
    /// The local passage is undefined: the trajectory leaves along the
    /// transverse expanding direction before reaching the outgoing section.
    /// This is an informative outcome (the point is outside the cycle's local
    /// basin), not a numerical failure.
    #[error("transverse escape at {node}: z2 = {z2:e} >= w^(et/e) = {bound:e}")]
    OutsideDomain { node: NodeLabel, z2: f64, bound: f64 },
}

/// Which side of a node a section point lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectionKind {
    /// On the incoming section: coordinates `(w, z1, z2)`.
    Incoming,
    /// On the outgoing section: coordinates `(v, z1, z2)`.
    Outgoing,
}

/// A point on a cross section, three coordinates strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    kind: SectionKind,
    coords: [f64; 3],
}

impl SectionPoint {
    pub fn new(kind: SectionKind, coords: [f64; 3]) -> Result<Self, MapsError> {
        for c in coords {
            if !(0.0 < c && c < 1.0) {
                return Err(MapsError::CoordinateOutOfRange(c));
            }
        }
        Ok(Self { kind, coords })
    }

    pub fn incoming(coords: [f64; 3]) -> Result<Self, MapsError> {
        Self::new(SectionKind::Incoming, coords)
    }

    pub fn outgoing(coords: [f64; 3]) -> Result<Self, MapsError> {
        Self::new(SectionKind::Outgoing, coords)
    }

    pub fn kind(&self) -> SectionKind {
        self.kind
    }

    pub fn coords(&self) -> [f64; 3] {
        self.coords
    }

    /// Natural logarithms of the coordinates (all negative by construction).
    pub fn to_log(&self) -> LogCoords {
        to_log(self.coords).expect("section coordinates are in (0,1)")
    }
}

/// Logarithms of section coordinates; all components strictly negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogCoords([f64; 3]);

impl LogCoords {
    pub fn new(eta: [f64; 3]) -> Result<Self, MapsError> {
        for c in eta {
            if !(c < 0.0) {
                return Err(MapsError::LogCoordOutOfRange(c));
            }
        }
        Ok(Self(eta))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }
}

/// Componentwise natural log of section coordinates in `(0, 1)`.
pub fn to_log(coords: [f64; 3]) -> Result<LogCoords, MapsError> {
    for c in coords {
        if !(0.0 < c && c < 1.0) {
            return Err(MapsError::CoordinateOutOfRange(c));
        }
    }
    Ok(LogCoords(coords.map(f64::ln)))
}

/// Componentwise exponential back to a section point of the given kind.
pub fn from_log(kind: SectionKind, eta: &LogCoords) -> SectionPoint {
    SectionPoint { kind, coords: eta.components().map(f64::exp) }
}

/// The local passage map `phi` at a node, from its incoming to its outgoing section.
///
/// Input coordinates are `(w, z1, z2)`; the output is
/// `(w^(c/e), z1 w^(ct/e), z2 w^(-et/e))` with rates taken from `eigen`.
pub fn local_map(eigen: &LocalEigenData, input: &SectionPoint) -> Result<SectionPoint, MapsError> {
    if input.kind != SectionKind::Incoming {
        return Err(MapsError::WrongSectionSide { expected: SectionKind::Incoming });
    }
    let [w, z1, z2] = input.coords;
    let c = -eigen.contracting;
    let e = eigen.expanding;
    let ct = -eigen.transverse_contracting;
    let et = eigen.transverse_expanding;
    let bound = w.powf(et / e);
    if z2 >= bound {
        return Err(MapsError::OutsideDomain { node: eigen.node, z2, bound });
    }
    SectionPoint::outgoing([w.powf(c / e), z1 * w.powf(ct / e), z2 * w.powf(-et / e)])
}

/// How the outgoing coordinates `(v, z1, z2)` of a node feed the incoming
/// coordinates of the next node along a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Permutation {
    /// `(v, z1, z2) -> (z1, z2, v)`
    Cyclic,
    /// `(v, z1, z2) -> (z1, v, z2)`
    SwapFirstSecond,
    /// `(v, z1, z2) -> (z2, z1, v)`
    SwapFirstThird,
}

impl Permutation {
    fn apply(self, [v, z1, z2]: [f64; 3]) -> [f64; 3] {
        match self {
            Permutation::Cyclic => [z1, z2, v],
            Permutation::SwapFirstSecond => [z1, v, z2],
            Permutation::SwapFirstThird => [z2, z1, v],
        }
    }

    /// Matrix acting on log coordinates (same permutation of components).
    fn matrix(self) -> Matrix3<f64> {
        let rows = match self {
            Permutation::Cyclic => [1, 2, 0],
            Permutation::SwapFirstSecond => [1, 0, 2],
            Permutation::SwapFirstThird => [2, 1, 0],
        };
        let mut m = Matrix3::zeros();
        for (out_row, in_row) in rows.into_iter().enumerate() {
            m[(out_row, in_row)] = 1.0;
        }
        m
    }
}

/// The coordinate roles at the far end depend on the cycle context at the
/// node being left (the same connection is traversed by several cycles with
/// different role assignments), so the permutation is indexed by both.
fn global_permutation(cycle: CycleId, node: NodeLabel) -> Result<Permutation, MapsError> {
    use CycleId::*;
    use NodeLabel::*;
    let p = match (cycle, node) {
        (C0, Xi0) | (C0, Xi1) => Permutation::Cyclic,
        (C1, Xi1) => Permutation::SwapFirstSecond,
        (C1, Xi2) => Permutation::SwapFirstThird,
        (C2, Xi0) => Permutation::SwapFirstSecond,
        (C2, Xi2) => Permutation::SwapFirstThird,
        (C3, Xi0) => Permutation::Cyclic,
        (C3, Xi1) => Permutation::SwapFirstThird,
        (C3, Xi2) => Permutation::SwapFirstSecond,
        (C4, Xi0) => Permutation::SwapFirstThird,
        (C4, Xi1) => Permutation::Cyclic,
        (C4, Xi2) => Permutation::SwapFirstSecond,
        (cycle, node) => return Err(MapsError::NodeNotInCycle { cycle, node }),
    };
    Ok(p)
}

/// The global map along `connection` as traversed by `cycle`: relabels the
/// outgoing coordinates at `connection.from` into incoming coordinates at
/// `connection.to`.  To leading order this is a pure permutation.
pub fn global_map(
    cycle: CycleId,
    connection: &Connection,
    input: &SectionPoint,
) -> Result<SectionPoint, MapsError> {
    if input.kind != SectionKind::Outgoing {
        return Err(MapsError::WrongSectionSide { expected: SectionKind::Outgoing });
    }
    if cycle.successor(connection.from) != Some(connection.to) {
        return Err(MapsError::ConnectionNotInCycle {
            cycle,
            from: connection.from,
            to: connection.to,
        });
    }
    let perm = global_permutation(cycle, connection.from)?;
    SectionPoint::new(SectionKind::Incoming, perm.apply(input.coords))
}

/// Whether a transition matrix describes one connection or a full cycle return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    Basic,
    Composite,
}

/// A basic or composite transition matrix acting on log section coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub cycle: CycleId,
    pub node: NodeLabel,
    pub kind: MatrixKind,
    m: Matrix3<f64>,
}

impl TransitionMatrix {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    /// Row-major entries.
    pub fn entries(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.m[(i, j)]))
    }

    /// Action on log coordinates, `eta -> M eta`.
    pub fn apply_log(&self, eta: &LogCoords) -> [f64; 3] {
        let e = eta.components();
        let r = self.m * nalgebra::Vector3::new(e[0], e[1], e[2]);
        [r[0], r[1], r[2]]
    }
}

/// The basic transition matrix of `cycle` at `node`: the linear action on log
/// coordinates of "pass the node, travel to the next one".  Entries are the
/// closed forms
///
/// ```text
/// M = P . [ c/e    0  0 ]
///         [ ct/e   1  0 ]
///         [ -et/e  0  1 ]
/// ```
///
/// with `P` the global permutation, stored pre-expanded per cycle and node.
pub fn basic_transition_matrix(
    cycle: CycleId,
    node: NodeLabel,
    params: &PayoffParams,
) -> Result<TransitionMatrix, MapsError> {
    use CycleId::*;
    use NodeLabel::*;
    let ex = params.eps_x();
    let ey = params.eps_y();
    #[rustfmt::skip]
    let m = match (cycle, node) {
        (C0, Xi0) => Matrix3::new(
            (1.0 - ey) / 2.0,  1.0, 0.0,
            -(1.0 + ex) / 2.0, 0.0, 1.0,
            1.0,               0.0, 0.0,
        ),
        (C0, Xi1) => Matrix3::new(
            (1.0 - ex) / 2.0,  1.0, 0.0,
            -(1.0 + ey) / 2.0, 0.0, 1.0,
            1.0,               0.0, 0.0,
        ),
        (C1, Xi1) => Matrix3::new(
            2.0 / (1.0 + ey),              1.0, 0.0,
            (1.0 - ex) / (1.0 + ey),       0.0, 0.0,
            -2.0 / (1.0 + ey),             0.0, 1.0,
        ),
        (C1, Xi2) => Matrix3::new(
            -(1.0 - ey) / (1.0 - ex),      0.0, 1.0,
            (1.0 + ex) / (1.0 - ex),       1.0, 0.0,
            (1.0 + ey) / (1.0 - ex),       0.0, 0.0,
        ),
        (C2, Xi0) => Matrix3::new(
            2.0 / (1.0 + ex),              1.0, 0.0,
            (1.0 - ey) / (1.0 + ex),       0.0, 0.0,
            -2.0 / (1.0 + ex),             0.0, 1.0,
        ),
        (C2, Xi2) => Matrix3::new(
            -(1.0 - ex) / (1.0 - ey),      0.0, 1.0,
            (1.0 + ey) / (1.0 - ey),       1.0, 0.0,
            (1.0 + ex) / (1.0 - ey),       0.0, 0.0,
        ),
        (C3, Xi0) => Matrix3::new(
            1.0,               1.0, 0.0,
            -(1.0 + ex) / 2.0, 0.0, 1.0,
            (1.0 - ey) / 2.0,  0.0, 0.0,
        ),
        (C3, Xi1) => Matrix3::new(
            -2.0 / (1.0 + ey),             0.0, 1.0,
            (1.0 - ex) / (1.0 + ey),       1.0, 0.0,
            2.0 / (1.0 + ey),              0.0, 0.0,
        ),
        (C3, Xi2) => Matrix3::new(
            (1.0 + ex) / (1.0 - ey),       1.0, 0.0,
            (1.0 + ey) / (1.0 - ey),       0.0, 0.0,
            -(1.0 - ex) / (1.0 - ey),      0.0, 1.0,
        ),
        (C4, Xi0) => Matrix3::new(
            -2.0 / (1.0 + ex),             0.0, 1.0,
            (1.0 - ey) / (1.0 + ex),       1.0, 0.0,
            2.0 / (1.0 + ex),              0.0, 0.0,
        ),
        (C4, Xi1) => Matrix3::new(
            1.0,               1.0, 0.0,
            -(1.0 + ey) / 2.0, 0.0, 1.0,
            (1.0 - ex) / 2.0,  0.0, 0.0,
        ),
        (C4, Xi2) => Matrix3::new(
            (1.0 + ey) / (1.0 - ex),       1.0, 0.0,
            (1.0 + ex) / (1.0 - ex),       0.0, 0.0,
            -(1.0 - ey) / (1.0 - ex),      0.0, 1.0,
        ),
        (cycle, node) => return Err(MapsError::NodeNotInCycle { cycle, node }),
    };
    Ok(TransitionMatrix { cycle, node, kind: MatrixKind::Basic, m })
}

/// Reconstruction of a basic matrix from the local eigenvalue data and the
/// global permutation; used to cross-check the stored closed forms.
pub fn basic_matrix_from_eigen(
    cycle: CycleId,
    node: NodeLabel,
    params: &PayoffParams,
) -> Result<TransitionMatrix, MapsError> {
    let ctx = cycle.context(node).ok_or(MapsError::NodeNotInCycle { cycle, node })?;
    let eig = local_eigen(node, ctx.incoming, ctx.outgoing, params)
        .expect("cycle context is a valid connection context");
    let c = -eig.contracting;
    let e = eig.expanding;
    let ct = -eig.transverse_contracting;
    let et = eig.transverse_expanding;
    #[rustfmt::skip]
    let l = Matrix3::new(
        c / e,   0.0, 0.0,
        ct / e,  1.0, 0.0,
        -et / e, 0.0, 1.0,
    );
    let m = global_permutation(cycle, node)?.matrix() * l;
    Ok(TransitionMatrix { cycle, node, kind: MatrixKind::Basic, m })
}

/// The composite transition matrix of `cycle` based at `base`: the ordered
/// product of the basic matrices around the cycle, first factor the one at
/// `base` (so it acts on the incoming section of the node after `base`...
/// equivalently on one full return of the incoming section at `base`).
pub fn cycle_transition_matrix(
    cycle: CycleId,
    base: NodeLabel,
    params: &PayoffParams,
) -> Result<TransitionMatrix, MapsError> {
    if !cycle.contains(base) {
        return Err(MapsError::NodeNotInCycle { cycle, node: base });
    }
    let mut m = Matrix3::identity();
    let mut node = base;
    for _ in 0..cycle.nodes().len() {
        m = basic_transition_matrix(cycle, node, params)?.m * m;
        node = cycle.successor(node).unwrap();
    }
    Ok(TransitionMatrix { cycle, node: base, kind: MatrixKind::Composite, m })
}

/// One full return of the incoming section at `base` along `cycle`, computed
/// by composing the local and global maps node by node.
///
/// Domain conditions are enforced stage-wise: each node requires
/// `z2 < w^(et/e)` on its incoming section, and a violation reports which
/// node the trajectory escapes at.  (The remaining printed return-map domain
/// inequalities are exactly the later-stage conditions expressed in the
/// original coordinates, so nothing else needs checking.)
pub fn poincare_map(
    cycle: CycleId,
    base: NodeLabel,
    params: &PayoffParams,
    input: &SectionPoint,
) -> Result<SectionPoint, MapsError> {
    if !cycle.contains(base) {
        return Err(MapsError::NodeNotInCycle { cycle, node: base });
    }
    if input.kind != SectionKind::Incoming {
        return Err(MapsError::WrongSectionSide { expected: SectionKind::Incoming });
    }
    let net = crate::network::build_quotient_network();
    let mut cur = *input;
    let mut node = base;
    for _ in 0..cycle.nodes().len() {
        let ctx = cycle.context(node).unwrap();
        let eig = local_eigen(node, ctx.incoming, ctx.outgoing, params)
            .expect("cycle context is a valid connection context");
        let out = local_map(&eig, &cur)?;
        let conn = net.connection(node, ctx.outgoing).unwrap();
        cur = global_map(cycle, conn, &out)?;
        node = ctx.outgoing;
    }
    Ok(cur)
}
