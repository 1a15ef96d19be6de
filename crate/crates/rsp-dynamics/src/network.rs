//! The heteroclinic network of the game and its quotient by the cyclic symmetry.
//!
//! Every pure-strategy pair is an equilibrium of the replicator dynamics.  The
//! nine vertices fall into three orbits of the relabelling symmetry [`crate::game::gamma`]:
//!
//! * `xi0` — player X loses: `(R,P), (S,R), (P,S)`,
//! * `xi1` — player X wins: `(R,S), (S,P), (P,R)`,
//! * `xi2` — ties: `(R,R), (S,S), (P,P)`.
//!
//! One-dimensional flow-invariant edges connect the orbits; in the quotient
//! this yields a directed graph on three nodes with six connections, which
//! carries five short directed cycles `C0..C4`.  Each vertex is hyperbolic
//! within the state space, with four tangent eigenvalues (two contracting, two
//! expanding off the interior of an orbit segment); their closed forms drive
//! the transition-map construction in [`crate::maps`].
//!
//! Rates here use the time normalisation in which the expanding rate along a
//! win-loss connection equals one; the raw replicator field runs exactly twice
//! as fast, and [`jacobian_eigen_at_vertex`] rescales accordingly.

use nalgebra::{Complex, Matrix4, SMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameState, PayoffParams, ReplicatorField, SimplexPoint};

/// Errors raised by network-level queries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    /// The state is neither one of the nine pure-strategy pairs nor the Nash point.
    #[error("state is not a pure-strategy pair (nor the Nash point)")]
    NotAVertex,
    /// A local eigenvalue context must name incoming/outgoing nodes distinct from the base node.
    #[error("invalid connection context at {node}: incoming {incoming}, outgoing {outgoing}")]
    BadContext { node: NodeLabel, incoming: NodeLabel, outgoing: NodeLabel },
}

/// A pure strategy of either player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    Rock,
    Scissors,
    Paper,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Rock, Strategy::Scissors, Strategy::Paper];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    /// True if `self` beats `other` (rock > scissors > paper > rock).
    pub fn beats(self, other: Strategy) -> bool {
        matches!(
            (self, other),
            (Strategy::Rock, Strategy::Scissors)
                | (Strategy::Scissors, Strategy::Paper)
                | (Strategy::Paper, Strategy::Rock)
        )
    }

    /// Image under the relabelling symmetry: rock -> scissors -> paper -> rock.
    pub fn next(self) -> Self {
        Self::from_index((self.index() + 1) % 3)
    }

    pub fn letter(self) -> char {
        match self {
            Strategy::Rock => 'R',
            Strategy::Scissors => 'S',
            Strategy::Paper => 'P',
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A pure-strategy pair `(x, y)`, one of the nine vertex equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub x: Strategy,
    pub y: Strategy,
}

impl Vertex {
    pub fn new(x: Strategy, y: Strategy) -> Self {
        Self { x, y }
    }

    pub const ALL: [Vertex; 9] = {
        let mut all = [Vertex { x: Strategy::Rock, y: Strategy::Rock }; 9];
        let s = Strategy::ALL;
        let mut i = 0;
        while i < 9 {
            all[i] = Vertex { x: s[i / 3], y: s[i % 3] };
            i += 1;
        }
        all
    };

    /// The symmetry orbit this vertex belongs to.
    pub fn node(self) -> NodeLabel {
        if self.x == self.y {
            NodeLabel::Xi2
        } else if self.x.beats(self.y) {
            NodeLabel::Xi1
        } else {
            NodeLabel::Xi0
        }
    }

    /// Image under the relabelling symmetry applied to both players.
    pub fn gamma(self) -> Self {
        Self::new(self.x.next(), self.y.next())
    }

    pub fn state(self) -> GameState {
        GameState::new(SimplexPoint::vertex(self.x.index()), SimplexPoint::vertex(self.y.index()))
    }
}

impl std::fmt::Display for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// A node of the quotient network: a symmetry orbit of vertex equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeLabel {
    Xi0,
    Xi1,
    Xi2,
}

impl NodeLabel {
    pub const ALL: [NodeLabel; 3] = [NodeLabel::Xi0, NodeLabel::Xi1, NodeLabel::Xi2];

    /// Orbit members, enumerated as `gamma^k` of a base vertex with X playing rock.
    pub fn members(self) -> [Vertex; 3] {
        let base = match self {
            NodeLabel::Xi0 => Vertex::new(Strategy::Rock, Strategy::Paper),
            NodeLabel::Xi1 => Vertex::new(Strategy::Rock, Strategy::Scissors),
            NodeLabel::Xi2 => Vertex::new(Strategy::Rock, Strategy::Rock),
        };
        [base, base.gamma(), base.gamma().gamma()]
    }

    /// The two other nodes, in label order.
    pub fn others(self) -> [NodeLabel; 2] {
        match self {
            NodeLabel::Xi0 => [NodeLabel::Xi1, NodeLabel::Xi2],
            NodeLabel::Xi1 => [NodeLabel::Xi0, NodeLabel::Xi2],
            NodeLabel::Xi2 => [NodeLabel::Xi0, NodeLabel::Xi1],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeLabel::Xi0 => "xi0",
            NodeLabel::Xi1 => "xi1",
            NodeLabel::Xi2 => "xi2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        NodeLabel::ALL.into_iter().find(|n| n.name() == name)
    }
}

impl std::fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which player's strategy changes along a connecting edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    X,
    Y,
}

/// A connection of the quotient network together with its representative edge.
///
/// The representative is a flow-invariant segment on which exactly one
/// player's strategy drifts from the source vertex to the target vertex while
/// the other player stays pure.  Its two other symmetry copies are obtained by
/// applying the relabelling symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub from: NodeLabel,
    pub to: NodeLabel,
    /// Representative vertex pair `(source, target)`.
    pub representative: (Vertex, Vertex),
}

impl Connection {
    /// Which player moves along the representative edge.
    pub fn moving_player(&self) -> Player {
        if self.representative.0.x == self.representative.1.x {
            Player::Y
        } else {
            Player::X
        }
    }

    /// All three symmetry copies of the representative edge.
    pub fn orbit(&self) -> [(Vertex, Vertex); 3] {
        let (u, v) = self.representative;
        [(u, v), (u.gamma(), v.gamma()), (u.gamma().gamma(), v.gamma().gamma())]
    }

    /// Coordinate pattern of the connecting face, e.g. `(x1,x2,0;0,0,1)`:
    /// the moving player's two active frequencies stay free, everything else
    /// is pinned at a pure strategy.
    pub fn face_pattern(&self) -> String {
        self.pattern(false)
    }

    /// Coordinate pattern of the four-dimensional invariant space spanned by
    /// the face and the resting player's own frequency, e.g. `(x1,x2,0;0,0,y3)`.
    pub fn span_pattern(&self) -> String {
        self.pattern(true)
    }

    fn pattern(&self, free_rest: bool) -> String {
        let (u, v) = self.representative;
        let mut buf: [String; 6] = std::array::from_fn(|_| "0".to_string());
        match self.moving_player() {
            Player::X => {
                buf[u.x.index()] = format!("x{}", u.x.index() + 1);
                buf[v.x.index()] = format!("x{}", v.x.index() + 1);
                let yi = u.y.index();
                buf[3 + yi] = if free_rest { format!("y{}", yi + 1) } else { "1".into() };
            }
            Player::Y => {
                buf[3 + u.y.index()] = format!("y{}", u.y.index() + 1);
                buf[3 + v.y.index()] = format!("y{}", v.y.index() + 1);
                let xi = u.x.index();
                buf[xi] = if free_rest { format!("x{}", xi + 1) } else { "1".into() };
            }
        }
        format!(
            "({},{},{};{},{},{})",
            buf[0], buf[1], buf[2], buf[3], buf[4], buf[5]
        )
    }
}

/// Identifier of one of the five directed cycles of the quotient network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CycleId {
    C0,
    C1,
    C2,
    C3,
    C4,
}

impl CycleId {
    pub const ALL: [CycleId; 5] = [CycleId::C0, CycleId::C1, CycleId::C2, CycleId::C3, CycleId::C4];

    pub fn name(self) -> &'static str {
        match self {
            CycleId::C0 => "C0",
            CycleId::C1 => "C1",
            CycleId::C2 => "C2",
            CycleId::C3 => "C3",
            CycleId::C4 => "C4",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        CycleId::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Node itinerary of the cycle, first node repeated implicitly.
    pub fn nodes(self) -> &'static [NodeLabel] {
        use NodeLabel::*;
        match self {
            CycleId::C0 => &[Xi0, Xi1],
            CycleId::C1 => &[Xi1, Xi2],
            CycleId::C2 => &[Xi0, Xi2],
            CycleId::C3 => &[Xi0, Xi1, Xi2],
            CycleId::C4 => &[Xi0, Xi2, Xi1],
        }
    }

    pub fn contains(self, node: NodeLabel) -> bool {
        self.nodes().contains(&node)
    }

    /// The node the cycle visits after `node`.
    pub fn successor(self, node: NodeLabel) -> Option<NodeLabel> {
        let nodes = self.nodes();
        let i = nodes.iter().position(|&n| n == node)?;
        Some(nodes[(i + 1) % nodes.len()])
    }

    /// The node the cycle visits before `node`.
    pub fn predecessor(self, node: NodeLabel) -> Option<NodeLabel> {
        let nodes = self.nodes();
        let i = nodes.iter().position(|&n| n == node)?;
        Some(nodes[(i + nodes.len() - 1) % nodes.len()])
    }

    /// Connection context `(incoming, outgoing)` of the cycle at `node`, plus
    /// the transverse context `(other incoming, other outgoing)`.
    ///
    /// At every node two connections come in (one from each other node) and
    /// two go out; the cycle singles out one of each, the remaining pair is
    /// transverse to the cycle.
    pub fn context(self, node: NodeLabel) -> Option<NodeContext> {
        let incoming = self.predecessor(node)?;
        let outgoing = self.successor(node)?;
        let other = |skip: NodeLabel| node.others().into_iter().find(|&n| n != skip).unwrap();
        Some(NodeContext {
            node,
            incoming,
            outgoing,
            transverse_incoming: other(incoming),
            transverse_outgoing: other(outgoing),
        })
    }
}

impl std::fmt::Display for CycleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The four connections meeting a node, split by the role a cycle assigns them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeContext {
    pub node: NodeLabel,
    pub incoming: NodeLabel,
    pub outgoing: NodeLabel,
    pub transverse_incoming: NodeLabel,
    pub transverse_outgoing: NodeLabel,
}

/// A directed cycle of the quotient network with its connections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub id: CycleId,
    pub nodes: Vec<NodeLabel>,
    pub connections: Vec<Connection>,
}

/// The quotient network: three nodes, six connections, five cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientNetwork {
    pub nodes: Vec<NodeLabel>,
    pub connections: Vec<Connection>,
    pub cycles: Vec<Cycle>,
}

impl QuotientNetwork {
    pub fn connection(&self, from: NodeLabel, to: NodeLabel) -> Option<&Connection> {
        self.connections.iter().find(|c| c.from == from && c.to == to)
    }

    pub fn cycle(&self, id: CycleId) -> &Cycle {
        &self.cycles[id as usize]
    }
}

fn vertex(x: char, y: char) -> Vertex {
    let s = |c| match c {
        'R' => Strategy::Rock,
        'S' => Strategy::Scissors,
        'P' => Strategy::Paper,
        _ => unreachable!(),
    };
    Vertex::new(s(x), s(y))
}

/// Builds the quotient network with the canonical representative edges.
pub fn build_quotient_network() -> QuotientNetwork {
    use NodeLabel::*;
    let reps = [
        (Xi0, Xi1, vertex('R', 'P'), vertex('S', 'P')),
        (Xi1, Xi0, vertex('S', 'P'), vertex('S', 'R')),
        (Xi1, Xi2, vertex('R', 'S'), vertex('R', 'R')),
        (Xi2, Xi1, vertex('R', 'R'), vertex('P', 'R')),
        (Xi0, Xi2, vertex('S', 'R'), vertex('R', 'R')),
        (Xi2, Xi0, vertex('R', 'R'), vertex('R', 'P')),
    ];
    let connections: Vec<Connection> = reps
        .into_iter()
        .map(|(from, to, u, v)| Connection { from, to, representative: (u, v) })
        .collect();
    let cycles = CycleId::ALL
        .into_iter()
        .map(|id| {
            let nodes = id.nodes().to_vec();
            let conns = (0..nodes.len())
                .map(|i| {
                    let from = nodes[i];
                    let to = nodes[(i + 1) % nodes.len()];
                    *connections.iter().find(|c| c.from == from && c.to == to).unwrap()
                })
                .collect();
            Cycle { id, nodes, connections: conns }
        })
        .collect();
    QuotientNetwork { nodes: NodeLabel::ALL.to_vec(), connections, cycles }
}

/// Expanding rate `e_{j -> k}` at node `j` along the connection towards `k`.
///
/// Rates use the normalised time scale (half the raw replicator rates).
pub fn expanding_rate(node: NodeLabel, towards: NodeLabel, params: &PayoffParams) -> f64 {
    use NodeLabel::*;
    let (ex, ey) = (params.eps_x(), params.eps_y());
    match (node, towards) {
        (Xi0, Xi1) => 1.0,
        (Xi0, Xi2) => (1.0 + ex) / 2.0,
        (Xi1, Xi2) => (1.0 + ey) / 2.0,
        (Xi1, Xi0) => 1.0,
        (Xi2, Xi0) => (1.0 - ey) / 2.0,
        (Xi2, Xi1) => (1.0 - ex) / 2.0,
        _ => panic!("no connection from {node} to {towards}"),
    }
}

/// Contracting rate `c_{j <- i}` (as a positive number) at node `j` along the
/// connection arriving from `i`, in the normalised time scale.
pub fn contracting_rate(node: NodeLabel, from: NodeLabel, params: &PayoffParams) -> f64 {
    use NodeLabel::*;
    let (ex, ey) = (params.eps_x(), params.eps_y());
    match (node, from) {
        (Xi0, Xi1) => 1.0,
        (Xi0, Xi2) => (1.0 - ey) / 2.0,
        (Xi1, Xi2) => (1.0 - ex) / 2.0,
        (Xi1, Xi0) => 1.0,
        (Xi2, Xi0) => (1.0 + ex) / 2.0,
        (Xi2, Xi1) => (1.0 + ey) / 2.0,
        _ => panic!("no connection from {from} to {node}"),
    }
}

/// The four local eigenvalues at a node, organised by the roles a cycle
/// context assigns to the adjoining connections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalEigenData {
    pub node: NodeLabel,
    pub incoming: NodeLabel,
    pub outgoing: NodeLabel,
    /// `-c` along the incoming connection of the context (negative).
    pub contracting: f64,
    /// `+e` along the outgoing connection of the context (positive).
    pub expanding: f64,
    /// `-c` along the remaining incoming connection (negative).
    pub transverse_contracting: f64,
    /// `+e` along the remaining outgoing connection (positive).
    pub transverse_expanding: f64,
}

/// Local eigenvalues at `node` for the context "arrive from `incoming`, leave
/// towards `outgoing`" (for a two-node cycle both context nodes coincide).
pub fn local_eigen(
    node: NodeLabel,
    incoming: NodeLabel,
    outgoing: NodeLabel,
    params: &PayoffParams,
) -> Result<LocalEigenData, NetworkError> {
    if incoming == node || outgoing == node {
        return Err(NetworkError::BadContext { node, incoming, outgoing });
    }
    let other = |skip: NodeLabel| node.others().into_iter().find(|&n| n != skip).unwrap();
    Ok(LocalEigenData {
        node,
        incoming,
        outgoing,
        contracting: -contracting_rate(node, incoming, params),
        expanding: expanding_rate(node, outgoing, params),
        transverse_contracting: -contracting_rate(node, other(incoming), params),
        transverse_expanding: expanding_rate(node, other(outgoing), params),
    })
}

/// A tangent coordinate direction at a vertex equilibrium.
///
/// At the vertex `(e_a, e_b)` the four off coordinates `x_c` (`c != a`) and
/// `y_d` (`d != b`) are eigendirections of the linearised flow restricted to
/// the state space; each one points along the edge towards a neighbouring
/// vertex, with a positive rate if the edge flows away and a negative rate if
/// it flows in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentDirection {
    /// Index into the flat state `[x1, x2, x3, y1, y2, y3]`.
    pub coord: usize,
    /// Eigenvalue in the normalised time scale.
    pub rate: f64,
    /// The vertex at the far end of the edge.
    pub neighbour: Vertex,
}

/// The four tangent eigendirections at a vertex, in coordinate order.
pub fn vertex_tangent_directions(v: Vertex, params: &PayoffParams) -> [TangentDirection; 4] {
    let pair = crate::game::payoff_matrices(params);
    let a = v.x.index();
    let b = v.y.index();
    let mut out = Vec::with_capacity(4);
    for c in 0..3 {
        if c != a {
            // d(x_c)/dt = x_c ((A e_b)_c - (A e_b)_a) to first order.
            let rate = (pair.a[c][b] - pair.a[a][b]) / 2.0;
            out.push(TangentDirection {
                coord: c,
                rate,
                neighbour: Vertex::new(Strategy::from_index(c), v.y),
            });
        }
    }
    for d in 0..3 {
        if d != b {
            let rate = (pair.b[d][a] - pair.b[b][a]) / 2.0;
            out.push(TangentDirection {
                coord: 3 + d,
                rate,
                neighbour: Vertex::new(v.x, Strategy::from_index(d)),
            });
        }
    }
    out.try_into().unwrap()
}

/// Eigenvalues of the finite-difference Jacobian at a vertex (or at the Nash
/// point), in the normalised time scale.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianEigen {
    /// All six eigenvalues of the Jacobian, sorted by real then imaginary part.
    pub all: Vec<Complex<f64>>,
    /// The four eigenvalues of the restriction to directions tangent to the
    /// product of simplices.
    pub tangent: Vec<Complex<f64>>,
    /// The remaining two eigenvalues (transverse to the state space).
    pub normal: Vec<Complex<f64>>,
}

fn sort_complex(v: &mut [Complex<f64>]) {
    v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
}

/// Central finite-difference Jacobian of the raw replicator field, step `1e-6`.
fn fd_jacobian(field: &ReplicatorField, s: &[f64; 6]) -> SMatrix<f64, 6, 6> {
    let h = 1e-6;
    let mut j = SMatrix::<f64, 6, 6>::zeros();
    for col in 0..6 {
        let mut sp = *s;
        let mut sm = *s;
        sp[col] += h;
        sm[col] -= h;
        let fp = field.eval(&sp);
        let fm = field.eval(&sm);
        for row in 0..6 {
            j[(row, col)] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    j
}

/// Eigenvalues of the linearised flow at a vertex equilibrium or at the Nash
/// point, computed by central finite differences plus a dense eigensolver.
///
/// The Jacobian of the raw field is divided by two so the reported rates match
/// the normalised closed forms of [`expanding_rate`] / [`contracting_rate`].
/// Tangent eigenvalues are obtained by restricting the Jacobian to an explicit
/// basis of the tangent space of the product of simplices (the restriction is
/// exact: the field preserves both coordinate sums).
pub fn jacobian_eigen_at_vertex(
    state: &GameState,
    params: &PayoffParams,
) -> Result<JacobianEigen, NetworkError> {
    let s = state.as_array();
    let is_vertex = state.x.pure_strategy().is_some() && state.y.pure_strategy().is_some();
    let is_nash = s.iter().all(|&c| (c - 1.0 / 3.0).abs() <= 1e-12);
    if !is_vertex && !is_nash {
        return Err(NetworkError::NotAVertex);
    }

    let field = ReplicatorField::new(params);
    let j = fd_jacobian(&field, &s) / 2.0;

    let mut all: Vec<Complex<f64>> = j.complex_eigenvalues().iter().copied().collect();
    sort_complex(&mut all);

    // Tangent basis: differences of unit vectors within each player's simplex,
    // anchored at that player's largest coordinate.
    let anchor_x = (0..3).max_by(|&i, &k| s[i].partial_cmp(&s[k]).unwrap()).unwrap();
    let anchor_y = 3 + (0..3).max_by(|&i, &k| s[3 + i].partial_cmp(&s[3 + k]).unwrap()).unwrap();
    let mut t = SMatrix::<f64, 6, 4>::zeros();
    let mut col = 0;
    for i in 0..6 {
        let anchor = if i < 3 { anchor_x } else { anchor_y };
        if i != anchor {
            t[(i, col)] = 1.0;
            t[(anchor, col)] = -1.0;
            col += 1;
        }
    }
    let jt = j * t;
    let tt = t.transpose() * t;
    let restricted: Matrix4<f64> = tt.lu().solve(&(t.transpose() * jt)).expect("basis is full rank");
    let mut tangent: Vec<Complex<f64>> = restricted.complex_eigenvalues().iter().copied().collect();
    sort_complex(&mut tangent);

    // The normal pair is whatever remains of the full spectrum after matching
    // off the tangent eigenvalues (ties from repeated eigenvalues are fine:
    // any copy may be removed).
    let mut normal = all.clone();
    for tv in &tangent {
        let (idx, _) = normal
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                ((*a - tv).norm()).partial_cmp(&((*b - tv).norm())).unwrap()
            })
            .unwrap();
        normal.remove(idx);
    }
    sort_complex(&mut normal);

    Ok(JacobianEigen { all, tangent, normal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::nash_point;

    fn params(ex: f64, ey: f64) -> PayoffParams {
        PayoffParams::new(ex, ey).unwrap()
    }

    #[test]
    fn orbits_partition_the_nine_vertices() {
        let mut seen = std::collections::BTreeSet::new();
        for node in NodeLabel::ALL {
            for v in node.members() {
                assert_eq!(v.node(), node);
                assert!(seen.insert(v));
            }
        }
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn network_has_six_connections_and_five_cycles() {
        let net = build_quotient_network();
        assert_eq!(net.nodes.len(), 3);
        assert_eq!(net.connections.len(), 6);
        assert_eq!(net.cycles.len(), 5);
        // Every ordered pair of distinct nodes is connected exactly once.
        for a in NodeLabel::ALL {
            for b in NodeLabel::ALL {
                if a != b {
                    assert!(net.connection(a, b).is_some(), "missing {a} -> {b}");
                }
            }
        }
        for cycle in &net.cycles {
            for (i, conn) in cycle.connections.iter().enumerate() {
                assert_eq!(conn.from, cycle.nodes[i]);
                assert_eq!(conn.to, cycle.nodes[(i + 1) % cycle.nodes.len()]);
            }
        }
    }

    #[test]
    fn representatives_are_single_step_edges_with_correct_flow_direction() {
        let net = build_quotient_network();
        let p = params(0.2, -0.3);
        for conn in &net.connections {
            for (u, v) in conn.orbit() {
                assert_eq!(u.node(), conn.from);
                assert_eq!(v.node(), conn.to);
                // Exactly one player moves.
                assert_eq!((u.x != v.x) as u8 + (u.y != v.y) as u8, 1);
                // The edge leaves u (positive rate towards v) and enters v
                // (negative rate back towards u).
                let out = vertex_tangent_directions(u, &p)
                    .into_iter()
                    .find(|d| d.neighbour == v)
                    .unwrap();
                assert!(out.rate > 0.0, "{u} -> {v} should be expanding at {u}");
                let back = vertex_tangent_directions(v, &p)
                    .into_iter()
                    .find(|d| d.neighbour == u)
                    .unwrap();
                assert!(back.rate < 0.0, "{u} -> {v} should be contracting at {v}");
            }
        }
    }

    #[test]
    fn face_patterns_match_the_connection_table() {
        let net = build_quotient_network();
        let expect = [
            (NodeLabel::Xi0, NodeLabel::Xi1, "(x1,x2,0;0,0,1)", "(x1,x2,0;0,0,y3)"),
            (NodeLabel::Xi1, NodeLabel::Xi0, "(0,1,0;y1,0,y3)", "(0,x2,0;y1,0,y3)"),
            (NodeLabel::Xi1, NodeLabel::Xi2, "(1,0,0;y1,y2,0)", "(x1,0,0;y1,y2,0)"),
            (NodeLabel::Xi2, NodeLabel::Xi1, "(x1,0,x3;1,0,0)", "(x1,0,x3;y1,0,0)"),
            (NodeLabel::Xi0, NodeLabel::Xi2, "(x1,x2,0;1,0,0)", "(x1,x2,0;y1,0,0)"),
            (NodeLabel::Xi2, NodeLabel::Xi0, "(1,0,0;y1,0,y3)", "(x1,0,0;y1,0,y3)"),
        ];
        for (from, to, face, span) in expect {
            let conn = net.connection(from, to).unwrap();
            assert_eq!(conn.face_pattern(), face, "{from} -> {to}");
            assert_eq!(conn.span_pattern(), span, "{from} -> {to}");
        }
    }

    #[test]
    fn cycle_contexts_follow_the_itineraries() {
        let ctx = CycleId::C0.context(NodeLabel::Xi0).unwrap();
        assert_eq!(ctx.incoming, NodeLabel::Xi1);
        assert_eq!(ctx.outgoing, NodeLabel::Xi1);
        assert_eq!(ctx.transverse_incoming, NodeLabel::Xi2);
        assert_eq!(ctx.transverse_outgoing, NodeLabel::Xi2);

        let ctx = CycleId::C3.context(NodeLabel::Xi1).unwrap();
        assert_eq!(ctx.incoming, NodeLabel::Xi0);
        assert_eq!(ctx.outgoing, NodeLabel::Xi2);
        assert_eq!(ctx.transverse_incoming, NodeLabel::Xi2);
        assert_eq!(ctx.transverse_outgoing, NodeLabel::Xi0);

        let ctx = CycleId::C4.context(NodeLabel::Xi2).unwrap();
        assert_eq!(ctx.incoming, NodeLabel::Xi0);
        assert_eq!(ctx.outgoing, NodeLabel::Xi1);
        assert_eq!(ctx.transverse_incoming, NodeLabel::Xi1);
        assert_eq!(ctx.transverse_outgoing, NodeLabel::Xi0);

        assert_eq!(CycleId::C1.context(NodeLabel::Xi0), None);
    }

    #[test]
    fn local_eigen_matches_closed_forms() {
        // xi0 in the C0 context.
        let e = local_eigen(NodeLabel::Xi0, NodeLabel::Xi1, NodeLabel::Xi1, &params(0.2, -0.4))
            .unwrap();
        assert_eq!(e.expanding, 1.0);
        assert_eq!(e.contracting, -1.0);
        assert!((e.transverse_expanding - 0.6).abs() < 1e-15);
        assert!((e.transverse_contracting - (-0.7)).abs() < 1e-15);

        // xi2 in the C1 context: both tie-breaking rates involve the opponent.
        let e = local_eigen(NodeLabel::Xi2, NodeLabel::Xi1, NodeLabel::Xi1, &params(0.2, -0.4))
            .unwrap();
        assert!((e.expanding - 0.4).abs() < 1e-15); // (1 - eps_x)/2
        assert!((e.contracting - (-0.3)).abs() < 1e-15); // -(1 + eps_y)/2
        assert!((e.transverse_expanding - 0.7).abs() < 1e-15); // (1 - eps_y)/2
        assert!((e.transverse_contracting - (-0.6)).abs() < 1e-15); // -(1 + eps_x)/2

        assert!(local_eigen(NodeLabel::Xi0, NodeLabel::Xi0, NodeLabel::Xi1, &params(0.0, 0.0))
            .is_err());
    }

    #[test]
    fn local_eigen_agrees_with_vertex_tangent_rates() {
        let p = params(-0.55, 0.35);
        for cycle in CycleId::ALL {
            for &node in cycle.nodes() {
                let ctx = cycle.context(node).unwrap();
                let eig = local_eigen(node, ctx.incoming, ctx.outgoing, &p).unwrap();
                for member in node.members() {
                    let dirs = vertex_tangent_directions(member, &p);
                    let rate_to = |target: NodeLabel, sign: f64| {
                        dirs.iter()
                            .find(|d| d.neighbour.node() == target && d.rate * sign > 0.0)
                            .map(|d| d.rate)
                            .unwrap()
                    };
                    assert!((rate_to(ctx.outgoing, 1.0) - eig.expanding).abs() < 1e-14);
                    assert!((rate_to(ctx.incoming, -1.0) - eig.contracting).abs() < 1e-14);
                    assert!(
                        (rate_to(ctx.transverse_outgoing, 1.0) - eig.transverse_expanding).abs()
                            < 1e-14
                    );
                    assert!(
                        (rate_to(ctx.transverse_incoming, -1.0) - eig.transverse_contracting)
                            .abs()
                            < 1e-14
                    );
                }
            }
        }
    }

    #[test]
    fn jacobian_tangent_eigenvalues_match_the_closed_forms() {
        let p = params(0.2, -0.4);
        let v = vertex('R', 'P'); // xi0 member
        let eig = jacobian_eigen_at_vertex(&v.state(), &p).unwrap();
        let mut expect = vec![-1.0, -0.7, 0.6, 1.0];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in eig.tangent.iter().zip(expect) {
            assert!(got.im.abs() < 1e-9);
            assert!((got.re - want).abs() < 1e-9, "got {} want {}", got.re, want);
        }
    }

    #[test]
    fn jacobian_at_a_tie_vertex_shows_two_in_two_out() {
        let p = params(0.15, -0.25);
        let eig = jacobian_eigen_at_vertex(&vertex('S', 'S').state(), &p).unwrap();
        let mut expect = vec![
            -(1.0 + 0.15) / 2.0,
            (1.0 - 0.15) / 2.0,
            -(1.0 - 0.25) / 2.0,
            (1.0 + 0.25) / 2.0,
        ];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in eig.tangent.iter().zip(expect) {
            assert!(got.im.abs() < 1e-9);
            assert!((got.re - want).abs() < 1e-9, "got {} want {}", got.re, want);
        }
    }

    #[test]
    fn jacobian_rejects_generic_states() {
        let state = GameState::new(
            SimplexPoint::new([0.5, 0.25, 0.25]).unwrap(),
            SimplexPoint::vertex(0),
        );
        assert_eq!(
            jacobian_eigen_at_vertex(&state, &params(0.0, 0.0)),
            Err(NetworkError::NotAVertex)
        );
    }

    #[test]
    fn jacobian_at_nash_in_the_zero_sum_case_is_a_centre() {
        // Frozen regression values: at eps = 0 the four tangent eigenvalues at
        // the Nash point are two purely imaginary pairs.
        let eig = jacobian_eigen_at_vertex(&nash_point(), &params(0.0, 0.0)).unwrap();
        for v in &eig.tangent {
            assert!(v.re.abs() < 1e-9, "tangent eigenvalue {v} should be purely imaginary");
        }
        // At eps = 0 the Jacobian at Nash is the off-diagonal block matrix
        // [[0, A], [A, 0]]/3 (raw time), whose tangent eigenvalues are the two
        // double pairs +-i/sqrt(3); normalised: |Im lambda| = 1/(2 sqrt(3)).
        for v in &eig.tangent {
            assert!((v.im.abs() - 0.288_675_134_594_812_9).abs() < 1e-9, "eigenvalue {v}");
        }
    }
}
