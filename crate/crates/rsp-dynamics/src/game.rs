//! The parametrised two-person rock-scissors-paper game and its replicator field.
//!
//! Both players play rock (index 0), scissors (1), paper (2); rock beats
//! scissors, scissors beats paper, paper beats rock.  A win pays `1`, a loss
//! pays `-1` and a tie pays `eps_x` to player X and `eps_y` to player Y, with
//! both tie payoffs restricted to `(-1, 1)`.  Payoff matrices are stored in
//! the column-normalised form with zero diagonal (subtracting a constant from
//! a column of the payoff matrix does not change the replicator field), so
//!
//! ```text
//!         | 0         1 - eps   -1 - eps |
//! A(eps) = | -1 - eps  0         1 - eps  |
//!         | 1 - eps   -1 - eps  0        |
//! ```
//!
//! for each player with their own parameter.  Strategy frequencies live on the
//! product of two probability simplices and evolve by the coupled replicator
//! equations
//!
//! ```text
//! dx_i/dt = x_i ((A y)_i - x.A y),      dy_j/dt = y_j ((B x)_j - y.B x).
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute slack allowed on simplex coordinate sums at construction.
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;

/// Errors raised by game-level constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    /// A tie payoff lies outside the open interval `(-1, 1)`.
    #[error("tie payoff {0} lies outside the open interval (-1, 1)")]
    ParamOutOfRange(f64),
    /// A simplex coordinate is negative beyond tolerance.
    #[error("simplex coordinate {0} is negative")]
    NegativeCoordinate(f64),
    /// Simplex coordinates do not sum to one within tolerance.
    #[error("simplex coordinates sum to {0}, expected 1 within {SIMPLEX_SUM_TOL:e}")]
    BadCoordinateSum(f64),
}

/// Tie payoffs `(eps_x, eps_y)` of the two players, each in `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffParams {
    eps_x: f64,
    eps_y: f64,
}

impl PayoffParams {
    /// Validates that both tie payoffs lie strictly inside `(-1, 1)`.
    pub fn new(eps_x: f64, eps_y: f64) -> Result<Self, GameError> {
        for eps in [eps_x, eps_y] {
            if !(eps.is_finite() && -1.0 < eps && eps < 1.0) {
                return Err(GameError::ParamOutOfRange(eps));
            }
        }
        Ok(Self { eps_x, eps_y })
    }

    pub fn eps_x(&self) -> f64 {
        self.eps_x
    }

    pub fn eps_y(&self) -> f64 {
        self.eps_y
    }

    /// The parameters with the roles of the two players exchanged.
    pub fn swapped(&self) -> Self {
        Self { eps_x: self.eps_y, eps_y: self.eps_x }
    }
}

/// A point of the probability 3-simplex: non-negative coordinates summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint([f64; 3]);

impl SimplexPoint {
    /// Validates non-negativity and unit sum (within [`SIMPLEX_SUM_TOL`]),
    /// then renormalises the sum to exactly one.
    pub fn new(coords: [f64; 3]) -> Result<Self, GameError> {
        for c in coords {
            if !(c >= 0.0) {
                return Err(GameError::NegativeCoordinate(c));
            }
        }
        let sum: f64 = coords.iter().sum();
        if !((sum - 1.0).abs() <= SIMPLEX_SUM_TOL) {
            return Err(GameError::BadCoordinateSum(sum));
        }
        Ok(Self(coords.map(|c| c / sum)))
    }

    /// The pure strategy `e_i`, `i` in `0..3`.
    pub fn vertex(i: usize) -> Self {
        let mut coords = [0.0; 3];
        coords[i] = 1.0;
        Self(coords)
    }

    /// The barycentre `(1/3, 1/3, 1/3)`.
    pub fn barycentre() -> Self {
        Self([1.0 / 3.0; 3])
    }

    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    /// Index of the pure strategy if this point is a vertex (coordinates
    /// exactly 0 or 1), `None` otherwise.
    pub fn pure_strategy(&self) -> Option<usize> {
        self.0.iter().position(|&c| c == 1.0).filter(|_| self.0.iter().all(|&c| c == 0.0 || c == 1.0))
    }
}

/// Joint state `(x, y)` of the two populations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameState {
    pub x: SimplexPoint,
    pub y: SimplexPoint,
}

impl GameState {
    pub fn new(x: SimplexPoint, y: SimplexPoint) -> Self {
        Self { x, y }
    }

    /// Flattens to `[x1, x2, x3, y1, y2, y3]`.
    pub fn as_array(&self) -> [f64; 6] {
        let x = self.x.coords();
        let y = self.y.coords();
        [x[0], x[1], x[2], y[0], y[1], y[2]]
    }

    /// Rebuilds a validated state from `[x1, x2, x3, y1, y2, y3]`.
    pub fn from_array(a: [f64; 6]) -> Result<Self, GameError> {
        Ok(Self {
            x: SimplexPoint::new([a[0], a[1], a[2]])?,
            y: SimplexPoint::new([a[3], a[4], a[5]])?,
        })
    }
}

/// The pair of column-normalised payoff matrices `(A, B)`, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrixPair {
    pub a: [[f64; 3]; 3],
    pub b: [[f64; 3]; 3],
}

fn cyclic_matrix(eps: f64) -> [[f64; 3]; 3] {
    let win = 1.0 - eps;
    let lose = -1.0 - eps;
    [[0.0, win, lose], [lose, 0.0, win], [win, lose, 0.0]]
}

/// Materialises `A(eps_x)` and `B(eps_y)`.
pub fn payoff_matrices(params: &PayoffParams) -> PayoffMatrixPair {
    PayoffMatrixPair { a: cyclic_matrix(params.eps_x), b: cyclic_matrix(params.eps_y) }
}

fn mat_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// The replicator vector field with pre-materialised payoff matrices.
///
/// Sweeps and Monte Carlo runs evaluate the field millions of times, so the
/// hot path works on flat `[f64; 6]` arrays and performs no validation.
#[derive(Debug, Clone, Copy)]
pub struct ReplicatorField {
    pair: PayoffMatrixPair,
}

impl ReplicatorField {
    pub fn new(params: &PayoffParams) -> Self {
        Self { pair: payoff_matrices(params) }
    }

    pub fn matrices(&self) -> &PayoffMatrixPair {
        &self.pair
    }

    /// Field value at a flat state `[x1, x2, x3, y1, y2, y3]`.
    ///
    /// Defined for arbitrary arrays; on the state space the result is tangent
    /// to the product of simplices, and every zero coordinate yields an
    /// exactly zero component (each component carries a factor `x_i` resp.
    /// `y_j`), so faces are invariant under any integrator that only forms
    /// linear combinations of field values.
    #[inline]
    pub fn eval(&self, s: &[f64; 6]) -> [f64; 6] {
        let x = [s[0], s[1], s[2]];
        let y = [s[3], s[4], s[5]];
        let ay = mat_vec(&self.pair.a, y);
        let bx = mat_vec(&self.pair.b, x);
        let x_ay = x[0] * ay[0] + x[1] * ay[1] + x[2] * ay[2];
        let y_bx = y[0] * bx[0] + y[1] * bx[1] + y[2] * bx[2];
        [
            x[0] * (ay[0] - x_ay),
            x[1] * (ay[1] - x_ay),
            x[2] * (ay[2] - x_ay),
            y[0] * (bx[0] - y_bx),
            y[1] * (bx[1] - y_bx),
            y[2] * (bx[2] - y_bx),
        ]
    }
}

/// The replicator field at a validated state.
pub fn replicator_field(state: &GameState, params: &PayoffParams) -> [f64; 6] {
    ReplicatorField::new(params).eval(&state.as_array())
}

/// The interior Nash equilibrium: both players mix uniformly.
pub fn nash_point() -> GameState {
    GameState::new(SimplexPoint::barycentre(), SimplexPoint::barycentre())
}

/// The order-three symmetry of the game: both players relabel
/// rock -> scissors -> paper -> rock simultaneously.
///
/// On coordinates this is the cyclic shift
/// `(x1, x2, x3; y1, y2, y3) -> (x3, x1, x2; y3, y1, y2)`, and it commutes
/// with the replicator field for every parameter pair.
pub fn gamma(state: &GameState) -> GameState {
    GameState::from_array(gamma_flat(&state.as_array())).expect("permutation preserves the simplex")
}

/// [`gamma`] on flat arrays.
#[inline]
pub fn gamma_flat(s: &[f64; 6]) -> [f64; 6] {
    [s[2], s[0], s[1], s[5], s[3], s[4]]
}
