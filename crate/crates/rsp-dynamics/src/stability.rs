//! Stability classification of the five cycles.
//!
//! The object of study is the composite transition matrix `M` of a cycle
//! (see [`crate::maps`]): its action on log section coordinates governs how
//! trajectories accumulate on or escape from the cycle.  The analysis has two
//! independent routes, kept deliberately separate so they can cross-validate:
//!
//! * **Matrix route** — compute `M`, its characteristic polynomial, its
//!   dominant eigenvalue and eigenvectors, check the dominance conditions
//!   ([`dominance`]), and minimise the [`f_index`] over a finite family of
//!   exponent vectors read off the (partial) products of basic matrices
//!   ([`stability_indices_matrix_path`]).
//! * **Closed-form route** — evaluate the explicit per-cycle index formulas
//!   and sign conditions in the parameters ([`closed_form_indices`]).
//!
//! Both produce one stability index per node of the cycle; an index is the
//! exponent-like measure of how much of a small ball around the node's
//! section lands in the basin (`+∞`: essentially all, finite: a cusp-shaped
//! complement or slice, `−∞`: a measure-zero sliver).  [`classify`] reduces
//! the indices to a label: everywhere-positive gives an essentially
//! asymptotically stable cycle, a mix gives fragmentary asymptotic stability,
//! all `−∞` gives complete instability (or, for the win–loss cycle, the
//! non-attractor case), and parameters on a governing sign boundary are
//! reported as `Boundary` and never classified.

use nalgebra::Matrix3;
use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::game::PayoffParams;
use crate::maps::{basic_transition_matrix, cycle_transition_matrix, TransitionMatrix};
use crate::network::{CycleId, NodeLabel};

/// Half-width of the band around every governing sign condition (and around
/// `λ_max = 1`) inside which parameters are reported as `Boundary`.
pub const BOUNDARY_BAND: f64 = 1e-8;

/// Relative tolerance used to decide whether an eigenvalue is real and
/// whether two moduli tie.
const EIGEN_TOL: f64 = 1e-10;

/// Errors raised by the stability computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    /// The Routh–Hurwitz sequence divides by the trace.
    #[error("trace {tr:e} is too close to zero for the Routh-Hurwitz sequence")]
    DegenerateTrace { tr: f64 },
    /// Two eigenvalues that are not a conjugate pair tie in modulus; the
    /// dominance conditions are not decidable at this tolerance.
    #[error("eigenvalue moduli tie near {modulus} within 1e-10; dominance undecidable")]
    TieBreak { modulus: f64 },
    /// The parameters sit inside the boundary band of a governing quantity.
    #[error("parameters lie on the classification boundary: {quantity} = {value:e}")]
    BoundaryParams { quantity: &'static str, value: f64 },
    /// The closed-form cubic solver and the dense eigensolver disagree; this
    /// indicates a numerical problem and is never silently ignored.
    #[error("eigensolvers disagree: closed-form {closed}, dense {dense}")]
    SolverDisagreement { closed: Complex<f64>, dense: Complex<f64> },
}

// ---------------------------------------------------------------------------
// Characteristic polynomial
// ---------------------------------------------------------------------------

/// Coefficient data of the characteristic polynomial
/// `λ³ − tr·λ² + b·λ − det` of a 3×3 transition matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPolyData {
    /// Sum of the eigenvalues.
    pub tr: f64,
    /// Sum of the pairwise products of eigenvalues (second elementary
    /// symmetric function; equals the sum of principal 2×2 minors).
    pub b: f64,
    /// Product of the eigenvalues.
    pub det: f64,
}

impl CharPolyData {
    /// Evaluate `λ³ − tr·λ² + b·λ − det`.
    pub fn eval(&self, lambda: f64) -> f64 {
        ((lambda - self.tr) * lambda + self.b) * lambda - self.det
    }
}

/// Characteristic-polynomial data of a transition matrix.
pub fn char_poly(m: &TransitionMatrix) -> CharPolyData {
    let a = m.matrix();
    let tr = a[(0, 0)] + a[(1, 1)] + a[(2, 2)];
    let b = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]
        + a[(0, 0)] * a[(2, 2)] - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)];
    let det = a.determinant();
    CharPolyData { tr, b, det }
}

/// Closed-form characteristic polynomial of the win–loss cycle's composite
/// matrix: `tr = (−3−3εx−3εy+εxεy)/4`, `b = (−3+3εx+3εy+εxεy)/4`, `det = 1`.
pub fn c0_composite_char_poly(params: &PayoffParams) -> CharPolyData {
    let (ex, ey) = (params.eps_x(), params.eps_y());
    CharPolyData {
        tr: (-3.0 - 3.0 * ex - 3.0 * ey + ex * ey) / 4.0,
        b: (-3.0 + 3.0 * ex + 3.0 * ey + ex * ey) / 4.0,
        det: 1.0,
    }
}

/// Number of sign changes of the sequence `(−1, tr, (1 − b·tr)/tr, 1)`.
///
/// For a cubic with `det = 1` this counts the roots of the characteristic
/// polynomial with modulus greater than one (via the Möbius transform of the
/// unit circle onto the right half-plane).  Exact zeros in the sequence carry
/// no sign and are skipped.
pub fn routh_hurwitz_positive_count(cp: &CharPolyData) -> Result<usize, StabilityError> {
    if cp.tr.abs() < 1e-12 {
        return Err(StabilityError::DegenerateTrace { tr: cp.tr });
    }
    let seq = [-1.0, cp.tr, (1.0 - cp.b * cp.tr) / cp.tr, 1.0];
    let mut changes = 0;
    let mut prev: Option<bool> = None;
    for term in seq {
        if term == 0.0 {
            continue;
        }
        let pos = term > 0.0;
        if let Some(p) = prev {
            if p != pos {
                changes += 1;
            }
        }
        prev = Some(pos);
    }
    Ok(changes)
}

/// Discriminant of the win–loss composite's characteristic polynomial as an
/// explicit quartic in the parameters (negative throughout the open square,
/// which is what forces one real root plus a conjugate pair).
pub fn discriminant(params: &PayoffParams) -> f64 {
    discriminant_raw(params.eps_x(), params.eps_y())
}

/// Polynomial evaluation of [`discriminant`] without the domain restriction;
/// useful for checking the closed-form factorisations on the square's edges.
pub fn discriminant_raw(ex: f64, ey: f64) -> f64 {
    let ex2 = ex * ex;
    let ex3 = ex2 * ex;
    let ex4 = ex2 * ex2;
    let c4 = (ex2 - 9.0) * (ex2 - 9.0);
    let c3 = -80.0 * ex3 - 432.0 * ex;
    let c2 = -18.0 * ex4 - 396.0 * ex2 - 162.0;
    let c1 = -432.0 * ex3 - 3024.0 * ex;
    let c0 = 81.0 * ex4 - 162.0 * ex2 - 3375.0;
    ((((c4 * ey + c3) * ey + c2) * ey + c1) * ey + c0) / 256.0
}

/// Discriminant of `λ³ − tr·λ² + b·λ − det` computed from the coefficients;
/// independent route used to cross-check [`discriminant`].
pub fn char_poly_discriminant(cp: &CharPolyData) -> f64 {
    let (tr, b, det) = (cp.tr, cp.b, cp.det);
    18.0 * tr * b * det - 4.0 * tr.powi(3) * det + tr * tr * b * b
        - 4.0 * b.powi(3)
        - 27.0 * det * det
}

// ---------------------------------------------------------------------------
// Cubic roots and dominance conditions
// ---------------------------------------------------------------------------

/// Roots of `λ³ − tr·λ² + b·λ − det` by the closed-form cubic solution,
/// sorted by descending modulus (positive-imaginary member of a conjugate
/// pair first among ties).
///
/// Three real roots come from the trigonometric branch, one real root plus a
/// conjugate pair from the hyperbolic/cardano branch with the large-magnitude
/// cube root extracted first to avoid cancellation.
pub fn cubic_roots(cp: &CharPolyData) -> [Complex<f64>; 3] {
    // Depressed cubic μ³ + p μ + q with λ = μ + tr/3.
    let a = -cp.tr;
    let b = cp.b;
    let c = -cp.det;
    let shift = -a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a.powi(3) / 27.0 - a * b / 3.0 + c;
    let disc = -4.0 * p.powi(3) - 27.0 * q * q;

    let mus: [Complex<f64>; 3] = if p == 0.0 && q == 0.0 {
        [Complex::new(0.0, 0.0); 3]
    } else if disc > 0.0 {
        // Three distinct real roots; p < 0 is guaranteed here.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos();
        std::array::from_fn(|k| {
            let mu = m * ((phi - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos();
            Complex::new(mu, 0.0)
        })
    } else {
        // One real root, one conjugate pair (or a repeated real root when
        // disc == 0; the pair then has zero imaginary part).
        let s = (q * q / 4.0 + p.powi(3) / 27.0).max(0.0).sqrt();
        // Take the cube root of whichever of −q/2 ± s has the larger
        // magnitude, then recover the partner from u·v = −p/3.
        let t = if q >= 0.0 { -q / 2.0 - s } else { -q / 2.0 + s };
        let u = t.cbrt();
        let v = if u == 0.0 { 0.0 } else { -p / (3.0 * u) };
        let real = u + v;
        let re = -real / 2.0;
        let im = 3.0_f64.sqrt() / 2.0 * (u - v).abs();
        [
            Complex::new(real, 0.0),
            Complex::new(re, im),
            Complex::new(re, -im),
        ]
    };
    let mut roots = mus.map(|mu| mu + Complex::new(shift, 0.0));
    roots.sort_by(|x, y| {
        y.norm()
            .partial_cmp(&x.norm())
            .unwrap()
            .then(y.re.partial_cmp(&x.re).unwrap())
            .then(y.im.partial_cmp(&x.im).unwrap())
    });
    roots
}

/// Eigenvalues of a transition matrix: closed-form cubic roots cross-checked
/// against a dense eigensolver, sorted by descending modulus.
pub fn eigen_triple(m: &TransitionMatrix) -> Result<[Complex<f64>; 3], StabilityError> {
    let closed = cubic_roots(&char_poly(m));
    let dense_v = m.matrix().complex_eigenvalues();
    let mut dense: Vec<Complex<f64>> = dense_v.iter().copied().collect();
    for &root in &closed {
        let (best, dist) = dense
            .iter()
            .enumerate()
            .map(|(i, d)| (i, (d - root).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("three dense eigenvalues");
        if dist > 1e-8 * root.norm().max(1.0) {
            return Err(StabilityError::SolverDisagreement { closed: root, dense: dense[best] });
        }
        dense.swap_remove(best);
    }
    Ok(closed)
}

/// Dominant-eigenvalue data and the three dominance conditions for a
/// composite transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceData {
    /// All three eigenvalues, sorted by descending modulus.
    pub eigenvalues: [Complex<f64>; 3],
    /// The maximum-modulus eigenvalue (the real one when `cond_i` holds).
    pub lambda_max: Complex<f64>,
    /// Condition (i): the maximum-modulus eigenvalue is real.
    pub cond_i: bool,
    /// Condition (ii): it moreover exceeds one.
    pub cond_ii: bool,
    /// Condition (iii): the associated eigenvector has all components of one
    /// strict sign (all pairwise component products positive).  Evaluated
    /// only when (i) and (ii) hold.
    pub cond_iii: Option<bool>,
    /// Variant of (iii) requiring every pairwise component product of the
    /// unit eigenvector to exceed one.  Logged for comparison only: it is
    /// scale-dependent and unsatisfiable for a unit vector, so it never
    /// feeds the classification.
    pub cond_iii_printed: Option<bool>,
    /// Unit right eigenvector of `lambda_max`, first nonzero component
    /// positive; present when (i) and (ii) hold.
    pub w_max: Option<[f64; 3]>,
    /// Unit left eigenvector of `lambda_max`, sign-fixed so that
    /// `v_max · w_max > 0`; present when (i) and (ii) hold.
    pub v_max: Option<[f64; 3]>,
}

fn is_real(z: Complex<f64>) -> bool {
    z.im.abs() <= EIGEN_TOL * (1.0 + z.norm())
}

/// Unit null vector of `m − λI` (the right eigenvector of a real eigenvalue),
/// with the first nonzero component made positive.
fn real_eigenvector(m: &Matrix3<f64>, lambda: f64) -> [f64; 3] {
    let a = m - Matrix3::identity() * lambda;
    let rows: [nalgebra::Vector3<f64>; 3] =
        std::array::from_fn(|i| nalgebra::Vector3::new(a[(i, 0)], a[(i, 1)], a[(i, 2)]));
    let mut best = nalgebra::Vector3::zeros();
    let mut best_norm = 0.0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let cr = rows[i].cross(&rows[j]);
        let n = cr.norm();
        if n > best_norm {
            best_norm = n;
            best = cr;
        }
    }
    if best_norm <= 1e-12 * a.norm().max(1.0) {
        // Rank-deficient beyond one dimension (repeated eigenvalue): fall
        // back to the smallest right singular vector.
        let svd = a.svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        best = nalgebra::Vector3::new(vt[(2, 0)], vt[(2, 1)], vt[(2, 2)]);
        best_norm = best.norm();
    }
    let mut w = best / best_norm;
    if let Some(first) = w.iter().find(|c| c.abs() > 1e-12) {
        if *first < 0.0 {
            w = -w;
        }
    }
    [w[0], w[1], w[2]]
}

/// Evaluate the dominance conditions for a transition matrix.
pub fn dominance(m: &TransitionMatrix) -> Result<DominanceData, StabilityError> {
    let eigenvalues = eigen_triple(m)?;
    let max_mod = eigenvalues[0].norm();
    let near_max: Vec<Complex<f64>> = eigenvalues
        .iter()
        .copied()
        .filter(|z| z.norm() >= max_mod - EIGEN_TOL * (1.0 + max_mod))
        .collect();
    let reals: Vec<f64> = near_max.iter().copied().filter(|z| is_real(*z)).map(|z| z.re).collect();
    let complexes = near_max.len() - reals.len();
    // A conjugate pair sharing the maximum is a single eigenvalue object, not
    // a tie.  A tie is a real root against the pair, or two distinct reals.
    if !reals.is_empty() && complexes > 0 {
        return Err(StabilityError::TieBreak { modulus: max_mod });
    }
    if reals.len() >= 2
        && reals
            .iter()
            .any(|r| (r - reals[0]).abs() > EIGEN_TOL * (1.0 + max_mod))
    {
        return Err(StabilityError::TieBreak { modulus: max_mod });
    }

    let cond_i = !reals.is_empty();
    let lambda_max = if cond_i { Complex::new(reals[0], 0.0) } else { eigenvalues[0] };
    let cond_ii = cond_i && lambda_max.re > 1.0 + EIGEN_TOL;

    let (mut cond_iii, mut cond_iii_printed, mut w_out, mut v_out) = (None, None, None, None);
    if cond_i && cond_ii {
        let w = real_eigenvector(m.matrix(), lambda_max.re);
        let strict = w.iter().all(|c| c.abs() > EIGEN_TOL);
        let same_sign = strict && (w.iter().all(|c| *c > 0.0) || w.iter().all(|c| *c < 0.0));
        cond_iii = Some(same_sign);
        let mut printed = true;
        for i in 0..3 {
            for j in (i + 1)..3 {
                if w[i] * w[j] <= 1.0 {
                    printed = false;
                }
            }
        }
        cond_iii_printed = Some(printed);
        let mut v = real_eigenvector(&m.matrix().transpose(), lambda_max.re);
        let dot: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        if dot < 0.0 {
            for c in &mut v {
                *c = -*c;
            }
        }
        w_out = Some(w);
        v_out = Some(v);
    }

    Ok(DominanceData {
        eigenvalues,
        lambda_max,
        cond_i,
        cond_ii,
        cond_iii,
        cond_iii_printed,
        w_max: w_out,
        v_max: v_out,
    })
}

// ---------------------------------------------------------------------------
// Stability index values and the F-index
// ---------------------------------------------------------------------------

/// An extended-real stability index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StabilityIndexValue {
    NegInf,
    Finite(f64),
    PosInf,
}

impl StabilityIndexValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            StabilityIndexValue::NegInf => f64::NEG_INFINITY,
            StabilityIndexValue::Finite(v) => *v,
            StabilityIndexValue::PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, StabilityIndexValue::Finite(_))
    }

    pub fn min(self, other: Self) -> Self {
        if other.as_f64() < self.as_f64() {
            other
        } else {
            self
        }
    }

    /// Strictly positive (a finite positive value or `+∞`).
    pub fn is_positive(&self) -> bool {
        self.as_f64() > 0.0
    }
}

impl From<f64> for StabilityIndexValue {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            StabilityIndexValue::PosInf
        } else if v == f64::NEG_INFINITY {
            StabilityIndexValue::NegInf
        } else {
            StabilityIndexValue::Finite(v)
        }
    }
}

impl Serialize for StabilityIndexValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            StabilityIndexValue::PosInf => serializer.serialize_str("inf"),
            StabilityIndexValue::NegInf => serializer.serialize_str("-inf"),
            StabilityIndexValue::Finite(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for StabilityIndexValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Ok(StabilityIndexValue::Finite(v)),
            Raw::Str(s) => match s.as_str() {
                "inf" => Ok(StabilityIndexValue::PosInf),
                "-inf" => Ok(StabilityIndexValue::NegInf),
                other => Err(D::Error::custom(format!("not an index value: {other:?}"))),
            },
        }
    }
}

/// The five-branch index of an exponent vector `α` describing one constraint
/// slice of a local basin: how much of a small ball satisfies
/// `Π coords^α ≲ 1` as the ball shrinks.
///
/// Branches, in order: all components nonnegative → `+∞`; all nonpositive →
/// `−∞`; components of both signs with zero sum → `0`; negative sum →
/// `Σα / α_max`; positive sum → `−Σα / α_min`.
pub fn f_index(alpha: [f64; 3]) -> StabilityIndexValue {
    let min = alpha.iter().copied().fold(f64::INFINITY, f64::min);
    let max = alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = alpha.iter().sum();
    if min >= 0.0 {
        StabilityIndexValue::PosInf
    } else if max <= 0.0 {
        StabilityIndexValue::NegInf
    } else if sum == 0.0 {
        StabilityIndexValue::Finite(0.0)
    } else if sum < 0.0 {
        StabilityIndexValue::Finite(sum / max)
    } else {
        StabilityIndexValue::Finite(-sum / min)
    }
}

// ---------------------------------------------------------------------------
// Region quantities
// ---------------------------------------------------------------------------

/// Quadratic whose sign gates the winning-side cycle `[ξ1 → ξ2 → ξ1]`:
/// `(5−εx)εy² + (εx²+10εx+1)εy − (1−εx)(4+5εx)`.
pub fn b1(params: &PayoffParams) -> f64 {
    b1_raw(params.eps_x(), params.eps_y())
}

/// Quadratic whose sign gates the losing-side cycle `[ξ0 → ξ2 → ξ0]`:
/// `(5+εx)εy² + (−εx²+10εx−1)εy − (1+εx)(4−5εx)`.
pub fn b2(params: &PayoffParams) -> f64 {
    b2_raw(params.eps_x(), params.eps_y())
}

pub fn b1_raw(ex: f64, ey: f64) -> f64 {
    (5.0 - ex) * ey * ey + (ex * ex + 10.0 * ex + 1.0) * ey - (1.0 - ex) * (4.0 + 5.0 * ex)
}

pub fn b2_raw(ex: f64, ey: f64) -> f64 {
    (5.0 + ex) * ey * ey + (-ex * ex + 10.0 * ex - 1.0) * ey - (1.0 + ex) * (4.0 - 5.0 * ex)
}

/// The larger root in `εy` of `b1(εx, ·) = 0`, as a function of `εx`:
/// the curved boundary of the winning-side cycle's stability region.
pub fn b1_zero_curve(ex: f64) -> f64 {
    let rad = 81.0 + 24.0 * ex - 2.0 * ex * ex + 40.0 * ex.powi(3) + ex.powi(4);
    (-(1.0 + 10.0 * ex + ex * ex) + rad.sqrt()) / (2.0 * (5.0 - ex))
}

/// The larger root in `εy` of `b2(εx, ·) = 0`, as a function of `εx`:
/// the curved boundary of the losing-side cycle's stability region.
pub fn b2_zero_curve(ex: f64) -> f64 {
    let rad = 81.0 - 24.0 * ex - 2.0 * ex * ex - 40.0 * ex.powi(3) + ex.powi(4);
    (1.0 - 10.0 * ex + ex * ex + rad.sqrt()) / (2.0 * (5.0 + ex))
}

/// The governing sign quantity (name, value) nearest zero if the parameters
/// lie inside its boundary band, else `None`.  The zero-sum line
/// `εx + εy = 0` is a boundary for every cycle; the two-node side cycles add
/// their diagonal and quadratic conditions.
pub fn boundary_quantity(
    cycle: CycleId,
    params: &PayoffParams,
) -> Option<(&'static str, f64)> {
    let s = params.eps_x() + params.eps_y();
    if s.abs() < BOUNDARY_BAND {
        // The zero-sum line is excluded for every cycle.
        return Some(("eps_x+eps_y", s));
    }
    // The remaining sign quantities only concern the side cycles, and only
    // govern where flipping them would change the classification; inside a
    // region that is completely unstable for another strict reason they are
    // inert.
    let d = params.eps_x() - params.eps_y();
    let (b_name, b, cu_d) = match cycle {
        CycleId::C1 => ("b1", b1(params), d),
        CycleId::C2 => ("b2", b2(params), -d),
        _ => return None,
    };
    if s < 0.0 || cu_d > BOUNDARY_BAND {
        // Strictly unstable by the sum sign or by sitting strictly on the
        // unstable side of the diagonal.
        return None;
    }
    match (d.abs() < BOUNDARY_BAND, b.abs() < BOUNDARY_BAND) {
        (true, true) => {
            if d.abs() <= b.abs() {
                Some(("eps_x-eps_y", d))
            } else {
                Some((b_name, b))
            }
        }
        (true, false) => {
            if b > 0.0 {
                Some(("eps_x-eps_y", d))
            } else {
                None
            }
        }
        (false, true) => Some((b_name, b)),
        (false, false) => None,
    }
}

// ---------------------------------------------------------------------------
// Closed-form indices
// ---------------------------------------------------------------------------

/// Per-node stability indices from the explicit parameter formulas, without
/// the boundary guard (callers decide how to report boundary parameters).
fn closed_form_sigma(cycle: CycleId, params: &PayoffParams) -> Vec<(NodeLabel, StabilityIndexValue)> {
    use StabilityIndexValue::{Finite, NegInf};
    let (ex, ey) = (params.eps_x(), params.eps_y());
    let all_neg_inf =
        |cycle: CycleId| cycle.nodes().iter().map(|&n| (n, NegInf)).collect::<Vec<_>>();
    match cycle {
        CycleId::C0 => {
            if ex + ey < 0.0 {
                let s0 = ((1.0 - ex) / (1.0 + ex)).min((1.0 - ey).powi(2) / (2.0 * (1.0 + ey)));
                let s1 = ((1.0 - ey) / (1.0 + ey)).min((1.0 - ex).powi(2) / (2.0 * (1.0 + ex)));
                vec![(NodeLabel::Xi0, Finite(s0)), (NodeLabel::Xi1, Finite(s1))]
            } else {
                all_neg_inf(cycle)
            }
        }
        CycleId::C1 => {
            if ex + ey < 0.0 || b1(params) < 0.0 || ex - ey > 0.0 {
                all_neg_inf(cycle)
            } else {
                let s1 = (-4.0 + ex + (3.0 - ex) * ey + ey * ey) / ((1.0 - ex) * (1.0 + ey));
                let s2 = ((ey - ex) / (1.0 - ey))
                    .min((1.0 + 2.0 * ex + ey * ey) / (2.0 * (1.0 - ex)));
                vec![(NodeLabel::Xi1, Finite(s1)), (NodeLabel::Xi2, Finite(s2))]
            }
        }
        CycleId::C2 => {
            if ex + ey < 0.0 || b2(params) < 0.0 || ex - ey < 0.0 {
                all_neg_inf(cycle)
            } else {
                let s0 = (-4.0 + ey + (3.0 - ey) * ex + ex * ex) / ((1.0 - ey) * (1.0 + ex));
                let s2 = ((ex - ey) / (1.0 - ex))
                    .min((1.0 + 2.0 * ey + ex * ex) / (2.0 * (1.0 - ey)));
                vec![(NodeLabel::Xi0, Finite(s0)), (NodeLabel::Xi2, Finite(s2))]
            }
        }
        CycleId::C3 | CycleId::C4 => all_neg_inf(cycle),
    }
}

/// Per-node stability indices from the explicit closed-form parameter formulas.
pub fn closed_form_indices(
    cycle: CycleId,
    params: &PayoffParams,
) -> Result<Vec<(NodeLabel, StabilityIndexValue)>, StabilityError> {
    if let Some((quantity, value)) = boundary_quantity(cycle, params) {
        return Err(StabilityError::BoundaryParams { quantity, value });
    }
    Ok(closed_form_sigma(cycle, params))
}

// ---------------------------------------------------------------------------
// Matrix-path indices
// ---------------------------------------------------------------------------

/// Per-node stability indices from the transition-matrix pipeline.
///
/// Every composite around the cycle must pass the three dominance conditions;
/// otherwise all indices are `−∞`.  When they pass, the index at a node is
/// the minimum of [`f_index`] over a finite family of exponent vectors: the
/// dominant left eigenvector of the node's composite (the limit of the
/// basin-sequence rows), the rows of the node's basic matrix, for three-node
/// cycles the rows of the two-step partial product, and the rows of the full
/// composite.
pub fn stability_indices_matrix_path(
    cycle: CycleId,
    params: &PayoffParams,
) -> Result<Vec<(NodeLabel, StabilityIndexValue)>, StabilityError> {
    if let Some((quantity, value)) = boundary_quantity(cycle, params) {
        return Err(StabilityError::BoundaryParams { quantity, value });
    }
    let nodes = cycle.nodes();
    let mut composites = Vec::with_capacity(nodes.len());
    let mut dominances = Vec::with_capacity(nodes.len());
    for &node in nodes {
        let comp = cycle_transition_matrix(cycle, node, params).expect("node lies on cycle");
        let dom = dominance(&comp)?;
        let max_mod = dom.eigenvalues[0].norm();
        if (max_mod - 1.0).abs() < BOUNDARY_BAND {
            return Err(StabilityError::BoundaryParams {
                quantity: "lambda_max-1",
                value: max_mod - 1.0,
            });
        }
        composites.push(comp);
        dominances.push(dom);
    }
    let all_pass = dominances
        .iter()
        .all(|d| d.cond_i && d.cond_ii && d.cond_iii == Some(true));
    if !all_pass {
        return Ok(nodes.iter().map(|&n| (n, StabilityIndexValue::NegInf)).collect());
    }

    let mut out = Vec::with_capacity(nodes.len());
    for (j, &node) in nodes.iter().enumerate() {
        let mut family: Vec<[f64; 3]> = Vec::new();
        family.push(dominances[j].v_max.expect("conditions passed"));
        let basic = basic_transition_matrix(cycle, node, params).expect("node lies on cycle");
        family.extend(basic.entries());
        if nodes.len() == 3 {
            let next = cycle.successor(node).unwrap();
            let basic_next =
                basic_transition_matrix(cycle, next, params).expect("node lies on cycle");
            let two_step = basic_next.matrix() * basic.matrix();
            for i in 0..3 {
                family.push([two_step[(i, 0)], two_step[(i, 1)], two_step[(i, 2)]]);
            }
        }
        family.extend(composites[j].entries());
        let sigma = family
            .into_iter()
            .map(f_index)
            .fold(StabilityIndexValue::PosInf, StabilityIndexValue::min);
        out.push((node, sigma));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Outcome labels for a cycle at given parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Essentially asymptotically stable: every index positive.
    #[serde(rename = "EAS")]
    Eas,
    /// Fragmentarily asymptotically stable: some index exceeds `−∞` but not
    /// all are positive.
    #[serde(rename = "FAS")]
    Fas,
    /// Completely unstable: every index `−∞` (side and tie cycles).
    #[serde(rename = "CU")]
    Cu,
    /// Every index `−∞` for the win–loss cycle, whose instability statement
    /// is "not an attractor" rather than complete instability.
    NonAttractor,
    /// Parameters inside the boundary band of a governing sign quantity;
    /// never classified.
    Boundary,
}

impl Classification {
    /// Canonical machine tag (used in CSV cells and JSON).
    pub fn tag(&self) -> &'static str {
        match self {
            Classification::Eas => "EAS",
            Classification::Fas => "FAS",
            Classification::Cu => "CU",
            Classification::NonAttractor => "NonAttractor",
            Classification::Boundary => "Boundary",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "EAS" => Classification::Eas,
            "FAS" => Classification::Fas,
            "CU" => Classification::Cu,
            "NonAttractor" => Classification::NonAttractor,
            "Boundary" => Classification::Boundary,
            _ => return None,
        })
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Eas => "e.a.s.",
            Classification::Fas => "f.a.s.",
            Classification::Cu => "c.u.",
            Classification::NonAttractor => "non-attractor",
            Classification::Boundary => "boundary",
        };
        f.write_str(s)
    }
}

/// Stability indices and classification of one cycle at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub cycle: CycleId,
    pub eps_x: f64,
    pub eps_y: f64,
    /// Index per node, in the cycle's node order.
    pub sigma: Vec<(NodeLabel, StabilityIndexValue)>,
    pub classification: Classification,
}

impl StabilityReport {
    pub fn sigma_for(&self, node: NodeLabel) -> Option<StabilityIndexValue> {
        self.sigma.iter().find(|(n, _)| *n == node).map(|(_, v)| *v)
    }
}

fn classification_from_sigma(
    cycle: CycleId,
    sigma: &[(NodeLabel, StabilityIndexValue)],
) -> Classification {
    if sigma.iter().all(|(_, v)| v.is_positive()) {
        Classification::Eas
    } else if sigma.iter().any(|(_, v)| !matches!(v, StabilityIndexValue::NegInf)) {
        Classification::Fas
    } else if cycle == CycleId::C0 {
        Classification::NonAttractor
    } else {
        Classification::Cu
    }
}

/// Classify a cycle at the given parameters via the closed-form indices.
/// Total: boundary parameters yield the `Boundary` label instead of an error.
pub fn classify(cycle: CycleId, params: &PayoffParams) -> StabilityReport {
    let sigma = closed_form_sigma(cycle, params);
    let classification = if boundary_quantity(cycle, params).is_some() {
        Classification::Boundary
    } else {
        classification_from_sigma(cycle, &sigma)
    };
    StabilityReport {
        cycle,
        eps_x: params.eps_x(),
        eps_y: params.eps_y(),
        sigma,
        classification,
    }
}

/// Classify via the matrix pipeline (errors on boundary bands and eigenvalue
/// ties instead of labelling).
pub fn classify_matrix_path(
    cycle: CycleId,
    params: &PayoffParams,
) -> Result<StabilityReport, StabilityError> {
    let sigma = stability_indices_matrix_path(cycle, params)?;
    let classification = classification_from_sigma(cycle, &sigma);
    Ok(StabilityReport {
        cycle,
        eps_x: params.eps_x(),
        eps_y: params.eps_y(),
        sigma,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(ex: f64, ey: f64) -> PayoffParams {
        PayoffParams::new(ex, ey).unwrap()
    }

    fn c0_composite(ex: f64, ey: f64) -> TransitionMatrix {
        cycle_transition_matrix(CycleId::C0, NodeLabel::Xi0, &params(ex, ey)).unwrap()
    }

    #[test]
    fn char_poly_of_the_win_loss_composite() {
        let cp = char_poly(&c0_composite(0.0, 0.0));
        assert!((cp.tr + 0.75).abs() < 1e-12);
        assert!((cp.b + 0.75).abs() < 1e-12);
        assert!((cp.det - 1.0).abs() < 1e-12);

        let cp = char_poly(&c0_composite(-0.5, -0.5));
        assert!((cp.tr - 0.0625).abs() < 1e-12);
        assert!((cp.b + 1.4375).abs() < 1e-12);
        assert!((cp.det - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_char_poly_matches_the_product_on_a_grid() {
        for i in 0..9 {
            for j in 0..9 {
                let ex = -0.8 + 0.2 * i as f64;
                let ey = -0.8 + 0.2 * j as f64;
                let cp = char_poly(&c0_composite(ex, ey));
                let cf = c0_composite_char_poly(&params(ex, ey));
                assert!((cp.tr - cf.tr).abs() < 1e-12, "tr at ({ex},{ey})");
                assert!((cp.b - cf.b).abs() < 1e-12, "b at ({ex},{ey})");
                assert!((cp.det - 1.0).abs() < 1e-10, "det at ({ex},{ey})");
            }
        }
    }

    #[test]
    fn routh_hurwitz_counts() {
        let cp = char_poly(&c0_composite(0.0, 0.0));
        assert_eq!(routh_hurwitz_positive_count(&cp).unwrap(), 1);
        // Identity-like coefficients: sequence (-1, 3, -8/3, 1), three changes.
        let ident = CharPolyData { tr: 3.0, b: 3.0, det: 1.0 };
        assert_eq!(routh_hurwitz_positive_count(&ident).unwrap(), 3);
        let degen = CharPolyData { tr: 1e-13, b: 1.0, det: 1.0 };
        assert!(matches!(
            routh_hurwitz_positive_count(&degen),
            Err(StabilityError::DegenerateTrace { .. })
        ));
    }

    #[test]
    fn discriminant_frozen_values_and_edge_factorisation() {
        assert!((discriminant_raw(0.0, 0.0) + 3375.0 / 256.0).abs() < 1e-12);
        assert!((discriminant_raw(0.0, -1.0) + 54.0 / 4.0).abs() < 1e-12);
        // On the edge eps_y = -1 the quartic factors as -(1-ex)(ex^3+9ex^2+54)/4.
        for ex in [-0.7, -0.2, 0.3, 0.9] {
            let direct = discriminant_raw(ex, -1.0);
            let factored = -(1.0 - ex) * (ex.powi(3) + 9.0 * ex * ex + 54.0) / 4.0;
            assert!((direct - factored).abs() < 1e-10, "at ex={ex}");
        }
    }

    #[test]
    fn discriminant_agrees_with_the_coefficient_route() {
        for i in 0..9 {
            for j in 0..9 {
                let p = params(-0.8 + 0.2 * i as f64, -0.8 + 0.2 * j as f64);
                let from_quartic = discriminant(&p);
                let from_coeffs = char_poly_discriminant(&c0_composite_char_poly(&p));
                assert!(
                    (from_quartic - from_coeffs).abs() < 1e-9 * from_coeffs.abs().max(1.0),
                    "at ({}, {})",
                    p.eps_x(),
                    p.eps_y()
                );
                assert!(from_quartic < 0.0);
            }
        }
        let spot = discriminant(&params(0.5, -0.3));
        assert!((spot + 11.55276013).abs() < 1e-6);
    }

    #[test]
    fn cubic_roots_on_known_polynomials() {
        // (λ-1)(λ-2)(λ-3)
        let roots = cubic_roots(&CharPolyData { tr: 6.0, b: 11.0, det: 6.0 });
        let mut reals: Vec<f64> = roots.iter().map(|z| z.re).collect();
        reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in reals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(roots.iter().all(|z| z.im.abs() < 1e-12));

        // (λ-2)(λ²+1): one real root and a unit conjugate pair.
        let roots = cubic_roots(&CharPolyData { tr: 2.0, b: 1.0, det: 2.0 });
        assert!((roots[0].re - 2.0).abs() < 1e-12 && roots[0].im.abs() < 1e-12);
        assert!((roots[1].norm() - 1.0).abs() < 1e-12);
        assert!((roots[1].re).abs() < 1e-12);
        assert!((roots[1].im - 1.0).abs() < 1e-12);

        // (λ-1)³: triple root.
        let roots = cubic_roots(&CharPolyData { tr: 3.0, b: 3.0, det: 1.0 });
        for z in roots {
            assert!((z - Complex::new(1.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn eigen_triple_is_cross_checked() {
        for (ex, ey) in [(0.0, 0.0), (-0.5, -0.5), (0.5, 0.5), (0.37, -0.81)] {
            let roots = eigen_triple(&c0_composite(ex, ey)).unwrap();
            // Product of roots = det = 1.
            let prod = roots.iter().copied().fold(Complex::new(1.0, 0.0), |a, b| a * b);
            assert!((prod - Complex::new(1.0, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn dominance_in_the_stable_wedge() {
        let dom = dominance(&c0_composite(-0.5, -0.5)).unwrap();
        assert!(dom.cond_i && dom.cond_ii);
        let lam = dom.lambda_max.re;
        assert!(lam > 1.4 && lam < 1.5, "lambda_max = {lam}");
        // Independent bracketing: the characteristic polynomial changes sign
        // between 1.45 and 1.5.
        let cp = char_poly(&c0_composite(-0.5, -0.5));
        assert!(cp.eval(1.45) < 0.0 && cp.eval(1.5) > 0.0);
        assert!(lam > 1.45 && lam < 1.5);
        assert_eq!(dom.cond_iii, Some(true));
        let w = dom.w_max.unwrap();
        assert!(w.iter().all(|c| *c > 0.0));
        // The unit-normalised eigenvector can never satisfy the pairwise
        // ">1" variant; it is logged as false.
        assert_eq!(dom.cond_iii_printed, Some(false));
        let v = dom.v_max.unwrap();
        let dot: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        assert!(dot > 0.0);
    }

    #[test]
    fn dominance_in_the_unstable_wedge() {
        let dom = dominance(&c0_composite(0.5, 0.5)).unwrap();
        assert!(!dom.cond_i, "dominant eigenvalue should be the complex pair");
        assert!(!dom.cond_ii);
        assert!(dom.cond_iii.is_none());
        assert!(dom.eigenvalues[0].im.abs() > 1e-6);
        assert!(dom.eigenvalues[0].norm() > 1.0);
    }

    #[test]
    fn dominance_ties_on_the_zero_sum_line() {
        // At eps_x + eps_y = 0 the composite has λ = 1 against a unit-modulus
        // pair: an undecidable tie, reported as such.
        assert!(matches!(
            dominance(&c0_composite(0.3, -0.3)),
            Err(StabilityError::TieBreak { .. })
        ));
    }

    #[test]
    fn f_index_branch_examples() {
        assert_eq!(f_index([1.0, 2.0, 3.0]), StabilityIndexValue::PosInf);
        assert_eq!(f_index([-1.0, -2.0, -3.0]), StabilityIndexValue::NegInf);
        assert_eq!(f_index([-1.0, 0.0, 1.0]), StabilityIndexValue::Finite(0.0));
        assert_eq!(f_index([-0.5, 0.0, 1.0]), StabilityIndexValue::Finite(1.0));
        // Negative-sum branch: sum/alpha_max.
        assert_eq!(f_index([-2.0, 0.5, 0.5]), StabilityIndexValue::Finite(-2.0));
    }

    proptest! {
        #[test]
        fn f_index_is_antisymmetric(
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
            c in -10.0f64..10.0,
        ) {
            prop_assume!(a != 0.0 || b != 0.0 || c != 0.0);
            let plus = f_index([a, b, c]);
            let minus = f_index([-a, -b, -c]);
            match (plus, minus) {
                (StabilityIndexValue::PosInf, m) => prop_assert_eq!(m, StabilityIndexValue::NegInf),
                (StabilityIndexValue::NegInf, m) => prop_assert_eq!(m, StabilityIndexValue::PosInf),
                (StabilityIndexValue::Finite(p), StabilityIndexValue::Finite(m)) => {
                    prop_assert!((p + m).abs() <= 1e-9 * p.abs().max(1.0));
                }
                other => prop_assert!(false, "mismatched variants {:?}", other),
            }
        }

        #[test]
        fn f_index_is_scale_invariant(
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
            c in -10.0f64..10.0,
            scale in 0.1f64..10.0,
        ) {
            let plain = f_index([a, b, c]);
            let scaled = f_index([scale * a, scale * b, scale * c]);
            match (plain, scaled) {
                (StabilityIndexValue::Finite(p), StabilityIndexValue::Finite(s)) => {
                    prop_assert!((p - s).abs() <= 1e-6 * (1.0 + p.abs()));
                }
                (p, s) => prop_assert_eq!(p, s),
            }
        }

        #[test]
        fn b_quadratics_swap_under_parameter_exchange(
            a in -0.99f64..0.99,
            b in -0.99f64..0.99,
        ) {
            let lhs = b1_raw(a, b);
            let rhs = b2_raw(b, a);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn b_quadratic_frozen_values() {
        assert!((b1(&params(0.0, 0.0)) + 4.0).abs() < 1e-12);
        assert!((b2(&params(0.9, 0.5)) - 6.02).abs() < 1e-12);
        assert!((b2(&params(0.5, 0.25)) + 0.96875).abs() < 1e-12);
    }

    #[test]
    fn region_curves_are_roots_of_their_quadratics() {
        assert!((b1_zero_curve(0.0) - 0.8).abs() < 1e-12);
        assert!((b2_zero_curve(0.0) - 1.0).abs() < 1e-12);
        for i in 0..21 {
            let ex = -0.95 + 0.095 * i as f64;
            assert!(b1_raw(ex, b1_zero_curve(ex)).abs() < 1e-10, "b1 at {ex}");
            assert!(b2_raw(ex, b2_zero_curve(ex)).abs() < 1e-10, "b2 at {ex}");
        }
    }

    #[test]
    fn closed_form_spot_values() {
        let sigma = closed_form_indices(CycleId::C0, &params(-0.5, -0.25)).unwrap();
        assert!((sigma[0].1.as_f64() - 25.0 / 24.0).abs() < 1e-12);
        assert!((sigma[1].1.as_f64() - 5.0 / 3.0).abs() < 1e-12);

        let sigma = closed_form_indices(CycleId::C2, &params(0.9, 0.5)).unwrap();
        assert_eq!(sigma[0].0, NodeLabel::Xi0);
        assert!((sigma[0].1.as_f64() - (-0.44 / 0.95)).abs() < 1e-12);
        assert_eq!(sigma[1].0, NodeLabel::Xi2);
        assert!((sigma[1].1.as_f64() - 2.81).abs() < 1e-12);

        let sigma = closed_form_indices(CycleId::C1, &params(0.5, 0.9)).unwrap();
        assert!((sigma[1].1.as_f64() - 2.81).abs() < 1e-12);

        let sigma = closed_form_indices(CycleId::C1, &params(-0.5, -0.25)).unwrap();
        assert!(sigma.iter().all(|(_, v)| *v == StabilityIndexValue::NegInf));

        for cycle in [CycleId::C3, CycleId::C4] {
            let sigma = closed_form_indices(cycle, &params(0.6, 0.2)).unwrap();
            assert!(sigma.iter().all(|(_, v)| *v == StabilityIndexValue::NegInf));
        }
    }

    #[test]
    fn boundary_parameters_are_rejected_with_the_nearest_quantity() {
        match closed_form_indices(CycleId::C0, &params(0.1, -0.1)) {
            Err(StabilityError::BoundaryParams { quantity, .. }) => {
                assert_eq!(quantity, "eps_x+eps_y")
            }
            other => panic!("expected BoundaryParams, got {other:?}"),
        }
        // On the diagonal with b1 > 0 the diagonal sign decides FAS vs CU,
        // so it is a governing boundary there...
        assert!(b1(&params(0.6, 0.6)) > 0.0);
        match closed_form_indices(CycleId::C1, &params(0.6, 0.6)) {
            Err(StabilityError::BoundaryParams { quantity, .. }) => {
                assert_eq!(quantity, "eps_x-eps_y")
            }
            other => panic!("expected BoundaryParams, got {other:?}"),
        }
        // ...but where b1 < 0 already forces complete instability on both
        // sides, the diagonal is inert and the indices are defined.
        assert!(b1(&params(0.4, 0.4)) < 0.0);
        let sigma = closed_form_indices(CycleId::C1, &params(0.4, 0.4)).unwrap();
        assert!(sigma.iter().all(|(_, v)| *v == StabilityIndexValue::NegInf));
        // Likewise on the completely unstable side of the sum sign.
        assert!(closed_form_indices(CycleId::C1, &params(-0.3, -0.3)).is_ok());
        // The b-quantity governs where its own sign separates FAS from CU.
        let near_b2_zero = params(0.9, b2_zero_curve(0.9) + 1e-10);
        match closed_form_indices(CycleId::C2, &near_b2_zero) {
            Err(StabilityError::BoundaryParams { quantity, .. }) => assert_eq!(quantity, "b2"),
            other => panic!("expected BoundaryParams, got {other:?}"),
        }
        // The tie cycles treat only the zero-sum line as a boundary.
        assert!(closed_form_indices(CycleId::C3, &params(0.4, 0.4)).is_ok());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(CycleId::C0, &params(-0.3, -0.3)).classification, Classification::Eas);
        assert_eq!(
            classify(CycleId::C0, &params(0.5, 0.25)).classification,
            Classification::NonAttractor
        );
        assert_eq!(classify(CycleId::C2, &params(0.5, 0.25)).classification, Classification::Cu);
        assert_eq!(classify(CycleId::C2, &params(0.9, 0.5)).classification, Classification::Fas);
        assert_eq!(
            classify(CycleId::C0, &params(0.1, -0.1)).classification,
            Classification::Boundary
        );
        assert_eq!(classify(CycleId::C3, &params(0.9, 0.5)).classification, Classification::Cu);
    }

    #[test]
    fn matrix_path_matches_closed_forms_at_spot_points() {
        let got = stability_indices_matrix_path(CycleId::C0, &params(-0.5, -0.25)).unwrap();
        assert!((got[0].1.as_f64() - 25.0 / 24.0).abs() < 1e-9);
        assert!((got[1].1.as_f64() - 5.0 / 3.0).abs() < 1e-9);

        let got = stability_indices_matrix_path(CycleId::C0, &params(0.5, 0.25)).unwrap();
        assert!(got.iter().all(|(_, v)| *v == StabilityIndexValue::NegInf));

        for (ex, ey) in [(0.2, 0.6), (-0.4, -0.7), (0.8, 0.1)] {
            let got = stability_indices_matrix_path(CycleId::C3, &params(ex, ey)).unwrap();
            assert!(got.iter().all(|(_, v)| *v == StabilityIndexValue::NegInf));
        }
    }

    #[test]
    fn matrix_path_matches_closed_forms_on_a_small_grid() {
        for cycle in [CycleId::C0, CycleId::C1, CycleId::C2] {
            for i in 0..7 {
                for j in 0..7 {
                    let p = params(-0.75 + 0.25 * i as f64, -0.75 + 0.25 * j as f64);
                    if boundary_quantity(cycle, &p).is_some() {
                        continue;
                    }
                    let closed = closed_form_indices(cycle, &p).unwrap();
                    let matrix = match stability_indices_matrix_path(cycle, &p) {
                        Ok(m) => m,
                        Err(StabilityError::BoundaryParams { .. }) => continue,
                        Err(e) => panic!("{cycle} at ({}, {}): {e}", p.eps_x(), p.eps_y()),
                    };
                    for ((n1, a), (n2, b)) in closed.iter().zip(&matrix) {
                        assert_eq!(n1, n2);
                        match (a, b) {
                            (StabilityIndexValue::Finite(x), StabilityIndexValue::Finite(y)) => {
                                assert!(
                                    (x - y).abs() < 1e-9 * x.abs().max(1.0),
                                    "{cycle} {n1} at ({}, {}): {x} vs {y}",
                                    p.eps_x(),
                                    p.eps_y()
                                );
                            }
                            (a, b) => assert_eq!(
                                a,
                                b,
                                "{cycle} {n1} at ({}, {})",
                                p.eps_x(),
                                p.eps_y()
                            ),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn side_cycle_indices_swap_under_parameter_exchange() {
        for (a, b) in [(0.9, 0.5), (0.3, 0.7), (-0.2, 0.45)] {
            let c1 = closed_form_sigma(CycleId::C1, &params(b, a));
            let c2 = closed_form_sigma(CycleId::C2, &params(a, b));
            // C1's winning-node index maps to C2's losing-node index, and the
            // tie-node indices map to each other.
            assert!((c1[0].1.as_f64() - c2[0].1.as_f64()).abs() < 1e-12 || (c1[0].1.as_f64().is_infinite() && c1[0].1.as_f64() == c2[0].1.as_f64()));
            assert!((c1[1].1.as_f64() - c2[1].1.as_f64()).abs() < 1e-12 || (c1[1].1.as_f64().is_infinite() && c1[1].1.as_f64() == c2[1].1.as_f64()));
        }
        let c0_ab = closed_form_sigma(CycleId::C0, &params(-0.5, -0.25));
        let c0_ba = closed_form_sigma(CycleId::C0, &params(-0.25, -0.5));
        assert!((c0_ab[0].1.as_f64() - c0_ba[1].1.as_f64()).abs() < 1e-12);
        assert!((c0_ab[1].1.as_f64() - c0_ba[0].1.as_f64()).abs() < 1e-12);
    }

    #[test]
    fn index_values_serialise_with_infinity_strings() {
        let json = serde_json::to_string(&StabilityIndexValue::PosInf).unwrap();
        assert_eq!(json, "\"inf\"");
        let json = serde_json::to_string(&StabilityIndexValue::NegInf).unwrap();
        assert_eq!(json, "\"-inf\"");
        let json = serde_json::to_string(&StabilityIndexValue::Finite(1.5)).unwrap();
        assert_eq!(json, "1.5");
        let back: StabilityIndexValue = serde_json::from_str("\"-inf\"").unwrap();
        assert_eq!(back, StabilityIndexValue::NegInf);
        let back: StabilityIndexValue = serde_json::from_str("2.25").unwrap();
        assert_eq!(back, StabilityIndexValue::Finite(2.25));
    }
}
