//! DC cuts, lift-and-project cuts, and cut-pool hygiene.
//!
//! Every cut is stored as `coeffs'u >= rhs` over the stacked `(x, y)` vector.
//!
//! The DC cuts are built from the affine majorant of the penalty anchored at
//! `u*`:
//!
//! ```text
//! l(u) = sum_{i in J0} x_i + sum_{j in J1} (1 - x_j),   J0 = {j : x*_j <= 1/2}
//! ```
//!
//! which equals `p(u*)` at `u*` and dominates `p` everywhere on the box. A
//! type-I cut `l(u) >= 1` removes a feasible critical point (and nothing
//! better than it); a type-II cut `l(u) >= ceil(l(u*))` removes an infeasible
//! local minimizer with fractional penalty and keeps all of `S`.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::dca::penalty_p;
use crate::instance::{dot, Point, PolyState};
use crate::simplex::{
    solve_lp, solve_lp_from, LinearProgram, LpOutcome, SimplexError, SimplexOptions,
};

/// Smallest `min(x_j, 1 - x_j)` for which an index counts as fractional.
pub const MIN_FRACTIONALITY: f64 = crate::instance::DEFAULT_INT_TOL;
/// Generated cuts must be violated by more than this at their source.
pub const DEFAULT_VIOLATION_TOL: f64 = 1e-6;
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CutKind {
    /// Local type-I DC cut at a feasible critical point.
    Dc1,
    /// Global type-II DC cut at an infeasible local minimizer.
    Dc2,
    /// Lift-and-project cut.
    Lap,
}

impl CutKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CutKind::Dc1 => "dc1",
            CutKind::Dc2 => "dc2",
            CutKind::Lap => "lap",
        }
    }

    pub fn is_dc(self) -> bool {
        matches!(self, CutKind::Dc1 | CutKind::Dc2)
    }
}

/// `coeffs'u >= rhs`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cut {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
    pub kind: CutKind,
    /// Point the cut was separated from.
    pub source: Point,
    /// Iteration `k` of the polytope `K^k` the cut was derived from.
    pub iteration: usize,
}

impl Cut {
    pub fn new(coeffs: Vec<f64>, rhs: f64, kind: CutKind, source: Point, iteration: usize) -> Self {
        Self {
            coeffs,
            rhs,
            kind,
            source,
            iteration,
        }
    }

    /// `coeffs'u - rhs`; negative means violated.
    pub fn slack(&self, u: &Point) -> f64 {
        self.coeffs
            .iter()
            .zip(u.coords())
            .map(|(a, v)| a * v)
            .sum::<f64>()
            - self.rhs
    }

    pub fn is_satisfied(&self, u: &Point, tol: f64) -> bool {
        self.slack(u) >= -tol
    }

    /// Coefficients and rhs divided by `max |coeff|` (unchanged if all zero).
    fn normalized(&self) -> (Vec<f64>, f64) {
        let s = self.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if s == 0.0 {
            (self.coeffs.clone(), self.rhs)
        } else {
            (self.coeffs.iter().map(|a| a / s).collect(), self.rhs / s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CutError {
    #[error("type-I cut requested at a point whose x is not binary (x[{index}] = {value})")]
    NotBinary { index: usize, value: f64 },
    #[error("x[{index}] = {value} is not fractional; no disjunction to exploit")]
    NotFractional { index: usize, value: f64 },
    #[error("index {index} out of range for {n} binary variables")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("cut-generation LP failed: {0}")]
    Lp(#[from] SimplexError),
    #[error("cut-generation LP is {0} after normalization")]
    Cglp(&'static str),
}

/// `(J0, J1)`: indices with `x_j <= 1/2` and the rest.
pub fn index_sets(u: &Point) -> (Vec<usize>, Vec<usize>) {
    (0..u.x.len()).partition(|&j| u.x[j] <= 0.5)
}

/// `l_{u*}(u) = coeffs'u + constant`, with `+1` on `J0`, `-1` on `J1`, zero on
/// `y`, and `constant = |J1|`.
pub fn affine_l(u_star: &Point) -> (Vec<f64>, f64) {
    let (_, j1) = index_sets(u_star);
    let mut coeffs: Vec<f64> = u_star
        .x
        .iter()
        .map(|&v| if v <= 0.5 { 1.0 } else { -1.0 })
        .collect();
    coeffs.resize(u_star.x.len() + u_star.y.len(), 0.0);
    (coeffs, j1.len() as f64)
}

/// Evaluates `l_{u*}` at `u`.
pub fn eval_l(u_star: &Point, u: &Point) -> f64 {
    let (coeffs, constant) = affine_l(u_star);
    coeffs
        .iter()
        .zip(u.coords())
        .map(|(a, v)| a * v)
        .sum::<f64>()
        + constant
}

/// Type-I DC cut `l_{u*}(u) >= 1` at a feasible point.
pub fn dc_cut_type1(u_star: &Point, int_tol: f64, iteration: usize) -> Result<Cut, CutError> {
    if let Some((index, &value)) = u_star
        .x
        .iter()
        .enumerate()
        .find(|(_, v)| v.abs() > int_tol && (**v - 1.0).abs() > int_tol)
    {
        return Err(CutError::NotBinary { index, value });
    }
    let anchor = u_star.snapped();
    let (coeffs, constant) = affine_l(&anchor);
    Ok(Cut::new(
        coeffs,
        1.0 - constant,
        CutKind::Dc1,
        u_star.clone(),
        iteration,
    ))
}

/// Type-II DC cut `l_{u*}(u) >= ceil(l_{u*}(u*))`.
///
/// Returns `None` unless `p(u*)` is fractional (beyond `int_tol`) and no
/// `x*_i` is within `tie_tol` of `1/2`. The caller vouches that `u*` is a
/// local minimizer of the penalized problem over the current polytope.
pub fn dc_cut_type2(u_star: &Point, tie_tol: f64, int_tol: f64, iteration: usize) -> Option<Cut> {
    let p = penalty_p(u_star);
    if (p - libm::round(p)).abs() <= int_tol {
        return None;
    }
    if u_star.x.iter().any(|&v| (v - 0.5).abs() <= tie_tol) {
        return None;
    }
    let (coeffs, constant) = affine_l(u_star);
    Some(Cut::new(
        coeffs,
        libm::ceil(p) - constant,
        CutKind::Dc2,
        u_star.clone(),
        iteration,
    ))
}

/// Fractional indices of `u*` by decreasing fractionality, at most `nlap`.
pub fn select_fractional_indices(u_star: &Point, nlap: usize) -> Vec<usize> {
    let frac = |v: f64| v.min(1.0 - v);
    let mut idx: Vec<usize> = (0..u_star.x.len())
        .filter(|&j| frac(u_star.x[j]) >= MIN_FRACTIONALITY)
        .collect();
    // Stable sort keeps ascending index among equal fractionality.
    idx.sort_by(|&a, &b| frac(u_star.x[b]).total_cmp(&frac(u_star.x[a])));
    idx.truncate(nlap);
    idx
}

/// Lift-and-project cut for the disjunction `x_j <= 0  or  x_j >= 1` over
/// `K^k`, separating `u*`.
///
/// The cut-generation LP, over the `>=`-system `G u >= h` of `K^k` (bounds
/// included), finds multipliers `w, w0, v, v0 >= 0` with
///
/// ```text
/// alpha = G'w - w0 e_j = G'v + v0 e_j,   beta <= h'w,   beta <= h'v + v0
/// ```
///
/// maximizing `beta - alpha'u*` under `sum(w) + w0 + sum(v) + v0 = 1`.
/// Returns `Ok(None)` when the best violation is at most `violation_tol`.
pub fn lap_cut(
    state: &PolyState<'_>,
    u_star: &Point,
    j: usize,
    violation_tol: f64,
) -> Result<Option<Cut>, CutError> {
    let n = state.base().n();
    if j >= n {
        return Err(CutError::IndexOutOfRange { index: j, n });
    }
    let xj = u_star.x[j];
    if xj.min(1.0 - xj) < MIN_FRACTIONALITY {
        return Err(CutError::NotFractional {
            index: j,
            value: xj,
        });
    }

    let (g, h) = state.geq_system();
    let r = g.len();
    let dim = state.base().dim();
    let u = u_star.stacked();

    // Column layout: w (r) | w0 | v (r) | v0 | beta+ | beta-
    let w0 = r;
    let v_at = r + 1;
    let v0 = 2 * r + 1;
    let bp = 2 * r + 2;
    let bn = 2 * r + 3;
    let ncols = 2 * r + 4;

    let mut objective = vec![0.0; ncols];
    for (row, col) in g.iter().zip(0..r) {
        objective[col] = dot(row, &u);
    }
    objective[w0] = -xj;
    objective[bp] = -1.0;
    objective[bn] = 1.0;
    let mut lp = LinearProgram::new(objective);

    let mut coeffs = vec![0.0; ncols];
    for k in 0..dim {
        coeffs.iter_mut().for_each(|v| *v = 0.0);
        for (i, row) in g.iter().enumerate() {
            coeffs[i] = row[k];
            coeffs[v_at + i] = -row[k];
        }
        if k == j {
            coeffs[w0] = -1.0;
            coeffs[v0] = -1.0;
        }
        lp.add_equality(&coeffs, perturbation(k));
    }
    // beta - h'w <= 0
    coeffs.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..r {
        coeffs[i] = -h[i];
    }
    coeffs[bp] = 1.0;
    coeffs[bn] = -1.0;
    lp.add_row(&coeffs, perturbation(dim));
    // beta - h'v - v0 <= 0
    coeffs.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..r {
        coeffs[v_at + i] = -h[i];
    }
    coeffs[v0] = -1.0;
    coeffs[bp] = 1.0;
    coeffs[bn] = -1.0;
    lp.add_row(&coeffs, perturbation(dim + 1));
    // Normalization.
    coeffs.iter_mut().for_each(|v| *v = 0.0);
    for c in coeffs.iter_mut().take(v0 + 1) {
        *c = 1.0;
    }
    lp.add_equality(&coeffs, 1.0);

    let mut sol = match solve_lp(&lp)? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible => return Err(CutError::Cglp("infeasible")),
        LpOutcome::Unbounded => return Err(CutError::Cglp("unbounded")),
    };
    // Clean up: the same basis under the true right-hand sides usually stays
    // feasible and optimal, giving exact multipliers. If it does not, or the
    // clean-up stalls, the perturbed multipliers are kept.
    let mut exact = lp.clone();
    for i in 0..exact.num_rows() - 1 {
        exact.set_rhs(i, 0.0);
    }
    let cleanup = SimplexOptions {
        max_iterations: 1_000,
        ..SimplexOptions::default()
    };
    if let Ok(Some(LpOutcome::Optimal(clean))) = solve_lp_from(&exact, &sol, &cleanup) {
        sol = clean;
    }

    // alpha comes from the x_j = 0 side, where it is exact. On the x_j = 1
    // side it differs from G'v + v0 e_j by the perturbation (and round-off),
    // so that side's bound is loosened by the drift times the box extent.
    let wv = &sol.x;
    let mut alpha = vec![0.0; dim];
    let mut alpha1 = vec![0.0; dim];
    for (i, row) in g.iter().enumerate() {
        let (a0, a1) = (wv[i], wv[v_at + i]);
        for k in 0..dim {
            alpha[k] += a0 * row[k];
            alpha1[k] += a1 * row[k];
        }
    }
    alpha[j] -= wv[w0];
    alpha1[j] += wv[v0];
    let base = state.base();
    let drift: f64 = (0..dim)
        .map(|k| {
            let extent = if k < n { 1.0 } else { base.ybar()[k - n] };
            (alpha[k] - alpha1[k]).abs() * extent
        })
        .sum();
    let beta0: f64 = (0..r).map(|i| wv[i] * h[i]).sum();
    let beta1: f64 = (0..r).map(|i| wv[v_at + i] * h[i]).sum::<f64>() + wv[v0] - drift;
    let beta = beta0.min(beta1);
    if beta - dot(&alpha, &u) <= violation_tol {
        return Ok(None);
    }

    let scale = alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let source = u_star.clone();
    if scale <= 1e-12 {
        // Both branches are empty over K^k: `0 >= 1` is valid for S^k.
        return Ok(Some(Cut::new(
            vec![0.0; dim],
            1.0,
            CutKind::Lap,
            source,
            state.iteration(),
        )));
    }
    let cut = Cut::new(
        alpha.iter().map(|a| a / scale).collect(),
        beta / scale,
        CutKind::Lap,
        source,
        state.iteration(),
    );
    if -cut.slack(u_star) <= violation_tol {
        return Ok(None);
    }
    Ok(Some(cut))
}

/// Right-hand side offset for row `k` of the cut-generation LP.
///
/// Its zero right-hand sides make the LP massively degenerate and the simplex
/// can stall for thousands of pivots on one vertex. Distinct tiny offsets
/// break the ties; the cut is made valid afterwards regardless of them.
fn perturbation(k: usize) -> f64 {
    const GOLDEN: f64 = 0.618_033_988_749_895;
    let frac = (k as f64 * GOLDEN + 0.5) % 1.0;
    1e-7 * (1.0 + frac)
}

/// True when `a` and `b` have the same direction up to positive scaling.
fn same_direction(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// True when `existing` makes `cut` redundant: same direction, at least as tight.
pub fn dominates(existing: &Cut, cut: &Cut, scale_tol: f64) -> bool {
    let (ea, eb) = existing.normalized();
    let (ca, cb) = cut.normalized();
    same_direction(&ea, &ca, scale_tol) && eb >= cb - scale_tol
}

/// Among cuts equal up to positive scaling keeps only the tightest (the
/// first one on ties); survivors keep their relative order.
pub fn pool_dedupe(cuts: Vec<Cut>, scale_tol: f64) -> Vec<Cut> {
    let norm: Vec<(Vec<f64>, f64)> = cuts.iter().map(Cut::normalized).collect();
    let keep: Vec<bool> = (0..cuts.len())
        .map(|i| {
            !(0..cuts.len()).any(|k| {
                k != i
                    && same_direction(&norm[k].0, &norm[i].0, scale_tol)
                    && (norm[k].1 > norm[i].1 + scale_tol
                        || ((norm[k].1 - norm[i].1).abs() <= scale_tol && k < i))
            })
        })
        .collect();
    cuts.into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}
