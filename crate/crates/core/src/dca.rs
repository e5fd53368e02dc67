//! Exact-penalty reformulation and DCA.
//!
//! The binary constraint is traded for the concave penalty
//! `p(x) = sum_i min(x_i, 1 - x_i)`, giving the penalized problem
//!
//! ```text
//! (P_t)   min  tau_t(u) = f(u) + t p(x)   over K^k
//! ```
//!
//! which is a DC program `g - h` with `g` the indicator of `K^k` and
//! `h = -f - t p` convex. Each DCA step linearizes `h` at the current point and
//! solves one LP, so every iterate after the start point is a vertex of `K^k`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{MblpInstance, Point, PolyState, Tolerances};
use crate::simplex::{
    solve_lp, solve_lp_from, LpOutcome, LpSolution, SimplexError, SimplexOptions,
};

/// How `z_i` is chosen when `x_i` sits at `1/2` (where `p` has a kink).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TieRule {
    /// `z_i = +1`.
    Deterministic,
    /// `z_i` drawn uniformly from `[-1, 1]` by a generator seeded with `seed`.
    SeededRandom { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DcaOptions {
    /// Penalty weight.
    pub t: f64,
    /// Relative objective change threshold.
    pub eps1: f64,
    /// Relative step length threshold.
    pub eps2: f64,
    pub max_iter: usize,
    /// Distance to `1/2` under which `x_i` counts as a tie.
    pub tie_tol: f64,
    pub tie_rule: TieRule,
    /// Drop `f` and minimize the penalty alone.
    pub penalty_only: bool,
}

impl Default for DcaOptions {
    fn default() -> Self {
        Self {
            t: 500.0,
            eps1: 1e-6,
            eps2: 1e-3,
            max_iter: 1000,
            tie_tol: 1e-9,
            tie_rule: TieRule::Deterministic,
            penalty_only: false,
        }
    }
}

impl DcaOptions {
    pub fn with_t(t: f64) -> Self {
        Self {
            t,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcaResult {
    /// The critical point `u*`.
    pub point: Point,
    /// `tau_t(u*)`.
    pub value: f64,
    /// `f(u*)`.
    pub plain_value: f64,
    /// Number of LPs solved.
    pub iterations: usize,
    pub certified_local_min: bool,
    /// `u*` lies in `S^k`.
    pub feasible: bool,
    /// The last LP returned the point it was linearized at, so `u*` is a
    /// genuine fixed point of the DCA map rather than a stop on a small step.
    pub stationary: bool,
    /// Start point followed by every LP solution.
    pub iterates: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DcaError {
    #[error("DCA subproblem is infeasible: the current polytope is empty")]
    Infeasible,
    #[error("DCA subproblem is unbounded")]
    Unbounded,
    #[error("DCA subproblem failed: {0}")]
    Lp(#[from] SimplexError),
    #[error("DCA did not converge within {0} iterations")]
    MaxIterations(usize),
    #[error("start point has {found} coordinates, expected {expected}")]
    Dimension { expected: usize, found: usize },
}

/// `p(x) = sum_i min(x_i, 1 - x_i)`.
pub fn penalty_p(u: &Point) -> f64 {
    u.x.iter().map(|&v| v.min(1.0 - v)).sum()
}

/// `tau_t(u) = f(u) + t p(x)`.
pub fn penalized_objective(inst: &MblpInstance, t: f64, u: &Point) -> f64 {
    inst.evaluate_f(u) + t * penalty_p(u)
}

/// A subgradient `(v, w)` of `h = -f - t p` at `u`:
/// `v = -c + t z`, `w = -d`, where `z_i = sign(x_i - 1/2)` off the kink.
pub fn subgradient_h(
    inst: &MblpInstance,
    t: f64,
    u: &Point,
    tie_rule: TieRule,
    tie_tol: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut draws = TieDraws::new(tie_rule);
    subgradient_with(inst.c(), inst.d(), t, u, tie_tol, &mut draws)
}

struct TieDraws(Option<ChaCha8Rng>);

impl TieDraws {
    fn new(rule: TieRule) -> Self {
        match rule {
            TieRule::Deterministic => Self(None),
            TieRule::SeededRandom { seed } => Self(Some(ChaCha8Rng::seed_from_u64(seed))),
        }
    }

    fn next(&mut self) -> f64 {
        match &mut self.0 {
            None => 1.0,
            Some(rng) => rng.random_range(-1.0..=1.0),
        }
    }
}

fn subgradient_with(
    c: &[f64],
    d: &[f64],
    t: f64,
    u: &Point,
    tie_tol: f64,
    draws: &mut TieDraws,
) -> (Vec<f64>, Vec<f64>) {
    let v = c
        .iter()
        .zip(&u.x)
        .map(|(&ci, &xi)| {
            let z = if (xi - 0.5).abs() <= tie_tol {
                draws.next()
            } else if xi > 0.5 {
                1.0
            } else {
                -1.0
            };
            -ci + t * z
        })
        .collect();
    (v, d.iter().map(|di| -di).collect())
}

/// Runs DCA on `(P_t)` over `state` starting from `u0`.
///
/// Stops when the relative objective change is at most `eps1` or the relative
/// step is at most `eps2`, and returns the last LP solution.
pub fn dca_solve(
    state: &PolyState<'_>,
    u0: &Point,
    opts: &DcaOptions,
) -> Result<DcaResult, DcaError> {
    dca_solve_from(state, u0, opts, None)
}

/// [`dca_solve`] with the first LP restarted from `start`, a basic solution
/// of any earlier LP over the same `state` (the relaxation, say). An unusable
/// `start` only costs a cold solve.
pub fn dca_solve_from(
    state: &PolyState<'_>,
    u0: &Point,
    opts: &DcaOptions,
    start: Option<&LpSolution>,
) -> Result<DcaResult, DcaError> {
    let inst = state.base();
    if u0.x.len() != inst.n() || u0.y.len() != inst.q() {
        return Err(DcaError::Dimension {
            expected: inst.dim(),
            found: u0.x.len() + u0.y.len(),
        });
    }
    let zeros_c = alloc::vec![0.0; inst.n()];
    let zeros_d = alloc::vec![0.0; inst.q()];
    let (c, d) = if opts.penalty_only {
        (&zeros_c[..], &zeros_d[..])
    } else {
        (inst.c(), inst.d())
    };
    let tau = |u: &Point| {
        let f: f64 = c.iter().zip(&u.x).map(|(a, b)| a * b).sum::<f64>()
            + d.iter().zip(&u.y).map(|(a, b)| a * b).sum::<f64>();
        f + opts.t * penalty_p(u)
    };

    let mut draws = TieDraws::new(opts.tie_rule);
    let mut iterates = alloc::vec![u0.clone()];
    let mut u = u0.clone();
    let mut tau_u = tau(&u);

    // Only the objective changes between steps, so each step restarts from
    // the previous optimal basis, which stays primal feasible.
    let mut lp = state.linear_program(alloc::vec![0.0; inst.dim()]);
    let mut previous: Option<LpSolution> = start.cloned();
    for k in 1..=opts.max_iter {
        let (v, w) = subgradient_with(c, d, opts.t, &u, opts.tie_tol, &mut draws);
        // min -(v, w)'u over K^k
        lp.set_objective(v.iter().chain(&w).map(|g| -g).collect());
        let warm = match &previous {
            Some(p) => solve_lp_from(&lp, p, &SimplexOptions::default())?,
            None => None,
        };
        let outcome = match warm {
            Some(outcome) => outcome,
            None => solve_lp(&lp)?,
        };
        let sol = match outcome {
            LpOutcome::Optimal(sol) => sol,
            LpOutcome::Infeasible => return Err(DcaError::Infeasible),
            LpOutcome::Unbounded => return Err(DcaError::Unbounded),
        };
        let next = Point::from_stacked(inst.n(), &sol.x);
        let tau_next = tau(&next);
        let d_tau = (tau_next - tau_u).abs() / (tau_next.abs() + 1.0);
        let step = next.distance(&u);
        let d_x = step / (next.norm() + 1.0);
        iterates.push(next.clone());
        if d_tau <= opts.eps1 || d_x <= opts.eps2 {
            let stationary = step <= 1e-9 * (1.0 + next.norm());
            return Ok(finish(state, next, tau_next, k, stationary, iterates, opts));
        }
        u = next;
        tau_u = tau_next;
        previous = Some(sol);
    }
    Err(DcaError::MaxIterations(opts.max_iter))
}

fn finish(
    state: &PolyState<'_>,
    point: Point,
    tau_value: f64,
    iterations: usize,
    stationary: bool,
    iterates: Vec<Point>,
    opts: &DcaOptions,
) -> DcaResult {
    let inst = state.base();
    let feasible = state.is_in_s(&point, &Tolerances::default());
    let certified_local_min = point.x.iter().all(|&v| (v - 0.5).abs() > opts.tie_tol);
    DcaResult {
        plain_value: inst.evaluate_f(&point),
        value: if opts.penalty_only {
            tau_value
        } else {
            penalized_objective(inst, opts.t, &point)
        },
        point,
        iterations,
        certified_local_min,
        feasible,
        stationary,
        iterates,
    }
}

/// Local-minimizer certificate: every `x*_i` is farther than `tie_tol` from `1/2`.
pub fn certify_local_min(result: &DcaResult, tie_tol: f64) -> bool {
    result.point.x.iter().all(|&v| (v - 0.5).abs() > tie_tol)
}
