//! Brute-force oracles used by tests and the acceptance suite.
//!
//! None of this is on the solver's hot path. Vertex enumeration tries every
//! choice of `n + q` active constraints, so it is only meant for tiny
//! polytopes; by default it runs in exact rational arithmetic, converting each
//! `f64` input through its shortest decimal representation, so the penalty
//! thresholds of small hand examples come out as exact fractions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cutgen::{eval_l, Cut};
use crate::dca::penalty_p;
use crate::instance::{MblpInstance, Point, PolyState};
use crate::linalg;
use crate::simplex::{solve_lp, LinearProgram, LpOutcome, SimplexError};

pub const DEFAULT_SIZE_GUARD: usize = 16;
pub const DEFAULT_BRUTE_FORCE_GUARD: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("problem size {size} exceeds the oracle guard {guard}")]
    SizeGuard { size: usize, guard: usize },
    #[error("oracle LP failed: {0}")]
    Lp(#[from] SimplexError),
    #[error("the instance has no mixed-binary feasible point")]
    Infeasible,
    #[error("the polytope has no vertices")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    /// Plain `f64` with `1e-9` tolerances; much faster.
    Float,
}

/// `V(K^k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    pub vertices: Vec<Point>,
    /// Exact coordinates (stacked), parallel to `vertices`, when enumerated
    /// with [`Arithmetic::Exact`].
    pub exact: Option<Vec<Vec<BigRational>>>,
    pub n: usize,
    pub q: usize,
    /// Number of constraints in the system that was enumerated.
    pub constraints: usize,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True if some vertex lies within `tol` (max-norm) of `u`.
    pub fn contains(&self, u: &Point, tol: f64) -> bool {
        self.vertices.iter().any(|v| {
            v.coords()
                .zip(u.coords())
                .all(|(a, b)| (a - b).abs() <= tol)
        })
    }
}

/// Shortest-decimal conversion: `0.1` becomes `1/10`, not the binary value.
pub fn to_rational(v: f64) -> BigRational {
    let s = format!("{}", v);
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.as_str()),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let numer: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .unwrap_or_else(|_| BigInt::zero());
    let denom = num_traits::pow(BigInt::from(10u8), frac_part.len());
    let r = BigRational::new(numer, denom);
    if neg {
        -r
    } else {
        r
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// All vertices of `K^k`, refusing when `n + q > size_guard`.
pub fn enumerate_vertices(
    state: &PolyState<'_>,
    size_guard: usize,
) -> Result<VertexSet, VerifyError> {
    enumerate_vertices_with(state, size_guard, Arithmetic::Exact)
}

pub fn enumerate_vertices_with(
    state: &PolyState<'_>,
    size_guard: usize,
    arith: Arithmetic,
) -> Result<VertexSet, VerifyError> {
    let inst = state.base();
    let dim = inst.dim();
    if dim > size_guard {
        return Err(VerifyError::SizeGuard {
            size: dim,
            guard: size_guard,
        });
    }
    let (g, h) = state.geq_system();
    let mut vs = VertexSet {
        vertices: Vec::new(),
        exact: None,
        n: inst.n(),
        q: inst.q(),
        constraints: g.len(),
    };
    match arith {
        Arithmetic::Exact => {
            let gq: Vec<Vec<BigRational>> = g
                .iter()
                .map(|r| r.iter().map(|&v| to_rational(v)).collect())
                .collect();
            let hq: Vec<BigRational> = h.iter().map(|&v| to_rational(v)).collect();
            let mut found: Vec<Vec<BigRational>> = Vec::new();
            for_each_subset(g.len(), dim, |rows| {
                let a: Vec<BigRational> =
                    rows.iter().flat_map(|&r| gq[r].iter().cloned()).collect();
                let b: Vec<BigRational> = rows.iter().map(|&r| hq[r].clone()).collect();
                let Some(u) = linalg::solve(&a, &b, dim) else {
                    return;
                };
                let feasible = gq.iter().zip(&hq).all(|(row, rhs)| {
                    let lhs = row
                        .iter()
                        .zip(&u)
                        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y);
                    lhs >= *rhs
                });
                if feasible && !found.contains(&u) {
                    found.push(u);
                }
            });
            vs.vertices = found
                .iter()
                .map(|u| Point::from_stacked(inst.n(), &u.iter().map(to_f64).collect::<Vec<_>>()))
                .collect();
            vs.exact = Some(found);
        }
        Arithmetic::Float => {
            let mut found: Vec<Point> = Vec::new();
            for_each_subset(g.len(), dim, |rows| {
                let a: Vec<f64> = rows.iter().flat_map(|&r| g[r].iter().copied()).collect();
                let b: Vec<f64> = rows.iter().map(|&r| h[r]).collect();
                let Some(u) = linalg::solve(&a, &b, dim) else {
                    return;
                };
                let feasible = g.iter().zip(&h).all(|(row, rhs)| {
                    let lhs: f64 = row.iter().zip(&u).map(|(x, y)| x * y).sum();
                    lhs >= rhs - 1e-9 * (1.0 + rhs.abs())
                });
                if feasible {
                    let p = Point::from_stacked(inst.n(), &u);
                    if !found.iter().any(|v| {
                        v.coords()
                            .zip(p.coords())
                            .all(|(a, b)| (a - b).abs() <= 1e-7)
                    }) {
                        found.push(p);
                    }
                }
            });
            vs.vertices = found;
        }
    }
    Ok(vs)
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BruteForce {
    Infeasible,
    Optimal { value: f64, point: Point },
}

impl BruteForce {
    pub fn value(&self) -> Option<f64> {
        match self {
            BruteForce::Optimal { value, .. } => Some(*value),
            BruteForce::Infeasible => None,
        }
    }
}

/// Global optimum of `inst` by enumerating every binary `x` (with an LP in `y`
/// per `x` when `q > 0`), refusing when `n > DEFAULT_BRUTE_FORCE_GUARD`.
pub fn brute_force_solve(inst: &MblpInstance) -> Result<BruteForce, VerifyError> {
    brute_force_solve_guarded(inst, DEFAULT_BRUTE_FORCE_GUARD)
}

pub fn brute_force_solve_guarded(
    inst: &MblpInstance,
    guard: usize,
) -> Result<BruteForce, VerifyError> {
    let n = inst.n();
    if n > guard {
        return Err(VerifyError::SizeGuard { size: n, guard });
    }
    if inst.q() == 0 {
        return Ok(gray_code_sweep(inst));
    }
    let mut best: Option<(f64, Point)> = None;
    for bits in 0u64..(1u64 << n) {
        let x: Vec<f64> = (0..n).map(|i| ((bits >> i) & 1) as f64).collect();
        if let Some((value, point)) = best_y(inst, &x, &[], None)? {
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, point));
            }
        }
    }
    Ok(match best {
        Some((value, point)) => BruteForce::Optimal { value, point },
        None => BruteForce::Infeasible,
    })
}

fn feas_slack(b: f64) -> f64 {
    1e-9 * (1.0 + b.abs())
}

/// Pure-binary sweep in Gray-code order: one column update per step, with
/// activities recomputed from scratch at the start of every block of 2^16
/// steps to stop rounding drift.
fn gray_code_sweep(inst: &MblpInstance) -> BruteForce {
    let n = inst.n();
    let m = inst.m();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m).map(|i| inst.a_row(i)[j]).collect())
        .collect();
    let c = inst.c();
    let b = inst.b();
    let tol: Vec<f64> = b.iter().map(|&v| feas_slack(v)).collect();
    let mut x = vec![0.0; n];
    let mut act = vec![0.0; m];
    let mut obj = 0.0;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let total: u64 = 1u64 << n;
    for step in 0..total {
        if step > 0 {
            let j = step.trailing_zeros() as usize;
            let delta = if x[j] == 0.0 { 1.0 } else { -1.0 };
            x[j] += delta;
            obj += delta * c[j];
            for (a, col) in act.iter_mut().zip(&cols[j]) {
                *a += delta * col;
            }
            if step & 0xFFFF == 0 {
                obj = crate::instance::dot(c, &x);
                for (i, a) in act.iter_mut().enumerate() {
                    *a = crate::instance::dot(inst.a_row(i), &x);
                }
            }
        }
        if act.iter().zip(b).zip(&tol).all(|((a, bi), t)| *a <= bi + t)
            && best.as_ref().is_none_or(|(v, _)| obj < *v)
        {
            // Recompute exactly for the record.
            obj = crate::instance::dot(c, &x);
            best = Some((obj, x.clone()));
        }
    }
    match best {
        Some((value, x)) => BruteForce::Optimal {
            value,
            point: Point::from_x(x),
        },
        None => BruteForce::Infeasible,
    }
}

/// Feasible-`y` LP for fixed binary `x`. `extra` adds `g'u >= h` rows (cuts);
/// `cap` adds `f(x, y) <= cap`. Returns `None` when the slice is empty.
fn best_y(
    inst: &MblpInstance,
    x: &[f64],
    extra: &[Cut],
    cap: Option<f64>,
) -> Result<Option<(f64, Point)>, VerifyError> {
    y_lp(inst, x, extra, cap, inst.d().to_vec())
}

/// Best feasible completion `(x, y)` of a binary `x` over the original `K`,
/// or `None` if no `y` fits.
pub fn best_completion(
    inst: &MblpInstance,
    x: &[f64],
) -> Result<Option<(f64, Point)>, VerifyError> {
    if inst.q() == 0 {
        let u = Point::from_x(x.to_vec());
        let ok = PolyState::new(inst).is_in_k(&u, 1e-9);
        return Ok(ok.then(|| (inst.evaluate_f(&u), u)));
    }
    best_y(inst, x, &[], None)
}

fn y_lp(
    inst: &MblpInstance,
    x: &[f64],
    extra: &[Cut],
    cap: Option<f64>,
    objective: Vec<f64>,
) -> Result<Option<(f64, Point)>, VerifyError> {
    let n = inst.n();
    let mut lp = LinearProgram::new(objective);
    for i in 0..inst.m() {
        let r = inst.b()[i] - crate::instance::dot(inst.a_row(i), x);
        lp.add_row(inst.b_row(i), r + feas_slack(inst.b()[i]));
    }
    for cut in extra {
        let r = cut.rhs - crate::instance::dot(&cut.coeffs[..n], x);
        let neg: Vec<f64> = cut.coeffs[n..].iter().map(|v| -v).collect();
        lp.add_row(&neg, -r + feas_slack(cut.rhs));
    }
    if let Some(cap) = cap {
        let r = cap - crate::instance::dot(inst.c(), x);
        lp.add_row(inst.d(), r);
    }
    for (j, &hi) in inst.ybar().iter().enumerate() {
        lp.set_bounds(j, 0.0, hi);
    }
    Ok(match solve_lp(&lp)? {
        LpOutcome::Optimal(sol) => {
            let p = Point::new(x.to_vec(), sol.x);
            Some((inst.evaluate_f(&p), p))
        }
        _ => None,
    })
}

/// Intermediate values of the exact-penalty threshold
/// `t0 = (min_S f - alpha0) / m`.
#[derive(Debug, Clone, PartialEq)]
pub struct T0Breakdown {
    /// `min f` over `K`.
    pub alpha0: f64,
    /// `min f` over `S`.
    pub min_s_f: f64,
    /// Smallest positive penalty over the vertices; `None` means `+inf`.
    pub m: Option<f64>,
    pub t0: f64,
    /// `t0` as an exact fraction, when the vertices were enumerated exactly.
    pub t0_exact: Option<BigRational>,
}

/// Intermediate values of `t1 = M / sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct T1Breakdown {
    /// `max_V f - min_{V \ S} f`.
    pub big_m: Option<f64>,
    pub sigma: Option<f64>,
    pub t1: f64,
    pub t1_exact: Option<BigRational>,
    /// Set when `V \ S` is empty or `sigma` is undefined; `t1` is then 0.
    pub degenerate: bool,
}

fn rational_cost(inst: &MblpInstance) -> Vec<BigRational> {
    inst.cost().iter().map(|&v| to_rational(v)).collect()
}

fn rational_dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

fn rational_penalty(u: &[BigRational], n: usize) -> BigRational {
    let one = BigRational::one();
    u[..n].iter().fold(BigRational::zero(), |acc, x| {
        let other = &one - x;
        acc + if *x < other { x.clone() } else { other }
    })
}

fn rational_l(anchor: &[BigRational], u: &[BigRational], n: usize) -> BigRational {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let one = BigRational::one();
    (0..n).fold(BigRational::zero(), |acc, i| {
        if anchor[i] <= half {
            acc + &u[i]
        } else {
            acc + (&one - &u[i])
        }
    })
}

fn is_binary_exact(u: &[BigRational], n: usize) -> bool {
    u[..n].iter().all(|x| x.is_zero() || x.is_one())
}

/// `t0` from the vertex set. The minimum of `f` over `S` is taken over the
/// vertices with binary `x`: fixing a binary `x` selects a face of `K`, so
/// some optimum of `S` is always a vertex.
pub fn compute_t0(inst: &MblpInstance, vs: &VertexSet) -> Result<T0Breakdown, VerifyError> {
    if vs.is_empty() {
        return Err(VerifyError::Empty);
    }
    let n = inst.n();
    if let Some(exact) = &vs.exact {
        let cost = rational_cost(inst);
        let f: Vec<BigRational> = exact.iter().map(|u| rational_dot(&cost, u)).collect();
        let alpha0 = f.iter().min().unwrap().clone();
        let min_s = exact
            .iter()
            .zip(&f)
            .filter(|(u, _)| is_binary_exact(u, n))
            .map(|(_, v)| v.clone())
            .min()
            .ok_or(VerifyError::Infeasible)?;
        let m = exact
            .iter()
            .map(|u| rational_penalty(u, n))
            .filter(|p| p.is_positive())
            .min();
        let t0 = match &m {
            Some(m) => (&min_s - &alpha0) / m,
            None => BigRational::zero(),
        };
        return Ok(T0Breakdown {
            alpha0: to_f64(&alpha0),
            min_s_f: to_f64(&min_s),
            m: m.as_ref().map(to_f64),
            t0: to_f64(&t0),
            t0_exact: Some(t0),
        });
    }
    let f: Vec<f64> = vs.vertices.iter().map(|u| inst.evaluate_f(u)).collect();
    let alpha0 = f.iter().copied().fold(f64::INFINITY, f64::min);
    let min_s = vs
        .vertices
        .iter()
        .zip(&f)
        .filter(|(u, _)| u.is_integral(1e-9))
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    if min_s == f64::INFINITY {
        return Err(VerifyError::Infeasible);
    }
    let m = vs
        .vertices
        .iter()
        .map(penalty_p)
        .filter(|p| *p > 1e-9)
        .fold(f64::INFINITY, f64::min);
    let m = (m < f64::INFINITY).then_some(m);
    Ok(T0Breakdown {
        alpha0,
        min_s_f: min_s,
        m,
        t0: m.map_or(0.0, |m| (min_s - alpha0) / m),
        t0_exact: None,
    })
}

/// `t1 = M / sigma` from the vertex set.
pub fn compute_t1(inst: &MblpInstance, vs: &VertexSet) -> Result<T1Breakdown, VerifyError> {
    if vs.is_empty() {
        return Err(VerifyError::Empty);
    }
    let n = inst.n();
    let degenerate = T1Breakdown {
        big_m: None,
        sigma: None,
        t1: 0.0,
        t1_exact: None,
        degenerate: true,
    };
    if let Some(exact) = &vs.exact {
        let cost = rational_cost(inst);
        let f: Vec<BigRational> = exact.iter().map(|u| rational_dot(&cost, u)).collect();
        let outside: Vec<usize> = (0..exact.len())
            .filter(|&i| !is_binary_exact(&exact[i], n))
            .collect();
        if outside.is_empty() {
            return Ok(degenerate);
        }
        let max_f = f.iter().max().unwrap().clone();
        let min_out = outside.iter().map(|&i| f[i].clone()).min().unwrap();
        let big_m = max_f - min_out;
        let mut sigma: Option<BigRational> = None;
        for &w in &outside {
            let lw = rational_l(&exact[w], &exact[w], n);
            for v in exact {
                let d = &lw - rational_l(&exact[w], v, n);
                if d.is_positive() && sigma.as_ref().is_none_or(|s| d < *s) {
                    sigma = Some(d);
                }
            }
        }
        let Some(sigma) = sigma else {
            return Ok(T1Breakdown {
                big_m: Some(to_f64(&big_m)),
                ..degenerate
            });
        };
        let t1 = &big_m / &sigma;
        return Ok(T1Breakdown {
            big_m: Some(to_f64(&big_m)),
            sigma: Some(to_f64(&sigma)),
            t1: to_f64(&t1),
            t1_exact: Some(t1),
            degenerate: false,
        });
    }
    let f: Vec<f64> = vs.vertices.iter().map(|u| inst.evaluate_f(u)).collect();
    let outside: Vec<usize> = (0..vs.len())
        .filter(|&i| !vs.vertices[i].is_integral(1e-9))
        .collect();
    if outside.is_empty() {
        return Ok(degenerate);
    }
    let max_f = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_out = outside.iter().map(|&i| f[i]).fold(f64::INFINITY, f64::min);
    let big_m = max_f - min_out;
    let mut sigma = f64::INFINITY;
    for &w in &outside {
        let anchor = &vs.vertices[w];
        let lw = eval_l(anchor, anchor);
        for v in &vs.vertices {
            let d = lw - eval_l(anchor, v);
            if d > 1e-9 {
                sigma = sigma.min(d);
            }
        }
    }
    if sigma == f64::INFINITY {
        return Ok(T1Breakdown {
            big_m: Some(big_m),
            ..degenerate
        });
    }
    Ok(T1Breakdown {
        big_m: Some(big_m),
        sigma: Some(sigma),
        t1: big_m / sigma,
        t1_exact: None,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuditMode {
    /// Every point of `S^k`.
    Global,
    /// Only points of `S^k` with `f < value`.
    BetterThan(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Valid,
    Counterexample(Point),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Audits `cut` against the mixed-binary points of `state` (pass `K^0` for the
/// original instance). A point counts as violating when its slack is below
/// `-tol`.
pub fn audit_cut(
    state: &PolyState<'_>,
    cut: &Cut,
    mode: AuditMode,
    tol: f64,
) -> Result<Verdict, VerifyError> {
    let inst = state.base();
    let n = inst.n();
    check_guard(n)?;
    let cap = cap_of(mode);
    for bits in 0u64..(1u64 << n) {
        let x = binary_x(bits, n);
        if let Some(u) = violation_at(state, &x, cut, cap, tol)? {
            return Ok(Verdict::Counterexample(u));
        }
    }
    Ok(Verdict::Valid)
}

/// Audits every cut of a solve at once. Each cut is checked against the
/// region it was generated on: the base instance plus the cuts from earlier
/// iterations. Cheaper than repeated [`audit_cut`] calls because the binary
/// sweep and the test for an empty original `y`-slice are shared.
pub fn audit_run(
    inst: &MblpInstance,
    cuts: &[Cut],
    modes: &[AuditMode],
    tol: f64,
) -> Result<Vec<Verdict>, VerifyError> {
    let n = inst.n();
    check_guard(n)?;
    assert_eq!(cuts.len(), modes.len(), "one mode per cut");
    let mut order: Vec<usize> = (0..cuts.len()).collect();
    order.sort_by_key(|&i| cuts[i].iteration);
    let sorted: Vec<Cut> = order.iter().map(|&i| cuts[i].clone()).collect();
    let states: Vec<PolyState<'_>> = cuts
        .iter()
        .map(|cut| {
            let before = sorted.partition_point(|c| c.iteration < cut.iteration);
            PolyState::with_cuts(inst, sorted[..before].to_vec(), cut.iteration)
        })
        .collect();
    let base = PolyState::new(inst);
    let mut verdicts = vec![Verdict::Valid; cuts.len()];
    for bits in 0u64..(1u64 << n) {
        let x = binary_x(bits, n);
        // Nothing to check where the original slice is already empty.
        let feasible = if inst.q() == 0 {
            base.is_in_k(&Point::from_x(x.clone()), 1e-9)
        } else {
            best_y(inst, &x, &[], None)?.is_some()
        };
        if !feasible {
            continue;
        }
        for (i, cut) in cuts.iter().enumerate() {
            if !verdicts[i].is_valid() {
                continue;
            }
            if let Some(u) = violation_at(&states[i], &x, cut, cap_of(modes[i]), tol)? {
                verdicts[i] = Verdict::Counterexample(u);
            }
        }
    }
    Ok(verdicts)
}

fn check_guard(n: usize) -> Result<(), VerifyError> {
    if n > DEFAULT_BRUTE_FORCE_GUARD {
        return Err(VerifyError::SizeGuard {
            size: n,
            guard: DEFAULT_BRUTE_FORCE_GUARD,
        });
    }
    Ok(())
}

fn binary_x(bits: u64, n: usize) -> Vec<f64> {
    (0..n).map(|i| ((bits >> i) & 1) as f64).collect()
}

/// Relative margin for "strictly better" in [`AuditMode::BetterThan`]. It must
/// clear the LP feasibility tolerance on the objective-cap row (about
/// `1e-8 (1 + |v|)`), or points tying the incumbent slip through as better.
const BETTER_MARGIN: f64 = 1e-6;

fn cap_of(mode: AuditMode) -> Option<f64> {
    match mode {
        AuditMode::Global => None,
        AuditMode::BetterThan(v) => Some(v - BETTER_MARGIN * (1.0 + v.abs())),
    }
}

/// A point of `state` with binary part `x` (and `f <= cap`) that violates
/// `cut`, if one exists.
fn violation_at(
    state: &PolyState<'_>,
    x: &[f64],
    cut: &Cut,
    cap: Option<f64>,
    tol: f64,
) -> Result<Option<Point>, VerifyError> {
    let inst = state.base();
    let n = inst.n();
    if inst.q() == 0 {
        let u = Point::from_x(x.to_vec());
        let better = cap.is_none_or(|c| inst.evaluate_f(&u) <= c);
        let bad = better && cut.slack(&u) < -tol && state.is_in_k(&u, 1e-9);
        return Ok(bad.then_some(u));
    }
    // If the cut holds for every y in the box, no LP is needed.
    let box_min: f64 = cut.coeffs[n..]
        .iter()
        .zip(inst.ybar())
        .map(|(a, hi)| (a * hi).min(0.0))
        .sum();
    if crate::instance::dot(&cut.coeffs[..n], x) + box_min - cut.rhs >= -tol {
        return Ok(None);
    }
    // Minimize the cut's y-part over the feasible y-slice.
    let obj = cut.coeffs[n..].to_vec();
    Ok(y_lp(inst, x, state.cuts(), cap, obj)?
        .map(|(_, u)| u)
        .filter(|u| cut.slack(u) < -tol))
}

/// Shape of randomly generated test instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusParams {
    pub max_n: usize,
    pub max_q: usize,
    pub max_m: usize,
    /// Coefficients of `c, d, A, B` are integers in `[-coef, coef]`.
    pub coef: i32,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            max_n: 12,
            max_q: 4,
            max_m: 10,
            coef: 10,
        }
    }
}

/// Random instance with integer data, reproducible from `seed`.
///
/// Right-hand sides are drawn around the activity of a random binary point so
/// most instances are feasible while a few are not.
pub fn random_instance(seed: u64, params: &CorpusParams) -> MblpInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=params.max_n);
    let q = rng.random_range(0..=params.max_q);
    let m = rng.random_range(1..=params.max_m);
    let k = params.coef;
    let int = |rng: &mut ChaCha8Rng| rng.random_range(-k..=k) as f64;
    let c: Vec<f64> = (0..n).map(|_| int(&mut rng)).collect();
    let d: Vec<f64> = (0..q).map(|_| int(&mut rng)).collect();
    let ybar: Vec<f64> = (0..q).map(|_| rng.random_range(1..=5) as f64).collect();
    let anchor: Vec<f64> = (0..n).map(|_| rng.random_range(0..=1) as f64).collect();
    let mut a_rows = Vec::with_capacity(m);
    let mut b_rows = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for _ in 0..m {
        let a: Vec<f64> = (0..n).map(|_| int(&mut rng)).collect();
        let bb: Vec<f64> = (0..q).map(|_| int(&mut rng)).collect();
        let act = crate::instance::dot(&a, &anchor);
        b.push(act + rng.random_range(-3..=k) as f64);
        a_rows.push(a);
        b_rows.push(bb);
    }
    MblpInstance::new(c, d, a_rows, b_rows, b, ybar).expect("generated dimensions are consistent")
}
