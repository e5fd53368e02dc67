//! Two-phase bounded-variable primal simplex.
//!
//! Every LP in the crate goes through [`solve_lp`]: relaxations, DCA
//! subproblems, and the cut-generation LP. Optimal answers are always basic
//! feasible solutions, so relaxation and DCA iterates land on vertices of
//! `K^k`, which the cut theory relies on.
//!
//! The kernel is dense. The basis inverse is kept explicitly, updated with a
//! rank-one product-form step per pivot, and recomputed from scratch every
//! [`SimplexOptions::refactor_interval`] pivots. Pricing is Dantzig's rule
//! and the ratio test is Harris's two-pass test, preferring large pivots.
//! After [`SimplexOptions::bland_threshold`] consecutive pivots that leave the
//! objective (numerically) unchanged, both choices fall back to smallest-index
//! rules until the objective moves again.
//!
//! [`solve_lp_from`] restarts phase 2 from a known basis; callers that perturb
//! a degenerate LP use it to clean up against the original right-hand sides.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplexError {
    #[error("malformed linear program: {0}")]
    Malformed(&'static str),
    #[error("iteration limit of {0} pivots exceeded")]
    IterationLimit(usize),
    #[error("basis matrix became singular during refactorization")]
    SingularBasis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    /// Smallest `|alpha_i|` accepted as a pivot element.
    pub pivot_tol: f64,
    /// Consecutive degenerate pivots before Bland's rule kicks in.
    pub bland_threshold: usize,
    pub refactor_interval: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50_000,
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            pivot_tol: 1e-9,
            bland_threshold: 50,
            refactor_interval: 100,
        }
    }
}

/// `min objective'x  s.t.  rows x (<= | =) rhs,  lower <= x <= upper`.
///
/// Lower bounds must be finite; upper bounds may be `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    /// Row-major, `rhs.len()` rows of `objective.len()` entries.
    rows: Vec<f64>,
    rhs: Vec<f64>,
    equality: Vec<bool>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    /// New LP with no rows and every variable in `[0, +inf)`.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
            equality: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    /// Adds `coeffs'x <= rhs`.
    pub fn add_row(&mut self, coeffs: &[f64], rhs: f64) {
        self.push_row(coeffs, rhs, false);
    }

    /// Adds `coeffs'x = rhs`.
    pub fn add_equality(&mut self, coeffs: &[f64], rhs: f64) {
        self.push_row(coeffs, rhs, true);
    }

    fn push_row(&mut self, coeffs: &[f64], rhs: f64, eq: bool) {
        assert_eq!(
            coeffs.len(),
            self.objective.len(),
            "row length must match variable count"
        );
        self.rows.extend_from_slice(coeffs);
        self.rhs.push(rhs);
        self.equality.push(eq);
    }

    pub fn set_rhs(&mut self, i: usize, rhs: f64) {
        self.rhs[i] = rhs;
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn set_objective(&mut self, objective: Vec<f64>) {
        assert_eq!(objective.len(), self.objective.len());
        self.objective = objective;
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }
    pub fn objective(&self) -> &[f64] {
        &self.objective
    }
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.num_vars();
        &self.rows[i * n..(i + 1) * n]
    }
    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }
    pub fn is_equality(&self, i: usize) -> bool {
        self.equality[i]
    }
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of a row or bound at `x` (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        for i in 0..self.num_rows() {
            let act: f64 = self.row(i).iter().zip(x).map(|(a, v)| a * v).sum();
            let viol = if self.equality[i] {
                (act - self.rhs[i]).abs()
            } else {
                act - self.rhs[i]
            };
            worst = worst.max(viol);
        }
        worst
    }

    fn validate(&self) -> Result<(), SimplexError> {
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(SimplexError::Malformed("non-finite objective coefficient"));
        }
        if self.rows.iter().chain(&self.rhs).any(|v| !v.is_finite()) {
            return Err(SimplexError::Malformed("non-finite row coefficient or rhs"));
        }
        for (lo, hi) in self.lower.iter().zip(&self.upper) {
            if !lo.is_finite() {
                return Err(SimplexError::Malformed("lower bounds must be finite"));
            }
            if hi.is_nan() || *hi < *lo {
                return Err(SimplexError::Malformed("upper bound below lower bound"));
            }
        }
        Ok(())
    }
}

/// Optimal basic solution.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Basic column per row. Columns `< num_vars` are structural, the next
    /// `num_rows` are row slacks. A phase-1 artificial left in the basis is
    /// reported as its row's slack, so the list may repeat a slack.
    pub basis: Vec<usize>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible)
    }
}

/// Solves `lp` with default options.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome, SimplexError> {
    solve_lp_with(lp, &SimplexOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpOutcome, SimplexError> {
    lp.validate()?;
    let mut solver = Solver::new(lp, opts);
    if !solver.phase_one()? {
        return Ok(LpOutcome::Infeasible);
    }
    match solver.phase_two(lp)? {
        Phase::Optimal => Ok(LpOutcome::Optimal(solver.solution(lp))),
        Phase::Unbounded => Ok(LpOutcome::Unbounded),
    }
}

/// Restarts from the basis of `start`, an optimal solution of a nearby LP
/// with the same columns: another objective, or extra rows appended after
/// the ones `start` had (their slacks join the basis). A nonbasic structural
/// column starts at whichever bound `start.x` is closer to.
///
/// A primal feasible start goes straight to phase 2. A dual feasible one
/// (same objective, new rows cutting the old optimum off) first runs the
/// dual simplex back to primal feasibility. Returns `Ok(None)` when the start
/// is neither, its basis is singular, or the dual simplex gives up; the
/// caller then solves from scratch.
pub fn solve_lp_from(
    lp: &LinearProgram,
    start: &LpSolution,
    opts: &SimplexOptions,
) -> Result<Option<LpOutcome>, SimplexError> {
    lp.validate()?;
    let (n, m) = (lp.num_vars(), lp.num_rows());
    let old_m = start.basis.len();
    if start.x.len() != n || old_m > m {
        return Ok(None);
    }
    let mut basis = start.basis.clone();
    basis.extend((old_m..m).map(|i| n + i));
    let mut seen = vec![false; n + m];
    if basis
        .iter()
        .any(|&j| j >= n + m || core::mem::replace(&mut seen[j], true))
    {
        return Ok(None);
    }
    let mut solver = Solver::new(lp, opts);
    for j in 0..solver.columns.len() {
        if matches!(solver.columns[j], Column::Artificial { .. }) {
            solver.upper[j] = 0.0;
        }
        let at_upper = j < n && solver.upper[j].is_finite() && {
            let v = start.x[j];
            (v - solver.upper[j]).abs() < (v - solver.lower[j]).abs()
        };
        if at_upper {
            solver.value[j] = solver.upper[j];
            solver.status[j] = Status::AtUpper;
        } else {
            solver.value[j] = solver.lower[j];
            solver.status[j] = Status::AtLower;
        }
    }
    for (r, &j) in basis.iter().enumerate() {
        solver.status[j] = Status::Basic(r);
    }
    solver.basis = basis;
    match solver.refactor() {
        Ok(()) => {}
        Err(SimplexError::SingularBasis) => return Ok(None),
        Err(e) => return Err(e),
    }
    if solver.infeasible_row().is_some() {
        solver.set_costs(lp);
        if !solver.is_dual_feasible() {
            return Ok(None);
        }
        match solver.run_dual() {
            Ok(true) => {}
            Ok(false) | Err(SimplexError::SingularBasis) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    match solver.phase_two(lp) {
        Ok(Phase::Optimal) => Ok(Some(LpOutcome::Optimal(solver.solution(lp)))),
        Ok(Phase::Unbounded) => Ok(Some(LpOutcome::Unbounded)),
        Err(SimplexError::SingularBasis) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Column {
    Structural(usize),
    Slack(usize),
    Artificial { row: usize, sign: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Basic(usize),
    AtLower,
    AtUpper,
}

enum Phase {
    Optimal,
    Unbounded,
}

struct Solver<'o> {
    opts: &'o SimplexOptions,
    m: usize,
    /// Structural columns, column-major.
    a_cols: Vec<f64>,
    b: Vec<f64>,
    columns: Vec<Column>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    value: Vec<f64>,
    status: Vec<Status>,
    basis: Vec<usize>,
    /// m x m row-major.
    binv: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
}

impl<'o> Solver<'o> {
    fn new(lp: &LinearProgram, opts: &'o SimplexOptions) -> Self {
        let n = lp.num_vars();
        let m = lp.num_rows();
        let mut a_cols = vec![0.0; n * m];
        for i in 0..m {
            for (j, &v) in lp.row(i).iter().enumerate() {
                a_cols[j * m + i] = v;
            }
        }
        let mut columns: Vec<Column> = (0..n).map(Column::Structural).collect();
        columns.extend((0..m).map(Column::Slack));
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        for i in 0..m {
            lower.push(0.0);
            upper.push(if lp.equality[i] { 0.0 } else { f64::INFINITY });
        }
        let mut value: Vec<f64> = lower.clone();
        let mut status = vec![Status::AtLower; n + m];

        // Residual with every structural at its lower bound decides which
        // rows start on their slack and which need an artificial.
        let mut basis = Vec::with_capacity(m);
        let mut diag = Vec::with_capacity(m);
        for i in 0..m {
            let act: f64 = lp.row(i).iter().zip(&lp.lower).map(|(a, l)| a * l).sum();
            let r = lp.rhs[i] - act;
            if !lp.equality[i] && r >= 0.0 {
                basis.push(n + i);
                status[n + i] = Status::Basic(i);
                value[n + i] = r;
                diag.push(1.0);
            } else {
                let sign = if r >= 0.0 { 1.0 } else { -1.0 };
                let col = columns.len();
                columns.push(Column::Artificial { row: i, sign });
                lower.push(0.0);
                upper.push(f64::INFINITY);
                value.push(r.abs());
                status.push(Status::Basic(i));
                basis.push(col);
                diag.push(sign);
            }
        }
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0 / diag[i];
        }
        let cost = vec![0.0; columns.len()];
        Self {
            opts,
            m,
            a_cols,
            b: lp.rhs.clone(),
            columns,
            lower,
            upper,
            cost,
            value,
            status,
            basis,
            binv,
            iterations: 0,
            since_refactor: 0,
        }
    }

    /// Returns false when the LP is infeasible.
    fn phase_one(&mut self) -> Result<bool, SimplexError> {
        let mut any_artificial = false;
        for (j, col) in self.columns.iter().enumerate() {
            if matches!(col, Column::Artificial { .. }) {
                self.cost[j] = 1.0;
                any_artificial = true;
            }
        }
        if !any_artificial {
            return Ok(true);
        }
        match self.run()? {
            Phase::Optimal => {}
            // Phase 1 is bounded below by zero.
            Phase::Unbounded => return Ok(false),
        }
        // Each artificial must vanish relative to its own row's rhs.
        let infeasible = self
            .columns
            .iter()
            .zip(&self.value)
            .any(|(col, v)| match col {
                Column::Artificial { row, .. } => {
                    v.abs() > 10.0 * self.opts.feasibility_tol * (1.0 + self.b[*row].abs())
                }
                _ => false,
            });
        if infeasible {
            return Ok(false);
        }
        // Pin artificials at zero. Basic ones leave through degenerate pivots.
        for j in 0..self.columns.len() {
            if matches!(self.columns[j], Column::Artificial { .. }) {
                self.upper[j] = 0.0;
                if !matches!(self.status[j], Status::Basic(_)) {
                    self.value[j] = 0.0;
                    self.status[j] = Status::AtLower;
                }
            }
        }
        Ok(true)
    }

    fn phase_two(&mut self, lp: &LinearProgram) -> Result<Phase, SimplexError> {
        self.set_costs(lp);
        self.refactor()?;
        self.run()
    }

    fn set_costs(&mut self, lp: &LinearProgram) {
        for (j, col) in self.columns.iter().enumerate() {
            self.cost[j] = match col {
                Column::Structural(k) => lp.objective[*k],
                _ => 0.0,
            };
        }
    }

    /// The basic row whose value is farthest outside its bounds, with the
    /// bound it should move to.
    fn infeasible_row(&self) -> Option<(usize, f64)> {
        let tol = self.opts.feasibility_tol;
        let mut worst: Option<(usize, f64, f64)> = None;
        for (r, &j) in self.basis.iter().enumerate() {
            let (v, lo, hi) = (self.value[j], self.lower[j], self.upper[j]);
            let (excess, target) = if v < lo - tol * (1.0 + lo.abs()) {
                (lo - v, lo)
            } else if v > hi + tol * (1.0 + hi.abs()) {
                (v - hi, hi)
            } else {
                continue;
            };
            if worst.is_none_or(|(_, e, _)| excess > e) {
                worst = Some((r, excess, target));
            }
        }
        worst.map(|(r, _, target)| (r, target))
    }

    /// Reduced cost of nonbasic column `j` under duals `y`.
    fn reduced_cost(&self, y: &[f64], j: usize) -> f64 {
        self.cost[j] - self.column_dot(y, j)
    }

    /// True when no nonbasic column prices out by more than a loose
    /// tolerance; phase 2 mops up what the tolerance lets through.
    fn is_dual_feasible(&self) -> bool {
        let mut y = vec![0.0; self.m];
        self.duals(&mut y);
        let tol = 1e3 * self.opts.optimality_tol;
        (0..self.columns.len()).all(|j| {
            if self.lower[j] == self.upper[j] {
                return true;
            }
            match self.status[j] {
                Status::Basic(_) => true,
                Status::AtLower => self.reduced_cost(&y, j) >= -tol,
                Status::AtUpper => self.reduced_cost(&y, j) <= tol,
            }
        })
    }

    /// Dual simplex from a dual feasible basis until every basic value is
    /// within its bounds. Returns false when it gives up: no entering column
    /// (the LP is probably infeasible, which a cold solve should confirm) or
    /// too many pivots.
    fn run_dual(&mut self) -> Result<bool, SimplexError> {
        let m = self.m;
        let ncols = self.columns.len();
        let budget = self.iterations + 5 * (m + ncols);
        let mut y = vec![0.0; m];
        let mut rho = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        let mut ratio: Vec<(usize, f64, f64)> = Vec::new();
        loop {
            if self.since_refactor >= self.opts.refactor_interval {
                self.refactor()?;
            }
            let Some((r, target)) = self.infeasible_row() else {
                return Ok(true);
            };
            if self.iterations >= budget.min(self.opts.max_iterations) {
                return Ok(false);
            }
            self.iterations += 1;
            self.duals(&mut y);
            rho.copy_from_slice(&self.binv[r * m..(r + 1) * m]);
            let leaving = self.basis[r];
            let rise = self.value[leaving] < target;

            // Basic r moves by -a_j per unit increase of x_j. Candidates move
            // it toward `target` without breaking dual feasibility; Harris's
            // two passes then prefer the largest |a_j| among near-ties.
            ratio.clear();
            let tol = self.opts.optimality_tol;
            let mut bound = f64::INFINITY;
            for j in 0..ncols {
                let st = self.status[j];
                if matches!(st, Status::Basic(_)) || self.lower[j] == self.upper[j] {
                    continue;
                }
                let a = self.column_dot(&rho, j);
                if a.abs() <= self.opts.pivot_tol {
                    continue;
                }
                let up = matches!(st, Status::AtLower);
                if (up == rise) != (a < 0.0) {
                    continue;
                }
                let d = self.reduced_cost(&y, j);
                let slack = if up { d.max(0.0) } else { (-d).max(0.0) };
                bound = bound.min((slack + tol) / a.abs());
                ratio.push((j, slack, a.abs()));
            }
            let entering = ratio
                .iter()
                .filter(|(_, slack, a)| slack / a <= bound)
                .max_by(|x, y| x.2.total_cmp(&y.2))
                .map(|&(j, _, _)| j);
            let Some(q) = entering else {
                return Ok(false);
            };

            self.ftran(q, &mut alpha);
            if alpha[r].abs() <= self.opts.pivot_tol {
                return Ok(false);
            }
            let step = (self.value[leaving] - target) / alpha[r];
            for i in 0..m {
                let jb = self.basis[i];
                self.value[jb] -= alpha[i] * step;
            }
            self.value[q] += step;
            self.value[leaving] = target;
            self.status[leaving] = if rise {
                Status::AtLower
            } else {
                Status::AtUpper
            };
            self.basis[r] = q;
            self.status[q] = Status::Basic(r);
            self.update_inverse(r, &alpha);
        }
    }

    fn solution(&self, lp: &LinearProgram) -> LpSolution {
        let n = lp.num_vars();
        let x: Vec<f64> = (0..n)
            .map(|j| self.value[j].max(self.lower[j]).min(self.upper[j]))
            .collect();
        // A basic artificial sits at zero; its column is +-e_row, so the row's
        // slack can stand in for it. Warm starts only ever see real columns.
        let basis = self
            .basis
            .iter()
            .map(|&j| match self.columns[j] {
                Column::Artificial { row, .. } => n + row,
                _ => j,
            })
            .collect();
        LpSolution {
            value: lp.value_at(&x),
            x,
            basis,
            iterations: self.iterations,
        }
    }

    /// Writes column `j` as a dense vector.
    fn column(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match self.columns[j] {
            Column::Structural(k) => {
                out.copy_from_slice(&self.a_cols[k * self.m..(k + 1) * self.m])
            }
            Column::Slack(i) => out[i] = 1.0,
            Column::Artificial { row, sign } => out[row] = sign,
        }
    }

    fn column_dot(&self, y: &[f64], j: usize) -> f64 {
        match self.columns[j] {
            Column::Structural(k) => {
                let col = &self.a_cols[k * self.m..(k + 1) * self.m];
                col.iter().zip(y).map(|(a, b)| a * b).sum()
            }
            Column::Slack(i) => y[i],
            Column::Artificial { row, sign } => sign * y[row],
        }
    }

    /// `alpha = B^-1 a_j`.
    fn ftran(&self, j: usize, alpha: &mut [f64]) {
        let m = self.m;
        match self.columns[j] {
            Column::Slack(i) => {
                for r in 0..m {
                    alpha[r] = self.binv[r * m + i];
                }
            }
            Column::Artificial { row, sign } => {
                for r in 0..m {
                    alpha[r] = sign * self.binv[r * m + row];
                }
            }
            Column::Structural(k) => {
                let col = &self.a_cols[k * m..(k + 1) * m];
                for r in 0..m {
                    let row = &self.binv[r * m..(r + 1) * m];
                    alpha[r] = row.iter().zip(col).map(|(a, b)| a * b).sum();
                }
            }
        }
    }

    /// Rebuilds `B^-1` and recomputes basic values.
    ///
    /// Slack and artificial columns are signed unit vectors, and bases over
    /// many cut rows are mostly those. Ordering unit columns first and their
    /// rows first makes `B = [D E; 0 F]` with `D` diagonal, so only the small
    /// structural block `F` goes through Gauss-Jordan:
    /// `B^-1 = [D^-1, -D^-1 E F^-1; 0, F^-1]`.
    fn refactor(&mut self) -> Result<(), SimplexError> {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        // Unit columns: (basis position, row, sign). The rest are structural.
        let mut unit_of_row: Vec<Option<(usize, f64)>> = vec![None; m];
        let mut dense = Vec::new();
        for (r, &j) in self.basis.iter().enumerate() {
            let (row, sign) = match self.columns[j] {
                Column::Slack(i) => (i, 1.0),
                Column::Artificial { row, sign } => (row, sign),
                Column::Structural(_) => {
                    dense.push(r);
                    continue;
                }
            };
            if unit_of_row[row].replace((r, sign)).is_some() {
                return Err(SimplexError::SingularBasis);
            }
        }
        let core_rows: Vec<usize> = (0..m).filter(|&i| unit_of_row[i].is_none()).collect();
        let k = dense.len();
        if core_rows.len() != k {
            return Err(SimplexError::SingularBasis);
        }

        let mut col = vec![0.0; m];
        // cols[a] is the dense column of basis position dense[a].
        let cols: Vec<Vec<f64>> = dense
            .iter()
            .map(|&r| {
                self.column(self.basis[r], &mut col);
                col.clone()
            })
            .collect();
        let mut f = vec![0.0; k * k];
        for (a, c) in cols.iter().enumerate() {
            for (b, &i) in core_rows.iter().enumerate() {
                f[b * k + a] = c[i];
            }
        }
        let f_inv = if k == 0 {
            Vec::new()
        } else {
            crate::linalg::invert(&f, k).ok_or(SimplexError::SingularBasis)?
        };

        self.binv.iter_mut().for_each(|v| *v = 0.0);
        for (a, &r) in dense.iter().enumerate() {
            for (b, &i) in core_rows.iter().enumerate() {
                self.binv[r * m + i] = f_inv[a * k + b];
            }
        }
        for (row, unit) in unit_of_row.iter().enumerate() {
            let Some((r, sign)) = *unit else { continue };
            self.binv[r * m + row] = 1.0 / sign;
            for (b, &i) in core_rows.iter().enumerate() {
                let e: f64 = (0..k).map(|a| cols[a][row] * f_inv[a * k + b]).sum();
                self.binv[r * m + i] = -e / sign;
            }
        }

        // x_B = B^-1 (b - N x_N)
        let mut resid = self.b.clone();
        for j in 0..self.columns.len() {
            if matches!(self.status[j], Status::Basic(_)) {
                continue;
            }
            let v = self.value[j];
            if v == 0.0 {
                continue;
            }
            self.column(j, &mut col);
            for i in 0..m {
                resid[i] -= col[i] * v;
            }
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            self.value[self.basis[r]] = row.iter().zip(&resid).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }

    fn run(&mut self) -> Result<Phase, SimplexError> {
        let m = self.m;
        let ncols = self.columns.len();
        let mut y = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        let mut degenerate_streak = 0usize;
        let mut bland = false;
        let objective_scale = self.cost.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));

        loop {
            if self.since_refactor >= self.opts.refactor_interval {
                self.refactor()?;
            }

            self.duals(&mut y);

            // Pricing.
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..ncols {
                let st = self.status[j];
                if matches!(st, Status::Basic(_)) || self.lower[j] == self.upper[j] {
                    continue;
                }
                let d = self.cost[j] - self.column_dot(&y, j);
                let improving = match st {
                    Status::AtLower => d < -self.opts.optimality_tol,
                    Status::AtUpper => d > self.opts.optimality_tol,
                    Status::Basic(_) => false,
                };
                if !improving {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.is_none_or(|(_, best)| d.abs() > best.abs()) {
                    entering = Some((j, d));
                }
            }
            let Some((q, dq)) = entering else {
                return Ok(Phase::Optimal);
            };

            if self.iterations >= self.opts.max_iterations {
                return Err(SimplexError::IterationLimit(self.opts.max_iterations));
            }
            self.iterations += 1;

            let dir = if dq < 0.0 { 1.0 } else { -1.0 };
            self.ftran(q, &mut alpha);

            // Harris ratio test. Basic r moves by -dir * alpha_r per unit
            // step. Pass 1 bounds the step with every bound relaxed by the
            // feasibility tolerance; pass 2 picks, among rows whose exact
            // ratio fits under that bound, the largest pivot (or, under
            // Bland, the smallest basic index).
            let tol = self.opts.feasibility_tol;
            let room = |s: &Self, r: usize| -> Option<(f64, f64)> {
                let delta = -dir * alpha[r];
                if delta.abs() <= s.opts.pivot_tol {
                    return None;
                }
                let jb = s.basis[r];
                let slack = if delta < 0.0 {
                    s.value[jb] - s.lower[jb]
                } else if s.upper[jb].is_finite() {
                    s.upper[jb] - s.value[jb]
                } else {
                    return None;
                };
                Some((slack.max(0.0), delta.abs()))
            };
            let mut theta_max = f64::INFINITY;
            for r in 0..m {
                if let Some((slack, d)) = room(self, r) {
                    theta_max = theta_max.min((slack + tol) / d);
                }
            }
            let mut biggest = 0.0f64;
            for r in 0..m {
                if let Some((slack, d)) = room(self, r) {
                    if slack / d <= theta_max {
                        biggest = biggest.max(d);
                    }
                }
            }
            // Normally the largest eligible pivot leaves; while stalling, the
            // smallest basic index among the sizeable ones.
            let mut eligible = Vec::new();
            for r in 0..m {
                let Some((slack, d)) = room(self, r) else {
                    continue;
                };
                if slack / d <= theta_max && d >= 0.01 * biggest {
                    eligible.push(r);
                }
            }
            let leave = if eligible.is_empty() {
                None
            } else if bland {
                eligible.iter().copied().min_by_key(|&r| self.basis[r])
            } else {
                eligible
                    .iter()
                    .copied()
                    .max_by(|&a, &b| alpha[a].abs().total_cmp(&alpha[b].abs()))
            };
            let theta = leave.map_or(f64::INFINITY, |r| {
                let (slack, d) = room(self, r).unwrap_or((0.0, 1.0));
                slack / d
            });

            let flip = self.upper[q] - self.lower[q];
            if flip <= theta {
                // Bound flip: no basis change.
                if !flip.is_finite() {
                    return Ok(Phase::Unbounded);
                }
                for r in 0..m {
                    let jb = self.basis[r];
                    self.value[jb] -= dir * alpha[r] * flip;
                }
                let (val, st) = if dir > 0.0 {
                    (self.upper[q], Status::AtUpper)
                } else {
                    (self.lower[q], Status::AtLower)
                };
                self.value[q] = val;
                self.status[q] = st;
                degenerate_streak = 0;
                bland = false;
                continue;
            }
            let Some(r) = leave else {
                return Ok(Phase::Unbounded);
            };

            // Steps that barely move the objective count as degenerate too;
            // otherwise round-off sized steps keep resetting the streak.
            if theta * dq.abs() <= 1e-12 * (1.0 + objective_scale) {
                degenerate_streak += 1;
                if degenerate_streak >= self.opts.bland_threshold {
                    bland = true;
                }
            } else {
                degenerate_streak = 0;
                bland = false;
            }

            for i in 0..m {
                let jb = self.basis[i];
                self.value[jb] -= dir * alpha[i] * theta;
            }
            self.value[q] += dir * theta;

            let out = self.basis[r];
            let delta = -dir * alpha[r];
            if delta < 0.0 {
                self.value[out] = self.lower[out];
                self.status[out] = Status::AtLower;
            } else {
                self.value[out] = self.upper[out];
                self.status[out] = Status::AtUpper;
            }
            self.basis[r] = q;
            self.status[q] = Status::Basic(r);

            self.update_inverse(r, &alpha);
        }
    }

    /// `y' = c_B' B^-1`.
    fn duals(&self, y: &mut [f64]) {
        let m = self.m;
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, &j) in self.basis.iter().enumerate() {
            let cb = self.cost[j];
            if cb != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (yk, bk) in y.iter_mut().zip(row) {
                    *yk += cb * bk;
                }
            }
        }
    }

    /// Product-form update of `B^-1` after the column with `B^-1 a_q = alpha`
    /// replaced basic row `r`.
    fn update_inverse(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let piv = alpha[r];
        for k in 0..m {
            self.binv[r * m + k] /= piv;
        }
        for i in 0..m {
            if i == r || alpha[i] == 0.0 {
                continue;
            }
            let f = alpha[i];
            for k in 0..m {
                self.binv[i * m + k] -= f * self.binv[r * m + k];
            }
        }
        self.since_refactor += 1;
    }
}
