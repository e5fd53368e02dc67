//! The DCCUT cutting-plane loop.
//!
//! Each iteration solves the relaxation over `K^k`, raises the lower bound,
//! and stops if the relaxation vertex is already mixed-binary. Otherwise DCA
//! is restarted from the relaxation vertex `u0`; its critical point `u*`
//! yields a type-I cut and an incumbent when feasible, or a type-II cut (or
//! lift-and-project cuts as fallback) when not. Lift-and-project cuts at `u0`
//! are always added. The three algorithms differ only in which of these
//! sources are enabled:
//!
//! | algorithm   | DCA | cuts at `u*` when infeasible          |
//! |-------------|-----|---------------------------------------|
//! | `LapCut`    | no  | -                                     |
//! | `DcCut`     | yes | type-II if available, else L&P        |
//! | `DcCutV1`   | yes | L&P, plus type-II if available        |
//!
//! With `workers > 1`, extra DCA runs start from seeded random points of the
//! box and all cut-generation tasks are spread over an [`Executor`]. Results
//! are merged in a fixed order so the outcome only depends on the seed.

use alloc::vec;
use alloc::vec::Vec;

use log::{debug, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cutgen::{self, Cut, CutError, CutKind};
use crate::dca::{self, DcaError, DcaOptions, DcaResult, TieRule};
use crate::instance::{MblpInstance, Point, PolyState, Tolerances};
use crate::simplex::{
    solve_lp, solve_lp_from, LinearProgram, LpOutcome, LpSolution, SimplexError, SimplexOptions,
};

/// A relaxation vertex whose `x` lies this close to binary is rounded and
/// offered as an incumbent. Lift-and-project sequences tend to approach an
/// integral point without reaching it exactly.
pub const NEAR_INTEGRAL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Algorithm {
    /// Pure lift-and-project baseline: no DCA, no DC cuts.
    LapCut,
    DcCut,
    /// Multi-cut variant: L&P cuts at every infeasible `u*`, plus type-II cuts.
    DcCutV1,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::LapCut => "lapcut",
            Algorithm::DcCut => "dccut",
            Algorithm::DcCutV1 => "dccut-v1",
        }
    }
}

impl core::str::FromStr for Algorithm {
    type Err = SolveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lapcut" => Ok(Algorithm::LapCut),
            "dccut" => Ok(Algorithm::DcCut),
            "dccut-v1" => Ok(Algorithm::DcCutV1),
            _ => Err(SolveError::InvalidConfig("unknown algorithm")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverConfig {
    pub algo: Algorithm,
    /// Penalty weight of `(P_t)`.
    pub t: f64,
    /// Absolute gap tolerance on `UB - LB`.
    pub eps: f64,
    /// Lift-and-project cuts per fractional point.
    pub nlap: usize,
    pub workers: usize,
    /// Seconds; checked between iterations.
    pub time_limit: Option<f64>,
    pub max_iterations: usize,
    pub seed: u64,
    /// Best known objective, for `clgap`.
    pub fbest: Option<f64>,
    pub eps1: f64,
    pub eps2: f64,
    pub dca_max_iter: usize,
    pub tie_rule: TieRule,
    pub tie_tol: f64,
    pub violation_tol: f64,
    pub tolerances: Tolerances,
    /// When no type-II cut exists at `u*`, also try one at a local
    /// minimizer of the penalty alone, reached by DCA from `u*`.
    pub penalty_only_dc2: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            algo: Algorithm::DcCut,
            t: 500.0,
            eps: 0.01,
            nlap: 1,
            workers: 1,
            time_limit: None,
            max_iterations: 10_000,
            seed: 0,
            fbest: None,
            eps1: 1e-6,
            eps2: 1e-3,
            dca_max_iter: 1000,
            tie_rule: TieRule::Deterministic,
            tie_tol: cutgen::DEFAULT_TIE_TOL,
            violation_tol: cutgen::DEFAULT_VIOLATION_TOL,
            tolerances: Tolerances::default(),
            penalty_only_dc2: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.eps > 0.0) {
            return Err(SolveError::InvalidConfig("eps must be positive"));
        }
        if self.workers == 0 {
            return Err(SolveError::InvalidConfig("workers must be at least 1"));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(SolveError::InvalidConfig(
                "t must be finite and non-negative",
            ));
        }
        if let Some(tl) = self.time_limit {
            if !(tl >= 0.0) {
                return Err(SolveError::InvalidConfig("time limit must be non-negative"));
            }
        }
        Ok(())
    }

    fn dca_options(&self) -> DcaOptions {
        DcaOptions {
            t: self.t,
            eps1: self.eps1,
            eps2: self.eps2,
            max_iter: self.dca_max_iter,
            tie_tol: self.tie_tol,
            tie_rule: self.tie_rule,
            penalty_only: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SolveStatus {
    /// The relaxation became mixed-binary, or emptied with an incumbent.
    Optimal,
    /// Stopped on `UB - LB < eps`.
    EpsOptimal,
    Infeasible,
    /// Time or iteration budget exhausted, or no cut could be separated.
    LimitReached,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::EpsOptimal => "eps-optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::LimitReached => "limit-reached",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceRow {
    pub iteration: usize,
    pub lb: f64,
    pub ub: f64,
    pub cuts_added: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    pub status: SolveStatus,
    pub ub: f64,
    pub lb: f64,
    pub u_opt: Option<Point>,
    pub gap: f64,
    /// `None` when no `fbest` was given or `fbest = f0`.
    pub clgap: Option<f64>,
    /// Value of the first relaxation.
    pub f0: Option<f64>,
    /// Relaxations solved.
    pub iterations: usize,
    pub cut_dc1: usize,
    pub cut_dc2: usize,
    pub cut_lap: usize,
    /// Seconds, as measured by the injected clock.
    pub wall_time: f64,
    pub trace: Vec<TraceRow>,
    /// Every cut added, in order; `cut.iteration` names the polytope it was
    /// separated over.
    pub cuts: Vec<Cut>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("relaxation LP failed at iteration {iteration}: {source}")]
    Relaxation {
        iteration: usize,
        source: SimplexError,
    },
    #[error("DCA failed at iteration {iteration}: {source}")]
    Dca { iteration: usize, source: DcaError },
    #[error("cut generation failed at iteration {iteration}: {source}")]
    Cut { iteration: usize, source: CutError },
    #[error("polishing LP failed at iteration {iteration}: {source}")]
    Polish {
        iteration: usize,
        source: SimplexError,
    },
}

/// `(UB - LB) / (max(|UB|, |LB|) + 1)`; `+inf` without an incumbent.
pub fn compute_gap(ub: f64, lb: f64) -> f64 {
    if ub == f64::INFINITY {
        return f64::INFINITY;
    }
    (ub - lb) / (ub.abs().max(lb.abs()) + 1.0)
}

/// `(LB - f0) / (fbest - f0)`; `None` when `fbest = f0`.
pub fn compute_clgap(lb: f64, f0: f64, fbest: f64) -> Option<f64> {
    if fbest == f0 {
        None
    } else {
        Some((lb - f0) / (fbest - f0))
    }
}

/// Monotonic time source.
pub trait Clock {
    /// Seconds since the solve started.
    fn elapsed_secs(&self) -> f64;
}

/// A clock that never advances; time limits never trigger.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

/// Runs independent tasks, returning results in task order.
pub trait Executor: Sync {
    fn map<T, R, F>(&self, tasks: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync;
}

/// Runs tasks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct SerialExecutor;

impl Executor for SerialExecutor {
    fn map<T, R, F>(&self, tasks: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync,
    {
        tasks.into_iter().map(f).collect()
    }
}

/// Serial solve without a time source.
pub fn dccut_solve(inst: &MblpInstance, cfg: &SolverConfig) -> Result<SolveReport, SolveError> {
    dccut_solve_with(inst, cfg, &NoClock, &SerialExecutor)
}

pub fn dccut_solve_with<C: Clock, E: Executor>(
    inst: &MblpInstance,
    cfg: &SolverConfig,
    clock: &C,
    exec: &E,
) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    let mut solver = Loop::new(inst, cfg);
    let status = solver.run(clock, exec)?;
    Ok(solver.report(status, clock.elapsed_secs()))
}

struct Incumbent {
    value: f64,
    point: Option<Point>,
}

struct Loop<'a> {
    inst: &'a MblpInstance,
    cfg: &'a SolverConfig,
    state: PolyState<'a>,
    lb: f64,
    inc: Incumbent,
    f0: Option<f64>,
    iterations: usize,
    trace: Vec<TraceRow>,
}

/// One unit of parallel work.
enum Task<'s> {
    Lap { source: &'s Point, j: usize },
    Dca { start: Point, warm: &'s LpSolution },
}

enum TaskOutput {
    Lap(Result<Option<Cut>, CutError>),
    Dca(Result<DcaResult, DcaError>),
}

/// What one DCA worker contributes to an iteration.
#[derive(Default)]
struct WorkerYield {
    dc_cut: Option<Cut>,
    lap_sources: Option<Point>,
    candidate: Option<(f64, Point)>,
}

impl<'a> Loop<'a> {
    fn new(inst: &'a MblpInstance, cfg: &'a SolverConfig) -> Self {
        Self {
            inst,
            cfg,
            state: PolyState::new(inst),
            lb: f64::NEG_INFINITY,
            inc: Incumbent {
                value: f64::INFINITY,
                point: None,
            },
            f0: None,
            iterations: 0,
            trace: Vec::new(),
        }
    }

    fn run<C: Clock, E: Executor>(
        &mut self,
        clock: &C,
        exec: &E,
    ) -> Result<SolveStatus, SolveError> {
        let tol = self.cfg.tolerances;
        let mut previous: Option<LpSolution> = None;
        loop {
            if !(self.inc.value == f64::INFINITY || self.inc.value - self.lb >= self.cfg.eps) {
                return Ok(SolveStatus::EpsOptimal);
            }
            if self.iterations >= self.cfg.max_iterations {
                return Ok(SolveStatus::LimitReached);
            }
            if let Some(limit) = self.cfg.time_limit {
                if clock.elapsed_secs() >= limit {
                    return Ok(SolveStatus::LimitReached);
                }
            }

            let k = self.state.iteration();
            self.iterations += 1;
            let lp = self.state.linear_program(self.inst.cost());
            let relaxed = match &previous {
                // Cuts are appended, so the last optimum restarts the dual simplex.
                Some(prev) => solve_lp_from(&lp, prev, &SimplexOptions::default()).transpose(),
                None => None,
            };
            let relaxed = match relaxed {
                Some(outcome) => outcome,
                None => solve_lp(&lp),
            };
            let relax = match relaxed.map_err(|source| SolveError::Relaxation {
                iteration: k,
                source,
            })? {
                LpOutcome::Optimal(sol) => sol,
                LpOutcome::Infeasible => {
                    self.push_trace(k, 0);
                    return Ok(if self.inc.point.is_some() {
                        SolveStatus::Optimal
                    } else {
                        SolveStatus::Infeasible
                    });
                }
                LpOutcome::Unbounded => {
                    return Err(SolveError::Relaxation {
                        iteration: k,
                        source: SimplexError::Malformed(
                            "relaxation over a bounded box reported unbounded",
                        ),
                    })
                }
            };
            let u0 = Point::from_stacked(self.inst.n(), &relax.x);
            let f_u0 = self.inst.evaluate_f(&u0);
            if self.f0.is_none() {
                self.f0 = Some(f_u0);
            }
            if f_u0 > self.lb {
                self.lb = f_u0;
            }

            if self.state.is_in_s(&u0, &tol) {
                if let Some((value, point)) = self.polish(&u0.snapped(), k)? {
                    self.offer(value, point);
                }
                self.push_trace(k, 0);
                return Ok(SolveStatus::Optimal);
            }
            if u0.is_integral(NEAR_INTEGRAL_TOL) {
                if let Some((value, point)) = self.polish(&u0.snapped(), k)? {
                    self.offer(value, point);
                }
            }

            let pool = self.iterate(&u0, &relax, k, exec)?;
            previous = Some(relax);
            let fresh: Vec<Cut> = cutgen::pool_dedupe(pool, 1e-9)
                .into_iter()
                .filter(|c| {
                    !self
                        .state
                        .cuts()
                        .iter()
                        .any(|e| cutgen::dominates(e, c, 1e-9))
                })
                .collect();
            debug!(
                "iteration {k}: lb={} ub={} new cuts={}",
                self.lb,
                self.inc.value,
                fresh.len()
            );
            self.push_trace(k, fresh.len());
            if fresh.is_empty() {
                warn!("iteration {k}: no cut separates the relaxation vertex; stopping");
                return Ok(SolveStatus::LimitReached);
            }
            self.state.refine(fresh);
            debug_assert!(no_duplicate_dc_cuts(self.state.cuts()));
        }
    }

    fn push_trace(&mut self, k: usize, cuts_added: usize) {
        self.trace.push(TraceRow {
            iteration: k,
            lb: self.lb,
            ub: self.inc.value,
            cuts_added,
        });
    }

    /// Accepts a candidate only if it is feasible for the original instance
    /// and strictly improves the incumbent.
    fn offer(&mut self, value: f64, point: Point) {
        if value < self.inc.value && PolyState::new(self.inst).is_in_s(&point, &self.cfg.tolerances)
        {
            self.inc = Incumbent {
                value,
                point: Some(point),
            };
        }
    }

    /// Best `y` for the binary `x` of `u` over the original `K`.
    fn polish(&self, u: &Point, k: usize) -> Result<Option<(f64, Point)>, SolveError> {
        polish_y(self.inst, u).map_err(|source| SolveError::Polish {
            iteration: k,
            source,
        })
    }

    /// Cut pool and incumbent candidates of one iteration.
    /// `relax` is the relaxation optimum `u0` came from; DCA runs restart
    /// their first LP from its basis.
    fn iterate<E: Executor>(
        &mut self,
        u0: &Point,
        relax: &LpSolution,
        k: usize,
        exec: &E,
    ) -> Result<Vec<Cut>, SolveError> {
        let cfg = self.cfg;
        let state = &self.state;
        let use_dca = cfg.algo != Algorithm::LapCut;
        let workers = if use_dca { cfg.workers } else { 0 };

        // Stage 1: L&P at u0 and every DCA run.
        let at_u0 = cutgen::select_fractional_indices(u0, cfg.nlap);
        let mut tasks: Vec<Task<'_>> = at_u0.iter().map(|&j| Task::Lap { source: u0, j }).collect();
        for w in 0..workers {
            let start = if w == 0 {
                u0.clone()
            } else {
                random_box_point(self.inst, cfg.seed, k, w)
            };
            tasks.push(Task::Dca { start, warm: relax });
        }
        let outputs = exec.map(tasks, |task| run_task(state, cfg, task));
        let mut outputs = outputs.into_iter();

        let mut pool = Vec::new();
        for _ in &at_u0 {
            let Some(TaskOutput::Lap(res)) = outputs.next() else {
                unreachable!()
            };
            if let Some(cut) = res.map_err(|source| SolveError::Cut {
                iteration: k,
                source,
            })? {
                pool.push(cut);
            }
        }

        let mut yields: Vec<WorkerYield> = Vec::with_capacity(workers);
        for w in 0..workers {
            let Some(TaskOutput::Dca(res)) = outputs.next() else {
                unreachable!()
            };
            let y = match res {
                Ok(r) => self.digest(r, k),
                Err(source) => Err(SolveError::Dca {
                    iteration: k,
                    source,
                }),
            };
            match y {
                Ok(y) => yields.push(y),
                Err(e) if w == 0 => return Err(e),
                Err(e) => {
                    warn!("worker {w} dropped at iteration {k}: {e}");
                    yields.push(WorkerYield::default());
                }
            }
        }

        // Stage 2: L&P at infeasible DCA points.
        let mut lap_tasks = Vec::new();
        let mut owners = Vec::new();
        for (w, y) in yields.iter().enumerate() {
            if let Some(src) = &y.lap_sources {
                for j in cutgen::select_fractional_indices(src, cfg.nlap) {
                    lap_tasks.push(Task::Lap { source: src, j });
                    owners.push(w);
                }
            }
        }
        let lap_out = exec.map(lap_tasks, |task| run_task(state, cfg, task));
        let mut per_worker: Vec<Vec<Cut>> = vec![Vec::new(); workers];
        for (w, out) in owners.into_iter().zip(lap_out) {
            let TaskOutput::Lap(res) = out else {
                unreachable!()
            };
            match res {
                Ok(Some(cut)) => per_worker[w].push(cut),
                Ok(None) => {}
                Err(source) if w == 0 => {
                    return Err(SolveError::Cut {
                        iteration: k,
                        source,
                    })
                }
                Err(e) => warn!("worker {w} L&P task dropped at iteration {k}: {e}"),
            }
        }

        for (y, laps) in yields.into_iter().zip(per_worker) {
            if let Some((value, point)) = y.candidate {
                self.offer(value, point);
            }
            pool.extend(y.dc_cut);
            pool.extend(laps);
        }
        Ok(pool)
    }

    /// Turns a DCA outcome into cuts and an incumbent candidate.
    fn digest(&self, r: DcaResult, k: usize) -> Result<WorkerYield, SolveError> {
        let cfg = self.cfg;
        let mut out = WorkerYield::default();
        if r.feasible {
            if let Some((value, point)) = self.polish(&r.point.snapped(), k)? {
                out.candidate = Some((value, point));
            }
            let cut =
                cutgen::dc_cut_type1(&r.point, cfg.tolerances.int_tol, k).map_err(|source| {
                    SolveError::Cut {
                        iteration: k,
                        source,
                    }
                })?;
            out.dc_cut = Some(cut);
            return Ok(out);
        }
        let dc2 = if r.stationary {
            cutgen::dc_cut_type2(&r.point, cfg.tie_tol, cfg.tolerances.int_tol, k)
        } else {
            None
        };
        let dc2 = match dc2 {
            None if cfg.penalty_only_dc2 => self.penalty_only_dc2(&r.point, k)?,
            other => other,
        };
        match cfg.algo {
            Algorithm::DcCutV1 => {
                out.dc_cut = dc2;
                out.lap_sources = Some(r.point);
            }
            _ => match dc2 {
                Some(cut) => out.dc_cut = Some(cut),
                None => out.lap_sources = Some(r.point),
            },
        }
        Ok(out)
    }

    fn penalty_only_dc2(&self, from: &Point, k: usize) -> Result<Option<Cut>, SolveError> {
        let opts = DcaOptions {
            penalty_only: true,
            ..self.cfg.dca_options()
        };
        let r = dca::dca_solve(&self.state, from, &opts).map_err(|source| SolveError::Dca {
            iteration: k,
            source,
        })?;
        if r.feasible || !r.stationary {
            return Ok(None);
        }
        Ok(cutgen::dc_cut_type2(
            &r.point,
            self.cfg.tie_tol,
            self.cfg.tolerances.int_tol,
            k,
        ))
    }

    fn report(self, status: SolveStatus, wall_time: f64) -> SolveReport {
        let count = |kind| self.state.cuts().iter().filter(|c| c.kind == kind).count();
        let (ub, lb) = (self.inc.value, self.lb);
        let clgap = match (self.cfg.fbest, self.f0) {
            (Some(fbest), Some(f0)) => compute_clgap(lb, f0, fbest),
            _ => None,
        };
        SolveReport {
            status,
            ub,
            lb,
            gap: compute_gap(ub, lb),
            clgap,
            f0: self.f0,
            iterations: self.iterations,
            cut_dc1: count(CutKind::Dc1),
            cut_dc2: count(CutKind::Dc2),
            cut_lap: count(CutKind::Lap),
            wall_time,
            u_opt: self.inc.point,
            trace: self.trace,
            cuts: self.state.cuts().to_vec(),
        }
    }
}

fn run_task(state: &PolyState<'_>, cfg: &SolverConfig, task: Task<'_>) -> TaskOutput {
    match task {
        Task::Lap { source, j } => {
            TaskOutput::Lap(cutgen::lap_cut(state, source, j, cfg.violation_tol))
        }
        Task::Dca { start, warm } => TaskOutput::Dca(dca::dca_solve_from(
            state,
            &start,
            &cfg.dca_options(),
            Some(warm),
        )),
    }
}

/// Minimizes `d'y` over `{y in [0, ybar] : By <= b - Ax}` for the `x` of `u`.
/// Returns `None` if that slice of `K` is empty.
fn polish_y(inst: &MblpInstance, u: &Point) -> Result<Option<(f64, Point)>, SimplexError> {
    let q = inst.q();
    let rhs: Vec<f64> = (0..inst.m())
        .map(|i| inst.b()[i] - crate::instance::dot(inst.a_row(i), &u.x))
        .collect();
    if q == 0 {
        let ok = rhs.iter().all(|r| *r >= -inst_tol(r));
        return Ok(ok.then(|| (inst.evaluate_f(u), u.clone())));
    }
    let mut lp = LinearProgram::new(inst.d().to_vec());
    for (i, r) in rhs.iter().enumerate() {
        lp.add_row(inst.b_row(i), *r);
    }
    for (j, &hi) in inst.ybar().iter().enumerate() {
        lp.set_bounds(j, 0.0, hi);
    }
    Ok(match solve_lp(&lp)? {
        LpOutcome::Optimal(sol) => {
            let p = Point::new(u.x.clone(), sol.x);
            Some((inst.evaluate_f(&p), p))
        }
        _ => None,
    })
}

fn inst_tol(r: &f64) -> f64 {
    crate::instance::DEFAULT_FEAS_TOL * (1.0 + r.abs())
}

/// Deterministic random point of the box for worker `w` at iteration `k`.
fn random_box_point(inst: &MblpInstance, seed: u64, k: usize, w: usize) -> Point {
    let mix = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((k as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add((w as u64).wrapping_mul(0x94D0_49BB_1331_11EB));
    let mut rng = ChaCha8Rng::seed_from_u64(mix);
    let x = (0..inst.n()).map(|_| rng.random::<f64>()).collect();
    let y = inst
        .ybar()
        .iter()
        .map(|&hi| rng.random::<f64>() * hi)
        .collect();
    Point::new(x, y)
}

/// No two DC cuts share both coefficient vector and rhs.
pub fn no_duplicate_dc_cuts(cuts: &[Cut]) -> bool {
    let dc: Vec<&Cut> = cuts.iter().filter(|c| c.kind.is_dc()).collect();
    dc.iter().enumerate().all(|(i, a)| {
        dc[i + 1..]
            .iter()
            .all(|b| a.coeffs != b.coeffs || a.rhs != b.rhs)
    })
}
