//! Cutting-plane engine for mixed-binary linear programs.
//!
//! Problems have the form
//!
//! ```text
//! min  c'x + d'y
//! s.t. Ax + By <= b,  x in {0,1}^n,  0 <= y <= ybar
//! ```
//!
//! The binary constraint is replaced by the exact concave penalty
//! `p(x) = sum_i min(x_i, 1 - x_i)`, the penalized problem is solved locally
//! with DCA, and the critical points it returns feed DC cuts (local type-I
//! cuts at feasible points, global type-II cuts at infeasible local
//! minimizers). Where no DC cut is available, lift-and-project cuts from a
//! normalized cut-generation LP take over. [`dccut::dccut_solve`] ties these
//! together into the cutting-plane loop.
//!
//! The crate is `no_std` and only needs `alloc`. Wall-clock limits and
//! parallel execution are injected through the [`dccut::Clock`] and
//! [`dccut::Executor`] traits; the `dccut` companion crate provides std
//! implementations of both, plus file formats and a CLI.

#![no_std]
// Dense numeric kernels index several arrays in lockstep, and `!(a < b)`
// comparisons are how NaN inputs get rejected.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cutgen;
pub mod dca;
pub mod dccut;
pub mod instance;
pub mod simplex;
pub mod verify;

mod linalg;

pub use cutgen::{Cut, CutError, CutKind};
pub use dca::{DcaError, DcaOptions, DcaResult, TieRule};
pub use dccut::{
    compute_clgap, compute_gap, dccut_solve, dccut_solve_with, Algorithm, Clock, Executor, NoClock,
    SerialExecutor, SolveError, SolveReport, SolveStatus, SolverConfig, TraceRow,
};
pub use instance::{InstanceError, MblpInstance, Point, PolyState, Tolerances};
pub use simplex::{solve_lp, LinearProgram, LpOutcome, LpSolution, SimplexError, SimplexOptions};
