//! Problem data, points, and the cut-refined polytope `K^k`.

use alloc::vec::Vec;

use thiserror::Error;

use crate::cutgen::Cut;
use crate::simplex::LinearProgram;

/// Default tolerance for "x_i is binary".
pub const DEFAULT_INT_TOL: f64 = 1e-6;
/// Default tolerance for row, bound, and cut satisfaction.
pub const DEFAULT_FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("an instance needs at least one binary variable")]
    NoBinaryVariables,
    #[error("{what} has length {found}, expected {expected}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("ybar[{index}] = {value} is negative")]
    NegativeUpperBound { index: usize, value: f64 },
    #[error("{what} contains a non-finite value")]
    NonFinite { what: &'static str },
}

/// A mixed-binary linear program over `K = {(x,y) in [0,1]^n x [0,ybar] : Ax + By <= b}`.
///
/// Rows are stored in `<=` form. Box bounds are kept apart from the rows.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MblpInstance {
    n: usize,
    q: usize,
    m: usize,
    c: Vec<f64>,
    d: Vec<f64>,
    /// m x n, row-major.
    a: Vec<f64>,
    /// m x q, row-major.
    b_mat: Vec<f64>,
    b: Vec<f64>,
    ybar: Vec<f64>,
}

impl MblpInstance {
    /// Builds an instance from row-major data. `a_rows[i]` and `b_rows[i]`
    /// are the x- and y-parts of row `i`.
    pub fn new(
        c: Vec<f64>,
        d: Vec<f64>,
        a_rows: Vec<Vec<f64>>,
        b_rows: Vec<Vec<f64>>,
        b: Vec<f64>,
        ybar: Vec<f64>,
    ) -> Result<Self, InstanceError> {
        let n = c.len();
        let q = d.len();
        let m = b.len();
        if n == 0 {
            return Err(InstanceError::NoBinaryVariables);
        }
        check_len("ybar", q, ybar.len())?;
        check_len("A rows", m, a_rows.len())?;
        // q = 0 allows B to be omitted entirely.
        if !(q == 0 && b_rows.is_empty()) {
            check_len("B rows", m, b_rows.len())?;
        }
        let mut a = Vec::with_capacity(m * n);
        for row in &a_rows {
            check_len("A row", n, row.len())?;
            a.extend_from_slice(row);
        }
        let mut b_mat = Vec::with_capacity(m * q);
        if q > 0 {
            for row in &b_rows {
                check_len("B row", q, row.len())?;
                b_mat.extend_from_slice(row);
            }
        } else {
            for row in &b_rows {
                check_len("B row", 0, row.len())?;
            }
        }
        for (what, v) in [
            ("c", &c),
            ("d", &d),
            ("A", &a),
            ("B", &b_mat),
            ("b", &b),
            ("ybar", &ybar),
        ] {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(InstanceError::NonFinite { what });
            }
        }
        if let Some((index, &value)) = ybar.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(InstanceError::NegativeUpperBound { index, value });
        }
        Ok(Self {
            n,
            q,
            m,
            c,
            d,
            a,
            b_mat,
            b,
            ybar,
        })
    }

    /// Pure binary instance (`q = 0`).
    pub fn binary(c: Vec<f64>, a_rows: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self, InstanceError> {
        Self::new(c, Vec::new(), a_rows, Vec::new(), b, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn m(&self) -> usize {
        self.m
    }
    /// Total number of variables, `n + q`.
    pub fn dim(&self) -> usize {
        self.n + self.q
    }
    pub fn c(&self) -> &[f64] {
        &self.c
    }
    pub fn d(&self) -> &[f64] {
        &self.d
    }
    pub fn b(&self) -> &[f64] {
        &self.b
    }
    pub fn ybar(&self) -> &[f64] {
        &self.ybar
    }
    pub fn a_row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }
    pub fn b_row(&self, i: usize) -> &[f64] {
        &self.b_mat[i * self.q..(i + 1) * self.q]
    }

    /// Upper bound of variable `j` in the stacked `(x, y)` ordering.
    pub fn upper_bound(&self, j: usize) -> f64 {
        if j < self.n {
            1.0
        } else {
            self.ybar[j - self.n]
        }
    }

    /// Objective vector over the stacked `(x, y)` ordering.
    pub fn cost(&self) -> Vec<f64> {
        let mut v = self.c.clone();
        v.extend_from_slice(&self.d);
        v
    }

    /// `f(x, y) = c'x + d'y`.
    pub fn evaluate_f(&self, u: &Point) -> f64 {
        dot(&self.c, &u.x) + dot(&self.d, &u.y)
    }

    /// Activity `a_i'x + b_i'y` of row `i`.
    pub fn row_activity(&self, i: usize, u: &Point) -> f64 {
        dot(self.a_row(i), &u.x) + dot(self.b_row(i), &u.y)
    }

    /// Checks that `u` has this instance's dimensions.
    pub fn check_point(&self, u: &Point) -> Result<(), InstanceError> {
        check_len("point x", self.n, u.x.len())?;
        check_len("point y", self.q, u.y.len())
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<(), InstanceError> {
    if expected == found {
        Ok(())
    } else {
        Err(InstanceError::Dimension {
            what,
            expected,
            found,
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A point `u = (x, y)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Point {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y }
    }

    /// Point with no continuous part.
    pub fn from_x(x: Vec<f64>) -> Self {
        Self { x, y: Vec::new() }
    }

    /// Splits a stacked vector `u` after the first `n` entries.
    pub fn from_stacked(n: usize, u: &[f64]) -> Self {
        Self {
            x: u[..n].to_vec(),
            y: u[n..].to_vec(),
        }
    }

    pub fn zeros(n: usize, q: usize) -> Self {
        Self {
            x: alloc::vec![0.0; n],
            y: alloc::vec![0.0; q],
        }
    }

    pub fn stacked(&self) -> Vec<f64> {
        let mut u = self.x.clone();
        u.extend_from_slice(&self.y);
        u
    }

    /// Iterator over the stacked coordinates.
    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        self.x.iter().chain(self.y.iter()).copied()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.coords().map(|v| v * v).sum())
    }

    pub fn distance(&self, other: &Point) -> f64 {
        libm::sqrt(
            self.coords()
                .zip(other.coords())
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        )
    }

    /// True when every `x_i` lies within `int_tol` of 0 or 1.
    pub fn is_integral(&self, int_tol: f64) -> bool {
        self.x
            .iter()
            .all(|&v| v.abs() <= int_tol || (v - 1.0).abs() <= int_tol)
    }

    /// Copy with every `x_i` rounded to the nearest of 0 and 1.
    pub fn snapped(&self) -> Point {
        Point {
            x: self
                .x
                .iter()
                .map(|&v| if v >= 0.5 { 1.0 } else { 0.0 })
                .collect(),
            y: self.y.clone(),
        }
    }
}

/// Membership tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerances {
    pub int_tol: f64,
    pub feas_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            int_tol: DEFAULT_INT_TOL,
            feas_tol: DEFAULT_FEAS_TOL,
        }
    }
}

/// `K^k`: the base polytope intersected with every cut added so far.
#[derive(Debug, Clone)]
pub struct PolyState<'a> {
    base: &'a MblpInstance,
    cuts: Vec<Cut>,
    iteration: usize,
}

impl<'a> PolyState<'a> {
    /// `K^0`.
    pub fn new(base: &'a MblpInstance) -> Self {
        Self {
            base,
            cuts: Vec::new(),
            iteration: 0,
        }
    }

    pub fn with_cuts(base: &'a MblpInstance, cuts: Vec<Cut>, iteration: usize) -> Self {
        Self {
            base,
            cuts,
            iteration,
        }
    }

    pub fn base(&self) -> &'a MblpInstance {
        self.base
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Appends cuts and advances the iteration counter.
    pub fn refine(&mut self, cuts: impl IntoIterator<Item = Cut>) {
        self.cuts.extend(cuts);
        self.iteration += 1;
    }

    /// Snapshot holding only the cuts generated before `iteration`.
    pub fn at_iteration(&self, iteration: usize) -> PolyState<'a> {
        PolyState {
            base: self.base,
            cuts: self
                .cuts
                .iter()
                .filter(|c| c.iteration < iteration)
                .cloned()
                .collect(),
            iteration,
        }
    }

    /// Box bounds, base rows, and every cut, each within `tol`.
    pub fn is_in_k(&self, u: &Point, tol: f64) -> bool {
        let inst = self.base;
        if u.x.len() != inst.n || u.y.len() != inst.q {
            return false;
        }
        let in_box = u.x.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
            && u.y
                .iter()
                .zip(&inst.ybar)
                .all(|(&v, &hi)| v >= -tol && v <= hi + tol);
        in_box
            && (0..inst.m).all(|i| inst.row_activity(i, u) <= inst.b[i] + tol)
            && self.cuts.iter().all(|cut| cut.slack(u) >= -tol)
    }

    /// `is_in_k` plus integrality of `x`.
    pub fn is_in_s(&self, u: &Point, tol: &Tolerances) -> bool {
        u.is_integral(tol.int_tol) && self.is_in_k(u, tol.feas_tol)
    }

    /// Number of `<=` rows the LP over `K^k` has (base rows plus cuts).
    pub fn row_count(&self) -> usize {
        self.base.m + self.cuts.len()
    }

    /// The LP `min objective'u` over `K^k`. Base rows come first, then one
    /// row per cut (negated into `<=` form). Box bounds become variable bounds.
    pub fn linear_program(&self, objective: Vec<f64>) -> LinearProgram {
        let inst = self.base;
        let dim = inst.dim();
        let mut lp = LinearProgram::new(objective);
        let mut row = alloc::vec![0.0; dim];
        for i in 0..inst.m {
            row[..inst.n].copy_from_slice(inst.a_row(i));
            row[inst.n..].copy_from_slice(inst.b_row(i));
            lp.add_row(&row, inst.b[i]);
        }
        for cut in &self.cuts {
            for (r, &a) in row.iter_mut().zip(&cut.coeffs) {
                *r = -a;
            }
            lp.add_row(&row, -cut.rhs);
        }
        for j in 0..dim {
            lp.set_bounds(j, 0.0, inst.upper_bound(j));
        }
        lp
    }

    /// Every constraint of `K^k`, box bounds included, as `g'u >= h` pairs.
    /// Order: base rows, cuts, then for each variable its lower and upper bound.
    pub fn geq_system(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let inst = self.base;
        let dim = inst.dim();
        let mut rows = Vec::with_capacity(self.row_count() + 2 * dim);
        let mut rhs = Vec::with_capacity(rows.capacity());
        for i in 0..inst.m {
            let mut r: Vec<f64> = inst.a_row(i).iter().map(|v| -v).collect();
            r.extend(inst.b_row(i).iter().map(|v| -v));
            rows.push(r);
            rhs.push(-inst.b[i]);
        }
        for cut in &self.cuts {
            rows.push(cut.coeffs.clone());
            rhs.push(cut.rhs);
        }
        for j in 0..dim {
            let mut lo = alloc::vec![0.0; dim];
            lo[j] = 1.0;
            rows.push(lo);
            rhs.push(0.0);
            let mut hi = alloc::vec![0.0; dim];
            hi[j] = -1.0;
            rows.push(hi);
            rhs.push(-inst.upper_bound(j));
        }
        (rows, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutgen::{Cut, CutKind};
    use alloc::vec;

    pub(crate) fn ex_b() -> MblpInstance {
        MblpInstance::binary(
            vec![-1.0, -1.0],
            vec![vec![4.0, -12.0], vec![12.0, 4.0]],
            vec![1.0, 13.0],
        )
        .unwrap()
    }

    fn ex_a() -> MblpInstance {
        MblpInstance::binary(
            vec![-2.0, -1.0, -1.0],
            vec![
                vec![3.0, -1.0, 3.0],
                vec![3.0, 3.0, -1.0],
                vec![2.0, 3.0, 0.0],
                vec![2.0, 0.0, 3.0],
            ],
            vec![3.0, 3.0, 3.0, 3.0],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_f_examples() {
        assert_eq!(ex_b().evaluate_f(&Point::from_x(vec![0.0, 1.0])), -1.0);
        assert_eq!(ex_b().evaluate_f(&Point::zeros(2, 0)), 0.0);
        assert_eq!(ex_a().evaluate_f(&Point::from_x(vec![0.0, 1.0, 1.0])), -2.0);
    }

    #[test]
    fn membership_in_k_and_s() {
        let inst = ex_b();
        let k0 = PolyState::new(&inst);
        let tol = Tolerances::default();
        assert!(k0.is_in_k(&Point::from_x(vec![0.25, 0.0]), tol.feas_tol));
        assert!(!k0.is_in_k(&Point::from_x(vec![1.0, 1.0]), tol.feas_tol));
        assert!(!k0.is_in_k(
            &Point::from_x(vec![1.0 + 2.0 * tol.feas_tol, 0.25]),
            tol.feas_tol
        ));

        assert!(k0.is_in_s(&Point::from_x(vec![0.0, 1.0]), &tol));
        assert!(!k0.is_in_s(&Point::from_x(vec![0.75, 1.0]), &tol));
        assert!(!k0.is_in_s(&Point::from_x(vec![1.0, 1.0]), &tol));
    }

    #[test]
    fn cuts_shrink_membership() {
        let inst = ex_b();
        let mut state = PolyState::new(&inst);
        let p = Point::from_x(vec![0.0, 0.0]);
        assert!(state.is_in_k(&p, 1e-9));
        state.refine([Cut::new(vec![1.0, 1.0], 1.0, CutKind::Dc1, p.clone(), 0)]);
        assert!(!state.is_in_k(&p, 1e-9));
        assert!(state.is_in_k(&Point::from_x(vec![0.0, 1.0]), 1e-9));
        assert_eq!(state.iteration(), 1);
        assert_eq!(state.at_iteration(0).cuts().len(), 0);
    }

    #[test]
    fn dimension_errors() {
        let err = MblpInstance::binary(vec![1.0, 1.0], vec![vec![1.0]], vec![1.0]).unwrap_err();
        assert!(matches!(
            err,
            InstanceError::Dimension { what: "A row", .. }
        ));
        let err = MblpInstance::new(
            vec![1.0],
            vec![1.0],
            vec![vec![1.0]],
            vec![vec![1.0]],
            vec![1.0],
            vec![-1.0],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            InstanceError::NegativeUpperBound { index: 0, .. }
        ));
        assert_eq!(
            MblpInstance::binary(vec![], vec![], vec![]).unwrap_err(),
            InstanceError::NoBinaryVariables
        );
    }

    #[test]
    fn geq_system_matches_membership() {
        let inst = ex_b();
        let state = PolyState::new(&inst);
        let (rows, rhs) = state.geq_system();
        assert_eq!(rows.len(), 2 + 4);
        let inside = [0.75, 1.0];
        for (r, h) in rows.iter().zip(&rhs) {
            assert!(dot(r, &inside) >= h - 1e-12);
        }
    }
}
