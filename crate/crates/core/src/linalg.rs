//! Dense Gauss-Jordan elimination over `f64` and exact rationals.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Div, Mul, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Scalars the eliminator can pivot on.
pub(crate) trait Scalar:
    Clone + Zero + One + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    /// Pivot preference; larger is better. Zero means "not a pivot".
    fn weight(&self) -> f64;
}

impl Scalar for f64 {
    fn weight(&self) -> f64 {
        let w = self.abs();
        if w <= 1e-12 {
            0.0
        } else {
            w
        }
    }
}

impl Scalar for BigRational {
    fn weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            // Any nonzero rational is an exact pivot; prefer larger ones to
            // keep numerators small.
            self.abs()
                .to_f64()
                .unwrap_or(f64::MAX)
                .max(f64::MIN_POSITIVE)
        }
    }
}

/// Solves `A u = rhs` for square `A` (row-major `k x k`).
/// Returns `None` when `A` is singular.
pub(crate) fn solve<T: Scalar>(a: &[T], rhs: &[T], k: usize) -> Option<Vec<T>> {
    let mut aug: Vec<Vec<T>> = (0..k)
        .map(|i| {
            let mut row = a[i * k..(i + 1) * k].to_vec();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    eliminate(&mut aug, k)?;
    Some(aug.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Inverse of a row-major `k x k` matrix, or `None` when singular.
pub(crate) fn invert(a: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut aug: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut row = vec![0.0; 2 * k];
            row[..k].copy_from_slice(&a[i * k..(i + 1) * k]);
            row[k + i] = 1.0;
            row
        })
        .collect();
    eliminate(&mut aug, k)?;
    let mut inv = Vec::with_capacity(k * k);
    for row in aug {
        inv.extend_from_slice(&row[k..]);
    }
    Some(inv)
}

/// Reduces the left `k x k` block of `aug` to the identity, carrying the
/// remaining columns along.
fn eliminate<T: Scalar>(aug: &mut [Vec<T>], k: usize) -> Option<()> {
    let width = aug.first().map_or(0, Vec::len);
    for col in 0..k {
        let (piv, w) = (col..k)
            .map(|r| (r, aug[r][col].weight()))
            .fold(
                (col, 0.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if w == 0.0 {
            return None;
        }
        aug.swap(col, piv);
        let p = aug[col][col].clone();
        for c in col..width {
            aug[col][c] = aug[col][c].clone() / p.clone();
        }
        for r in 0..k {
            if r == col || aug[r][col].is_zero() {
                continue;
            }
            let f = aug[r][col].clone();
            for c in col..width {
                let delta = f.clone() * aug[col][c].clone();
                aug[r][c] = aug[r][c].clone() - delta;
            }
        }
    }
    Some(())
}
