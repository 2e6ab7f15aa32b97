//! Phase-I simplex for equality-form feasibility questions
//! `exists lambda >= 0 with A lambda = b`, over exact rationals (zero
//! tolerance) or `f64` (explicit margins).
//!
//! Bland's rule is used throughout, so the method terminates on degenerate
//! tableaus, which are the common case here (most right-hand sides are 0).

use crate::rat::Rat;
use num_traits::Zero;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
    /// The Phase-I optimum fell inside the numerical gray zone, or the pivot
    /// budget ran out; the caller should resample or treat as degenerate.
    Marginal,
}

/// Minimal scalar interface so the same tableau code runs exactly and in
/// floating point.
pub trait LpScalar: Clone + PartialOrd {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_positive_beyond(&self, eps: &Self) -> bool;
    fn abs_value(&self) -> Self;
    fn mul_add_into(&mut self, a: &Self, b: &Self);
    fn div(&self, other: &Self) -> Self;
    fn neg_value(&self) -> Self;
}

impl LpScalar for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        crate::rat::rat_one()
    }
    fn is_positive_beyond(&self, _eps: &Self) -> bool {
        *self > <Rat as Zero>::zero()
    }
    fn abs_value(&self) -> Self {
        if *self < <Rat as Zero>::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn mul_add_into(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg_value(&self) -> Self {
        -self.clone()
    }
}

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_positive_beyond(&self, eps: &Self) -> bool {
        *self > *eps
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn mul_add_into(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg_value(&self) -> Self {
        -self
    }
}

/// Phase-I optimum (sum of artificial variables) for `A lambda = b`,
/// `lambda >= 0`. Returns `None` when the pivot budget is exhausted.
fn phase_one<T: LpScalar>(a: &[Vec<T>], b: &[T], eps: &T) -> Option<T> {
    let nrows = a.len();
    if nrows == 0 {
        return Some(T::zero());
    }
    let ncols = a[0].len();
    let total = ncols + nrows;
    let one = T::one();

    // Rows normalized so rhs >= 0; artificial identity block appended.
    let mut t: Vec<Vec<T>> = Vec::with_capacity(nrows);
    for i in 0..nrows {
        let flip = b[i] < T::zero();
        let mut row: Vec<T> = Vec::with_capacity(total + 1);
        for j in 0..ncols {
            row.push(if flip { a[i][j].neg_value() } else { a[i][j].clone() });
        }
        for k in 0..nrows {
            row.push(if k == i { one.clone() } else { T::zero() });
        }
        row.push(if flip { b[i].neg_value() } else { b[i].clone() });
        t.push(row);
    }

    let mut basis: Vec<usize> = (0..nrows).map(|i| ncols + i).collect();
    // z[j] > 0 means entering column j decreases the artificial sum.
    // Initially z_j = sum_i t[i][j] - c_j with c = 1 on artificials.
    let mut z: Vec<T> = vec![T::zero(); total];
    for (j, zj) in z.iter_mut().enumerate() {
        let mut s = T::zero();
        for row in t.iter() {
            s.mul_add_into(&row[j], &one);
        }
        if j >= ncols {
            s.mul_add_into(&one.neg_value(), &one);
        }
        *zj = s;
    }
    let mut obj = T::zero();
    for row in t.iter() {
        obj.mul_add_into(&row[total], &one);
    }

    let max_pivots = 500 * (total + 1);
    for _ in 0..max_pivots {
        // Bland: smallest improving column index.
        let Some(enter) = (0..total).find(|&j| z[j].is_positive_beyond(eps)) else {
            return Some(obj);
        };
        // Ratio test, ties broken by smallest basis index (Bland).
        let mut leave: Option<usize> = None;
        let mut best_ratio: Option<T> = None;
        for i in 0..nrows {
            if t[i][enter].is_positive_beyond(eps) {
                let ratio = t[i][total].div(&t[i][enter]);
                let better = match (&best_ratio, leave) {
                    (None, _) => true,
                    (Some(r), Some(l)) => ratio < *r || (ratio == *r && basis[i] < basis[l]),
                    _ => unreachable!(),
                };
                if better {
                    best_ratio = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let leave = leave?;
        // Pivot on (leave, enter).
        let piv = t[leave][enter].clone();
        for v in t[leave].iter_mut() {
            *v = v.div(&piv);
        }
        let pivot_row = t[leave].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == leave {
                continue;
            }
            let f = row[enter].neg_value();
            if f.abs_value().is_positive_beyond(eps) {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    v.mul_add_into(&f, pv);
                }
            }
        }
        let f = z[enter].neg_value();
        for (v, pv) in z.iter_mut().zip(&pivot_row) {
            v.mul_add_into(&f, pv);
        }
        obj.mul_add_into(&f, &pivot_row[total]);
        basis[leave] = enter;
    }
    None
}

/// Exact feasibility of `A lambda = b, lambda >= 0`.
pub fn feasible_rational(a: &[Vec<Rat>], b: &[Rat]) -> bool {
    let zero = <Rat as Zero>::zero();
    match phase_one(a, b, &zero) {
        Some(opt) => opt.is_zero(),
        None => unreachable!("exact phase-I with Bland's rule terminates"),
    }
}

/// Floating-point feasibility with a gray zone: optima in
/// `(feas_tol, infeas_tol)` are reported as `Marginal`.
pub fn feasible_f64(a: &[Vec<f64>], b: &[f64], feas_tol: f64, infeas_tol: f64) -> Feasibility {
    let eps = 1e-12;
    match phase_one(a, b, &eps) {
        Some(opt) => {
            if opt <= feas_tol {
                Feasibility::Feasible
            } else if opt >= infeas_tol {
                Feasibility::Infeasible
            } else {
                Feasibility::Marginal
            }
        }
        None => Feasibility::Marginal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn rational_feasibility_simplex_combination() {
        // Is (1/2, 1/2) a convex combination of (0,0),(1,0),(0,1),(1,1)?
        // Rows: x-coord, y-coord, sum-to-one.
        let a = vec![
            vec![rat_int(0), rat_int(1), rat_int(0), rat_int(1)],
            vec![rat_int(0), rat_int(0), rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(1), rat_int(1), rat_int(1)],
        ];
        let b = vec![rat(1, 2), rat(1, 2), rat_int(1)];
        assert!(feasible_rational(&a, &b));
        // (2, 0) is outside the unit square.
        let b2 = vec![rat_int(2), rat_int(0), rat_int(1)];
        assert!(!feasible_rational(&a, &b2));
    }

    #[test]
    fn f64_feasibility_margins() {
        let a = vec![vec![1.0, -1.0], vec![1.0, 1.0]];
        let b = vec![0.0, 1.0];
        assert_eq!(feasible_f64(&a, &b, 1e-9, 1e-6), Feasibility::Feasible);
        let b_bad = vec![5.0, 1.0];
        assert_eq!(feasible_f64(&a, &b_bad, 1e-9, 1e-6), Feasibility::Infeasible);
    }

    #[test]
    fn zero_rhs_is_always_feasible() {
        let a = vec![vec![rat_int(3), rat_int(-2)]];
        let b = vec![rat_int(0)];
        assert!(feasible_rational(&a, &b));
    }

    #[test]
    fn infeasible_negative_rhs_single_nonneg_var() {
        // x = -1 with x >= 0 is infeasible.
        let a = vec![vec![rat_int(1)]];
        let b = vec![rat_int(-1)];
        assert!(!feasible_rational(&a, &b));
    }
}
