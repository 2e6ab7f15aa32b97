//! Small dense linear algebra over exact rationals and over `f64`.
//!
//! Everything here is written for desk scale (dimension at most 7 after
//! homogenization, a few dozen vectors); clarity and exactness win over
//! asymptotics.

use crate::rat::{Int, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub type QVec = Vec<Rat>;

pub fn qvec_from_i64(v: &[i64]) -> QVec {
    v.iter().map(|&x| crate::rat::rat_int(x)).collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn sub(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Rat], s: &Rat) -> QVec {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Rat]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn dot_i64(a: &[i64], b: &[i64]) -> i128 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x as i128) * (y as i128))
        .sum()
}

/// Reduced row echelon form in place. Returns the pivot column of each
/// pivot row, so `pivots.len()` is the rank.
pub fn rref(rows: &mut Vec<QVec>) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        rows[r] = scale(&rows[r], &inv);
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let scaled = scale(&rows[r], &f);
                rows[i] = sub(&rows[i], &scaled);
            }
        }
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    pivots
}

pub fn rank(vectors: &[QVec]) -> usize {
    let mut rows = vectors.to_vec();
    rref(&mut rows).len()
}

/// A basis (subset of echelon rows) of the span of `vectors`.
pub fn row_space_basis(vectors: &[QVec]) -> Vec<QVec> {
    let mut rows = vectors.to_vec();
    let pivots = rref(&mut rows);
    rows.truncate(pivots.len());
    rows
}

/// Basis of `{x : <v, x> = 0 for all v in vectors}`.
pub fn nullspace(vectors: &[QVec], dim: usize) -> Vec<QVec> {
    let mut rows = vectors.to_vec();
    let pivots = rref(&mut rows);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..dim {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); dim];
        v[free] = crate::rat::rat_one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves `sum_i c_i basis_i = x` exactly; `None` when `x` is outside the span.
pub fn solve_in_span(basis: &[QVec], x: &[Rat]) -> Option<Vec<Rat>> {
    let dim = x.len();
    let k = basis.len();
    if k == 0 {
        return if is_zero_vec(x) { Some(vec![]) } else { None };
    }
    // Augmented system [basis^T | x], eliminate.
    let mut rows: Vec<QVec> = (0..dim)
        .map(|i| {
            let mut row: QVec = basis.iter().map(|b| b[i].clone()).collect();
            row.push(x[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut rows);
    let mut coeffs = vec![Rat::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        if c == k {
            return None; // pivot in the augmented column: inconsistent
        }
        coeffs[c] = rows[r][k].clone();
    }
    Some(coeffs)
}

/// Orthogonal projection of `x` onto `span(basis)`, exact.
pub fn project_onto_span(basis: &[QVec], x: &[Rat]) -> QVec {
    let dim = x.len();
    let k = basis.len();
    if k == 0 {
        return vec![Rat::zero(); dim];
    }
    // Normal equations G c = B^T x with G the Gram matrix of the basis.
    let mut rows: Vec<QVec> = (0..k)
        .map(|i| {
            let mut row: QVec = (0..k).map(|j| dot(&basis[i], &basis[j])).collect();
            row.push(dot(&basis[i], x));
            row
        })
        .collect();
    let pivots = rref(&mut rows);
    debug_assert_eq!(pivots.len(), k, "basis must be linearly independent");
    let mut p = vec![Rat::zero(); dim];
    for (r, &c) in pivots.iter().enumerate() {
        debug_assert_eq!(c, r);
        let coeff = rows[r][k].clone();
        for i in 0..dim {
            p[i] += &coeff * &basis[r][i];
        }
    }
    p
}

/// Determinant of a square rational matrix.
pub fn det(mut m: Vec<QVec>) -> Rat {
    let n = m.len();
    let mut result = crate::rat::rat_one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(c, p);
            result = -result;
        }
        result *= m[c][c].clone();
        let inv = m[c][c].recip();
        for i in (c + 1)..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    result
}

/// Clears denominators and divides by the content, preserving sign.
/// Returns the primitive integer vector parallel to `v`.
pub fn primitive_integer_vector(v: &[Rat]) -> Vec<Int> {
    let mut lcm = BigInt::from(1);
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<Int> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    ints.iter().map(|x| x / &g).collect()
}

/// Saturated integer kernel of an integer matrix: a lattice basis of
/// `{x in Z^d : A x = 0}`. Computed by unimodular column reduction, so the
/// result generates every integer solution, not just a finite-index sublattice.
pub fn integer_kernel(a: &[Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
    // Work on a copy of A while accumulating the column operations in V.
    let nrows = a.len();
    let mut m: Vec<Vec<Int>> = a.to_vec();
    let mut v: Vec<Vec<Int>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                .collect()
        })
        .collect();
    // v is stored as columns: v[c] is the c-th column of V.
    let col = |m: &Vec<Vec<Int>>, c: usize, r: usize| m[r][c].clone();
    let mut pivot_col = 0usize;
    for row in 0..nrows {
        if pivot_col >= dim {
            break;
        }
        // Euclidean elimination across columns pivot_col..dim on this row.
        loop {
            let mut best: Option<usize> = None;
            for c in pivot_col..dim {
                if !m[row][c].is_zero()
                    && best.is_none_or(|b| m[row][c].abs() < m[row][b].abs())
                {
                    best = Some(c);
                }
            }
            let Some(b) = best else { break };
            if b != pivot_col {
                for r in 0..nrows {
                    m[r].swap(pivot_col, b);
                }
                v.swap(pivot_col, b);
            }
            let mut done = true;
            let p = col(&m, pivot_col, row);
            for c in (pivot_col + 1)..dim {
                if m[row][c].is_zero() {
                    continue;
                }
                let q = &m[row][c] / &p; // truncated division
                if !q.is_zero() {
                    for r in 0..nrows {
                        let t = &q * &m[r][pivot_col];
                        m[r][c] -= t;
                    }
                    for r in 0..dim {
                        let t = &q * &v[pivot_col][r];
                        v[c][r] -= t;
                    }
                }
                if !m[row][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !m[row][pivot_col].is_zero() {
            pivot_col += 1;
        }
    }
    // Columns whose image is entirely zero form the kernel basis.
    let mut kernel = Vec::new();
    for c in 0..dim {
        if (0..nrows).all(|r| m[r][c].is_zero()) {
            kernel.push(v[c].clone());
        }
    }
    kernel
}

/// `det(B B^T)` of an integer basis, i.e. the squared covolume of the
/// lattice the rows generate.
pub fn gram_det(basis: &[Vec<Int>]) -> Int {
    let k = basis.len();
    if k == 0 {
        return BigInt::from(1);
    }
    let gram: Vec<QVec> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for (x, y) in basis[i].iter().zip(&basis[j]) {
                        acc += x * y;
                    }
                    Rat::from_integer(acc)
                })
                .collect()
        })
        .collect();
    let d = det(gram);
    debug_assert!(d.denom().to_u32() == Some(1));
    d.to_integer()
}

// ---------------------------------------------------------------------------
// f64 helpers for the Monte Carlo paths
// ---------------------------------------------------------------------------

pub fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_f64(a: &[f64]) -> f64 {
    dot_f64(a, a).sqrt()
}

pub fn to_f64_vec(v: &[Rat]) -> Vec<f64> {
    v.iter().map(crate::rat::rat_to_f64).collect()
}

/// Gram-Schmidt; near-dependent vectors (relative to `tol`) are dropped.
pub fn orthonormalize_f64(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            // re-orthogonalize once for stability
            for b in &basis {
                let c = dot_f64(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let n = norm_f64(&w);
        if n > tol {
            for wi in &mut w {
                *wi /= n;
            }
            basis.push(w);
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(vectors)` in R^dim.
pub fn orthonormal_complement_f64(vectors: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut basis = orthonormalize_f64(vectors, 1e-10);
    let target = dim - basis.len();
    let mut complement = Vec::new();
    for i in 0..dim {
        if complement.len() == target {
            break;
        }
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        let before = basis.len();
        basis = {
            let mut all = basis;
            all.push(e);
            orthonormalize_f64(&all, 1e-10)
        };
        if basis.len() > before {
            complement.push(basis.last().unwrap().clone());
        }
    }
    complement
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn qv(v: &[i64]) -> QVec {
        qvec_from_i64(v)
    }

    #[test]
    fn rref_rank_and_nullspace() {
        let rows = vec![qv(&[1, 2, 3]), qv(&[2, 4, 6]), qv(&[0, 1, 1])];
        assert_eq!(rank(&rows), 2);
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        for r in &rows {
            assert!(dot(r, &ns[0]).is_zero());
        }
    }

    #[test]
    fn solve_in_span_works() {
        let basis = vec![qv(&[1, 0, 1]), qv(&[0, 1, 1])];
        let x = qv(&[2, 3, 5]);
        let c = solve_in_span(&basis, &x).unwrap();
        assert_eq!(c, vec![rat_int(2), rat_int(3)]);
        assert!(solve_in_span(&basis, &qv(&[0, 0, 1])).is_none());
    }

    #[test]
    fn projection_is_orthogonal() {
        let basis = vec![qv(&[1, 1, 0])];
        let x = qv(&[1, 0, 0]);
        let p = project_onto_span(&basis, &x);
        assert_eq!(p, vec![rat(1, 2), rat(1, 2), rat_int(0)]);
        let q = sub(&x, &p);
        assert!(dot(&q, &basis[0]).is_zero());
    }

    #[test]
    fn det_small() {
        let m = vec![qv(&[2, 0]), qv(&[0, 3])];
        assert_eq!(det(m), rat_int(6));
        let singular = vec![qv(&[1, 2]), qv(&[2, 4])];
        assert_eq!(det(singular), rat_int(0));
    }

    #[test]
    fn primitive_vector_clears_denominators() {
        let v = vec![rat(1, 2), rat(3, 4), rat_int(0)];
        let p = primitive_integer_vector(&v);
        assert_eq!(p, vec![Int::from(2), Int::from(3), Int::from(0)]);
    }

    #[test]
    fn integer_kernel_is_saturated() {
        // Kernel of [1 1 2] contains (1,1,-1) which is NOT in the span of
        // the naive cleared-denominator vectors (2,0,-1),(0,2,-1).
        let a = vec![vec![Int::from(1), Int::from(1), Int::from(2)]];
        let k = integer_kernel(&a, 3);
        assert_eq!(k.len(), 2);
        // (1,1,-1) must be an integer combination of the basis.
        let target = qv(&[1, 1, -1]);
        let basis: Vec<QVec> = k
            .iter()
            .map(|b| b.iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect();
        let c = solve_in_span(&basis, &target).unwrap();
        for ci in c {
            assert_eq!(ci.denom(), &Int::from(1));
        }
    }

    #[test]
    fn gram_det_diagonal_segment() {
        // Lattice generated by (1,1): covolume^2 = 2.
        let basis = vec![vec![Int::from(1), Int::from(1)]];
        assert_eq!(gram_det(&basis), Int::from(2));
    }

    #[test]
    fn orthonormal_complement_dims() {
        let v = vec![vec![1.0, 1.0, 0.0]];
        let comp = orthonormal_complement_f64(&v, 3);
        assert_eq!(comp.len(), 2);
        for c in &comp {
            assert!(dot_f64(c, &v[0]).abs() < 1e-9);
            assert!((norm_f64(c) - 1.0).abs() < 1e-9);
        }
    }
}
