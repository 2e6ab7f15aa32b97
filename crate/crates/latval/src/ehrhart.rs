//! Dilation-polynomial fitting and basis transforms.
//!
//! Exact fits interpolate rational values on integer nodes and verify the
//! spare nodes reproduce exactly, which catches both degree mistakes and
//! enumeration bugs. Statistical fits are weighted least squares over Monte
//! Carlo values with per-coefficient standard errors from the normal
//! equations. The binomial ("h-star") basis uses the shifted binomials
//! `C(t + r - j, r)`, j = 0..=r.

use crate::error::FitError;
use crate::linalg::{self, QVec};
use crate::rat::{format_rat, rat_int, rat_to_f64, Rat};
use num_traits::{Signed, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    Monomial,
    Binomial,
}

#[derive(Debug, Clone, Serialize)]
pub enum Coefficient {
    Exact(#[serde(serialize_with = "ser_rat")] Rat),
    Estimated { value: f64, stderr: f64 },
}

fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rat(r))
}

impl Coefficient {
    pub fn value_f64(&self) -> f64 {
        match self {
            Coefficient::Exact(r) => rat_to_f64(r),
            Coefficient::Estimated { value, .. } => *value,
        }
    }

    pub fn stderr(&self) -> f64 {
        match self {
            Coefficient::Exact(_) => 0.0,
            Coefficient::Estimated { stderr, .. } => *stderr,
        }
    }

    pub fn exact_value(&self) -> Option<&Rat> {
        match self {
            Coefficient::Exact(r) => Some(r),
            Coefficient::Estimated { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FittedPolynomial {
    pub degree: usize,
    pub basis: Basis,
    /// `coeffs[i]` multiplies `t^i` (monomial) or `C(t + r - i, r)` (binomial).
    pub coeffs: Vec<Coefficient>,
}

impl FittedPolynomial {
    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.exact_value().is_some())
    }

    /// Exact evaluation; requires exact coefficients and monomial basis.
    pub fn eval_exact(&self, t: &Rat) -> Option<Rat> {
        if self.basis != Basis::Monomial {
            return None;
        }
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c.exact_value()?;
        }
        Some(acc)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        match self.basis {
            Basis::Monomial => self
                .coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * t + c.value_f64()),
            Basis::Binomial => {
                let r = self.degree;
                let basis = binomial_basis_polynomials(r);
                self.coeffs
                    .iter()
                    .zip(&basis)
                    .map(|(c, b)| {
                        let bv = b
                            .iter()
                            .rev()
                            .fold(0.0, |acc, x| acc * t + rat_to_f64(x));
                        c.value_f64() * bv
                    })
                    .sum()
            }
        }
    }
}

/// Exact interpolation through `(n, value)` pairs. Uses the first
/// `degree + 1` nodes to solve and checks every remaining node exactly.
pub fn fit_exact(values: &[(i64, Rat)], degree: usize) -> Result<FittedPolynomial, FitError> {
    let needed = degree + 1;
    if values.len() < needed {
        return Err(FitError::NotEnoughNodes {
            degree,
            needed,
            got: values.len(),
        });
    }
    for (i, (n, _)) in values.iter().enumerate() {
        if values[..i].iter().any(|(m, _)| m == n) {
            return Err(FitError::DuplicateNode(*n));
        }
    }
    // Vandermonde solve on the first degree+1 nodes.
    let mut rows: Vec<QVec> = Vec::with_capacity(needed);
    for (n, v) in &values[..needed] {
        let t = rat_int(*n);
        let mut row: QVec = Vec::with_capacity(needed + 1);
        let mut p = rat_int(1);
        for _ in 0..needed {
            row.push(p.clone());
            p *= &t;
        }
        row.push(v.clone());
        rows.push(row);
    }
    let pivots = linalg::rref(&mut rows);
    debug_assert_eq!(pivots.len(), needed, "distinct nodes give full rank");
    let mut coeffs = vec![Rat::zero(); needed];
    for (r, &c) in pivots.iter().enumerate() {
        coeffs[c] = rows[r][needed].clone();
    }
    let poly = FittedPolynomial {
        degree,
        basis: Basis::Monomial,
        coeffs: coeffs.into_iter().map(Coefficient::Exact).collect(),
    };
    // Spare nodes double as consistency witnesses.
    for (n, v) in &values[needed..] {
        let got = poly.eval_exact(&rat_int(*n)).expect("exact monomial fit");
        if &got != v {
            return Err(FitError::InconsistentValues { degree, node: *n });
        }
    }
    Ok(poly)
}

/// Weighted least squares through `(n, value, stderr)` with covariance from
/// the weighted normal equations.
pub fn fit_statistical(
    values: &[(i64, f64, f64)],
    degree: usize,
) -> Result<FittedPolynomial, FitError> {
    let ncoef = degree + 1;
    if values.len() < ncoef {
        return Err(FitError::NotEnoughNodes {
            degree,
            needed: ncoef,
            got: values.len(),
        });
    }
    if values.iter().any(|(_, _, se)| *se <= 0.0) {
        return Err(FitError::NonPositiveStderr);
    }
    // Normal equations: (X^T W X) c = X^T W y.
    let mut xtx = vec![vec![0.0; ncoef]; ncoef];
    let mut xty = vec![0.0; ncoef];
    for (n, y, se) in values {
        let w = 1.0 / (se * se);
        let mut pow = vec![1.0; ncoef];
        for i in 1..ncoef {
            pow[i] = pow[i - 1] * (*n as f64);
        }
        for i in 0..ncoef {
            xty[i] += w * pow[i] * y;
            for j in 0..ncoef {
                xtx[i][j] += w * pow[i] * pow[j];
            }
        }
    }
    let inv = invert_f64(&xtx).ok_or(FitError::IllConditioned)?;
    let coeffs: Vec<Coefficient> = (0..ncoef)
        .map(|i| {
            let value = (0..ncoef).map(|j| inv[i][j] * xty[j]).sum();
            Coefficient::Estimated {
                value,
                stderr: inv[i][i].max(0.0).sqrt(),
            }
        })
        .collect();
    Ok(FittedPolynomial {
        degree,
        basis: Basis::Monomial,
        coeffs,
    })
}

fn invert_f64(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let (p, max) = (c..n)
            .map(|i| (i, a[i][c].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if !max.is_finite() || max < 1e-12 {
            return None;
        }
        a.swap(c, p);
        let piv = a[c][c];
        for v in a[c].iter_mut() {
            *v /= piv;
        }
        for i in 0..n {
            if i != c {
                let f = a[i][c];
                if f != 0.0 {
                    let row = a[c].clone();
                    for (v, r) in a[i].iter_mut().zip(&row) {
                        *v -= f * r;
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Monomial coefficients of `C(t + r - j, r)` for j = 0..=r.
fn binomial_basis_polynomials(r: usize) -> Vec<Vec<Rat>> {
    let mut out = Vec::with_capacity(r + 1);
    let mut r_fact = rat_int(1);
    for i in 2..=r as i64 {
        r_fact *= rat_int(i);
    }
    for j in 0..=r {
        // product over i = 0..r of (t + r - j - i)
        let mut poly: Vec<Rat> = vec![rat_int(1)];
        for i in 0..r {
            let shift = rat_int(r as i64 - j as i64 - i as i64);
            // poly * (t + shift)
            let mut next = vec![Rat::zero(); poly.len() + 1];
            for (p, c) in poly.iter().enumerate() {
                next[p + 1] += c;
                next[p] += c * &shift;
            }
            poly = next;
        }
        for c in &mut poly {
            *c /= &r_fact;
        }
        out.push(poly);
    }
    out
}

/// Change of basis monomial -> binomial (h-star coefficients). Exact
/// coefficients stay exact; estimated coefficients propagate their standard
/// errors through the linear transform.
pub fn to_hstar(p: &FittedPolynomial) -> FittedPolynomial {
    assert_eq!(p.basis, Basis::Monomial, "input must be in the monomial basis");
    let r = p.degree;
    let basis = binomial_basis_polynomials(r);
    // Solve M h = c where column j of M holds the monomial coefficients of
    // the j-th binomial basis polynomial.
    let mut rows: Vec<QVec> = (0..=r)
        .map(|i| (0..=r).map(|j| basis[j][i].clone()).collect())
        .collect();
    if p.is_exact() {
        for (i, row) in rows.iter_mut().enumerate() {
            row.push(p.coeffs[i].exact_value().unwrap().clone());
        }
        let pivots = linalg::rref(&mut rows);
        debug_assert_eq!(pivots.len(), r + 1);
        let mut h = vec![Rat::zero(); r + 1];
        for (row, &c) in pivots.iter().enumerate() {
            h[c] = rows[row][r + 1].clone();
        }
        FittedPolynomial {
            degree: r,
            basis: Basis::Binomial,
            coeffs: h.into_iter().map(Coefficient::Exact).collect(),
        }
    } else {
        // Invert M exactly, then apply to the float coefficients.
        let m_inv = rational_inverse(&rows);
        let coeffs = (0..=r)
            .map(|i| {
                let mut value = 0.0;
                let mut var = 0.0;
                for j in 0..=r {
                    let w = rat_to_f64(&m_inv[i][j]);
                    value += w * p.coeffs[j].value_f64();
                    var += (w * p.coeffs[j].stderr()).powi(2);
                }
                Coefficient::Estimated {
                    value,
                    stderr: var.sqrt(),
                }
            })
            .collect();
        FittedPolynomial {
            degree: r,
            basis: Basis::Binomial,
            coeffs,
        }
    }
}

/// Inverse transform: binomial (h-star) -> monomial.
pub fn from_hstar(p: &FittedPolynomial) -> FittedPolynomial {
    assert_eq!(p.basis, Basis::Binomial, "input must be in the binomial basis");
    let r = p.degree;
    let basis = binomial_basis_polynomials(r);
    if p.is_exact() {
        let mut coeffs = vec![Rat::zero(); r + 1];
        for (j, h) in p.coeffs.iter().enumerate() {
            let h = h.exact_value().unwrap();
            for i in 0..=r {
                coeffs[i] += h * &basis[j][i];
            }
        }
        FittedPolynomial {
            degree: r,
            basis: Basis::Monomial,
            coeffs: coeffs.into_iter().map(Coefficient::Exact).collect(),
        }
    } else {
        let coeffs = (0..=r)
            .map(|i| {
                let mut value = 0.0;
                let mut var = 0.0;
                for j in 0..=r {
                    let w = rat_to_f64(&basis[j][i]);
                    value += w * p.coeffs[j].value_f64();
                    var += (w * p.coeffs[j].stderr()).powi(2);
                }
                Coefficient::Estimated {
                    value,
                    stderr: var.sqrt(),
                }
            })
            .collect();
        FittedPolynomial {
            degree: r,
            basis: Basis::Monomial,
            coeffs,
        }
    }
}

fn rational_inverse(m_rows: &[QVec]) -> Vec<QVec> {
    let n = m_rows.len();
    let mut rows: Vec<QVec> = m_rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: QVec = row[..n].to_vec();
            for j in 0..n {
                r.push(if i == j { rat_int(1) } else { Rat::zero() });
            }
            r
        })
        .collect();
    let pivots = linalg::rref(&mut rows);
    debug_assert_eq!(pivots.len(), n);
    (0..n).map(|i| rows[i][n..].to_vec()).collect()
}

/// Parity residuals: largest magnitude among coefficients that should vanish
/// for a polynomial that is even or odd of the given parity.
pub fn parity_residual(p: &FittedPolynomial, even: bool) -> (f64, f64) {
    let mut worst = 0.0f64;
    let mut worst_se = 0.0f64;
    for (i, c) in p.coeffs.iter().enumerate() {
        let should_vanish = if even { i % 2 == 1 } else { i % 2 == 0 };
        if should_vanish && c.value_f64().abs() > worst {
            worst = c.value_f64().abs();
            worst_se = c.stderr();
        }
    }
    (worst, worst_se)
}

/// Reciprocity check for exact discrete-volume polynomials:
/// `p(-n) = (-1)^dim * (interior count of the n-dilate)`.
pub fn reciprocity_residual_exact(
    poly: &FittedPolynomial,
    dim: usize,
    interior_counts: &[(i64, u64)],
) -> Option<Vec<(i64, Rat)>> {
    let sign = if dim % 2 == 0 { 1 } else { -1 };
    let mut residuals = Vec::new();
    for (n, count) in interior_counts {
        let v = poly.eval_exact(&rat_int(-n))?;
        let expect = rat_int(sign * *count as i64);
        residuals.push((*n, (v - expect).abs()));
    }
    Some(residuals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn exact_fit_unit_square_count() {
        // (n+1)^2 at n = 0..4.
        let values: Vec<(i64, Rat)> = (0..5).map(|n| (n, rat_int((n + 1) * (n + 1)))).collect();
        let p = fit_exact(&values, 2).unwrap();
        let c: Vec<&Rat> = p.coeffs.iter().map(|c| c.exact_value().unwrap()).collect();
        assert_eq!(*c[0], rat_int(1));
        assert_eq!(*c[1], rat_int(2));
        assert_eq!(*c[2], rat_int(1));
    }

    #[test]
    fn exact_fit_detects_inconsistency() {
        let mut values: Vec<(i64, Rat)> = (0..4).map(|n| (n, rat_int(n * n))).collect();
        values.push((4, rat_int(17))); // not n^2
        let err = fit_exact(&values, 2).unwrap_err();
        assert!(matches!(err, FitError::InconsistentValues { node: 4, .. }));
    }

    #[test]
    fn exact_fit_reeve_polynomial() {
        // h = 5: L(t) = (5/6)t^3 + t^2 + (7/6)t + 1.
        let l = |t: i64| {
            rat(5, 6) * rat_int(t * t * t)
                + rat_int(t * t)
                + rat(7, 6) * rat_int(t)
                + rat_int(1)
        };
        let values: Vec<(i64, Rat)> = (0..6).map(|n| (n, l(n))).collect();
        let p = fit_exact(&values, 3).unwrap();
        let c: Vec<&Rat> = p.coeffs.iter().map(|c| c.exact_value().unwrap()).collect();
        assert_eq!(*c[3], rat(5, 6));
        assert_eq!(*c[2], rat_int(1));
        assert_eq!(*c[1], rat(7, 6));
        assert_eq!(*c[0], rat_int(1));
    }

    #[test]
    fn statistical_fit_recovers_quadratic() {
        // y = t^2 with tiny noise-free stderr floor.
        let values: Vec<(i64, f64, f64)> =
            (1..7).map(|n| (n, (n * n) as f64, 1e-6)).collect();
        let p = fit_statistical(&values, 2).unwrap();
        assert!((p.coeffs[2].value_f64() - 1.0).abs() < 1e-6);
        assert!(p.coeffs[1].value_f64().abs() < 3.0 * p.coeffs[1].stderr() + 1e-6);
        assert!(p.coeffs[0].value_f64().abs() < 3.0 * p.coeffs[0].stderr() + 1e-6);
    }

    #[test]
    fn statistical_fit_rejects_bad_stderr() {
        let values = vec![(1, 1.0, 0.0), (2, 4.0, 1e-3), (3, 9.0, 1e-3)];
        assert!(matches!(
            fit_statistical(&values, 2),
            Err(FitError::NonPositiveStderr)
        ));
    }

    #[test]
    fn hstar_of_unit_segment_count() {
        // L(t) = t + 1 = 1 * C(t+1, 1) + 0 * C(t, 1).
        let p = fit_exact(&[(0, rat_int(1)), (1, rat_int(2)), (2, rat_int(3))], 1).unwrap();
        let h = to_hstar(&p);
        assert_eq!(*h.coeffs[0].exact_value().unwrap(), rat_int(1));
        assert_eq!(*h.coeffs[1].exact_value().unwrap(), rat_int(0));
    }

    #[test]
    fn hstar_round_trip_is_identity() {
        let values: Vec<(i64, Rat)> = (0..4)
            .map(|n| (n, rat(7, 3) * rat_int(n * n * n) + rat_int(2 * n) + rat_int(5)))
            .collect();
        let p = fit_exact(&values, 3).unwrap();
        let back = from_hstar(&to_hstar(&p));
        for (a, b) in p.coeffs.iter().zip(&back.coeffs) {
            assert_eq!(a.exact_value().unwrap(), b.exact_value().unwrap());
        }
    }

    #[test]
    fn hstar_zero_polynomial() {
        let values: Vec<(i64, Rat)> = (0..4).map(|n| (n, Rat::zero())).collect();
        let p = fit_exact(&values, 2).unwrap();
        let h = to_hstar(&p);
        for c in &h.coeffs {
            assert!(c.exact_value().unwrap().is_zero());
        }
    }

    #[test]
    fn parity_residual_flags_even_component() {
        let p = FittedPolynomial {
            degree: 3,
            basis: Basis::Monomial,
            coeffs: vec![
                Coefficient::Estimated { value: 0.001, stderr: 0.01 },
                Coefficient::Estimated { value: 2.0, stderr: 0.01 },
                Coefficient::Estimated { value: -0.002, stderr: 0.01 },
                Coefficient::Estimated { value: 1.0, stderr: 0.01 },
            ],
        };
        // Odd polynomial: even-index coefficients should vanish.
        let (worst, _) = parity_residual(&p, false);
        assert!((worst - 0.002).abs() < 1e-12);
    }

    #[test]
    fn reciprocity_on_square_polynomial() {
        // L(t) = (t+1)^2, dim 2: L(-1) = 0, interior of 1-dilate = 0;
        // L(-2) = 1, interior of 2-dilate = 1.
        let values: Vec<(i64, Rat)> = (0..4).map(|n| (n, rat_int((n + 1) * (n + 1)))).collect();
        let p = fit_exact(&values, 2).unwrap();
        let res = reciprocity_residual_exact(&p, 2, &[(1, 0), (2, 1), (3, 4)]).unwrap();
        for (_, r) in res {
            assert!(r.is_zero());
        }
    }
}
