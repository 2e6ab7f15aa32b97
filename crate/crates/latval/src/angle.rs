//! Angle functionals of polyhedral cones: solid angles, conic intrinsic
//! volumes, Grassmann angles and their half-subspace modification.
//!
//! Solid angles are closed-form whenever the pointed quotient of the cone
//! (the cone modulo its lineality space) has dimension at most three:
//! dimension 0 gives 1, a ray gives 1/2, planar cones use the arc fraction
//! and 3-dimensional pointed cones the spherical-polygon excess. Everything
//! else is seeded Monte Carlo. Intrinsic volumes additionally have an exact
//! route through the face decomposition
//! `v_k(C) = sum over k-faces F of alpha(F) * alpha(N_F(C))`.
//!
//! Monte Carlo estimators never share a code path with the exact routes, so
//! the identity suite can compare them as independent witnesses.

use crate::cone::Cone;
use crate::linalg::{self, dot_f64, norm_f64, orthonormal_complement_f64, orthonormalize_f64};
use crate::mc::{self, McParams};
use crate::simplex::{feasible_f64, Feasibility};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Strict/tight decision margin for the floating-point geometry paths.
pub const MARGIN: f64 = 1e-9;
/// Gray-zone upper threshold for LP feasibility decisions.
const LP_INFEAS: f64 = 1e-6;
/// Absolute tolerance floor added on top of Monte Carlo standard errors when
/// closed-form (roundoff-limited) values enter a comparison.
pub const PRECISION_FLOOR: f64 = 1e-9;

/// A probability-normalized angle value together with its provenance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AngleEstimate {
    pub value: f64,
    pub exact: bool,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl AngleEstimate {
    pub fn exact(value: f64) -> Self {
        AngleEstimate {
            value,
            exact: true,
            stderr: 0.0,
            samples: 0,
            seed: 0,
        }
    }

    pub fn from_proportion(p: mc::Proportion, seed: u64) -> Self {
        AngleEstimate {
            value: p.value(),
            exact: false,
            stderr: p.stderr(),
            samples: p.trials,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntrinsicVolumeVector {
    /// `v[k]` estimates the k-th conic intrinsic volume, k = 0..=ambient_dim.
    pub v: Vec<AngleEstimate>,
}

impl IntrinsicVolumeVector {
    pub fn sum(&self) -> f64 {
        self.v.iter().map(|a| a.value).sum()
    }

    pub fn combined_stderr(&self) -> f64 {
        self.v.iter().map(|a| a.stderr * a.stderr).sum::<f64>().sqrt()
    }
}

// ---------------------------------------------------------------------------
// Solid angle
// ---------------------------------------------------------------------------

/// Pointed quotient of a cone: generators projected onto the orthogonal
/// complement of the lineality space, in `f64`.
fn pointed_quotient_gens_f64(c: &Cone) -> Vec<Vec<f64>> {
    let lin = lineality_basis(c);
    let mut out = Vec::new();
    for g in c.generators() {
        let p = linalg::project_onto_span(&lin, g);
        let diff = linalg::sub(g, &p);
        let v = linalg::to_f64_vec(&diff);
        let n = norm_f64(&v);
        if n > 1e-12 {
            out.push(v.iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Basis of the lineality space (span of the minimal face).
fn lineality_basis(c: &Cone) -> Vec<crate::linalg::QVec> {
    c.faces()
        .first()
        .map(|f| f.span_basis.clone())
        .unwrap_or_default()
}

/// Closed-form solid angle when the pointed quotient has dimension <= 3.
pub fn solid_angle_exact(c: &Cone) -> Option<f64> {
    let pd = c.dim() - c.lineality_dim();
    match pd {
        0 => Some(1.0),
        1 => Some(0.5),
        2 => Some(planar_fraction(c)),
        3 => Some(spherical_polygon_fraction(c)),
        _ => None,
    }
}

/// Arc fraction of a pointed planar quotient cone.
fn planar_fraction(c: &Cone) -> f64 {
    let rays = quotient_ray_directions(c);
    assert_eq!(rays.len(), 2, "planar pointed cone has two extreme rays");
    let basis = orthonormalize_f64(&rays, 1e-12);
    let coords = |v: &[f64]| -> (f64, f64) {
        (
            dot_f64(v, &basis[0]),
            if basis.len() > 1 {
                dot_f64(v, &basis[1])
            } else {
                0.0
            },
        )
    };
    let (ax, ay) = coords(&rays[0]);
    let (bx, by) = coords(&rays[1]);
    let cross = (ax * by - ay * bx).abs();
    let dotp = ax * bx + ay * by;
    let angle = cross.atan2(dotp);
    angle / (2.0 * PI)
}

/// Spherical-polygon area fraction of a pointed 3-dimensional quotient cone.
fn spherical_polygon_fraction(c: &Cone) -> f64 {
    let rays = ordered_quotient_rays(c);
    let n = rays.len();
    assert!(n >= 3, "pointed 3-dimensional cone has at least three rays");
    let mut angle_sum = 0.0;
    for i in 0..n {
        let r = &rays[i];
        let prev = &rays[(i + n - 1) % n];
        let next = &rays[(i + 1) % n];
        let tangent = |to: &Vec<f64>| -> Vec<f64> {
            let c = dot_f64(to, r);
            let mut t: Vec<f64> = to.iter().zip(r).map(|(a, b)| a - c * b).collect();
            let nn = norm_f64(&t);
            for x in &mut t {
                *x /= nn;
            }
            t
        };
        let tp = tangent(prev);
        let tn = tangent(next);
        let d = dot_f64(&tp, &tn).clamp(-1.0, 1.0);
        // interior angle of a convex spherical polygon lies in (0, pi)
        angle_sum += d.acos();
    }
    let area = angle_sum - (n as f64 - 2.0) * PI;
    area / (4.0 * PI)
}

/// Unit directions of the quotient's extreme rays (faces one dimension above
/// the lineality space), unordered.
fn quotient_ray_directions(c: &Cone) -> Vec<Vec<f64>> {
    let lin = lineality_basis(c);
    let target = c.lineality_dim() + 1;
    c.faces_of_dim(target)
        .map(|(_, f)| {
            for &gi in &f.generators {
                let g = &c.generators()[gi];
                let p = linalg::project_onto_span(&lin, g);
                let v = linalg::to_f64_vec(&linalg::sub(g, &p));
                let n = norm_f64(&v);
                if n > 1e-12 {
                    return v.iter().map(|x| x / n).collect();
                }
            }
            unreachable!("a face above the lineality space has a generator outside it")
        })
        .collect()
}

/// Extreme-ray directions of a 3-dimensional pointed quotient, cyclically
/// ordered by walking the 2-face adjacency.
fn ordered_quotient_rays(c: &Cone) -> Vec<Vec<f64>> {
    let ell = c.lineality_dim();
    let ray_faces: Vec<usize> = c.faces_of_dim(ell + 1).map(|(i, _)| i).collect();
    let dirs = quotient_ray_directions(c);
    debug_assert_eq!(ray_faces.len(), dirs.len());
    let contains = |sup: &[usize], sub: &[usize]| sub.iter().all(|x| sup.contains(x));
    // Each (ell+2)-face joins exactly two quotient rays.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ray_faces.len()];
    for (_, f2) in c.faces_of_dim(ell + 2) {
        let members: Vec<usize> = ray_faces
            .iter()
            .enumerate()
            .filter(|(_, &rf)| contains(&f2.generators, &c.faces()[rf].generators))
            .map(|(pos, _)| pos)
            .collect();
        debug_assert_eq!(members.len(), 2, "quotient 2-face joins exactly two rays");
        adj[members[0]].push(members[1]);
        adj[members[1]].push(members[0]);
    }
    let mut order = vec![0usize];
    let mut prev = usize::MAX;
    while order.len() < ray_faces.len() {
        let cur = *order.last().unwrap();
        let next = adj[cur]
            .iter()
            .copied()
            .find(|&x| x != prev)
            .expect("ray adjacency of a pointed 3D cone is a single cycle");
        prev = cur;
        order.push(next);
    }
    order.into_iter().map(|i| dirs[i].clone()).collect()
}

/// Solid angle of a cone, measured inside its linear span: closed-form when
/// the pointed quotient has dimension <= 3, uniform sphere sampling above.
pub fn solid_angle(c: &Cone, params: McParams) -> AngleEstimate {
    if let Some(v) = solid_angle_exact(c) {
        return AngleEstimate::exact(v);
    }
    // Sample on the unit sphere of the pointed quotient's span.
    let gens = pointed_quotient_gens_f64(c);
    let basis = orthonormalize_f64(&gens, 1e-10);
    let pd = basis.len();
    debug_assert_eq!(pd, c.dim() - c.lineality_dim());
    // Facet normals expressed in quotient coordinates.
    let facets: Vec<Vec<f64>> = c
        .facet_normals()
        .iter()
        .map(|a| {
            let af = linalg::to_f64_vec(a);
            basis.iter().map(|b| dot_f64(&af, b)).collect()
        })
        .collect();
    let prop = mc::estimate_proportion(params, |rng| {
        let z = mc::sphere_sample(rng, pd);
        Some(facets.iter().all(|a| dot_f64(a, &z) <= 0.0))
    });
    AngleEstimate::from_proportion(prop, params.seed)
}

// ---------------------------------------------------------------------------
// Conic intrinsic volumes
// ---------------------------------------------------------------------------

/// Exact intrinsic volumes via the face decomposition, available when every
/// face angle and normal-cone angle is closed-form. Values are `f64` because
/// the angles themselves are generally irrational.
pub fn intrinsic_volumes_exact(c: &Cone) -> Option<Vec<f64>> {
    let d = c.ambient_dim();
    let mut v = vec![0.0; d + 1];
    for (idx, face) in c.faces().iter().enumerate() {
        let face_cone = Cone::from_generators(
            c.ambient_dim(),
            face.generators
                .iter()
                .map(|&gi| c.generators()[gi].clone())
                .collect(),
        )
        .expect("face of a valid cone is a valid cone");
        let internal = solid_angle_exact(&face_cone)?;
        let external = solid_angle_exact(&c.normal_at_face(idx))?;
        v[face.dim] += internal * external;
    }
    Some(v)
}

/// Data shared by the per-sample metric projection in the Monte Carlo
/// estimator for intrinsic volumes.
struct MoreauSampler {
    faces: Vec<MoreauFace>,
    gens: Vec<Vec<f64>>,
    facets: Vec<Vec<f64>>,
}

struct MoreauFace {
    dim: usize,
    basis: Vec<Vec<f64>>,
    tight: u64,
}

impl MoreauSampler {
    fn new(c: &Cone) -> Self {
        let faces = c
            .faces()
            .iter()
            .map(|f| MoreauFace {
                dim: f.dim,
                basis: orthonormalize_f64(
                    &f.span_basis.iter().map(|b| linalg::to_f64_vec(b)).collect::<Vec<_>>(),
                    1e-12,
                ),
                tight: f.tight_facets,
            })
            .collect();
        let unit = |v: Vec<f64>| {
            let n = norm_f64(&v);
            v.iter().map(|x| x / n).collect::<Vec<f64>>()
        };
        MoreauSampler {
            faces,
            gens: c
                .generators()
                .iter()
                .map(|g| unit(linalg::to_f64_vec(g)))
                .collect(),
            facets: c
                .facet_normals()
                .iter()
                .map(|a| unit(linalg::to_f64_vec(a)))
                .collect(),
        }
    }

    /// Dimension of the face whose relative interior receives the projection
    /// of `x`, or `None` on a margin hit.
    ///
    /// Margins are asymmetric: facet strictness wants values clearly
    /// negative, while the polar-residual test must accept exact zeros (the
    /// residual is orthogonal to `lin C` whenever the cone is
    /// lower-dimensional, so `<g, q> = 0` is the generic, legitimate case).
    fn project_face_dim(&self, x: &[f64]) -> Option<usize> {
        const POLAR_ACCEPT: f64 = 1e-10;
        const POLAR_REJECT: f64 = 1e-7;
        let mut accepted: Option<usize> = None;
        for face in &self.faces {
            // p = projection of x onto span(face)
            let mut p = vec![0.0; x.len()];
            for b in &face.basis {
                let c = dot_f64(x, b);
                for (pi, bi) in p.iter_mut().zip(b) {
                    *pi += c * bi;
                }
            }
            let mut reject = false;
            let mut unsure = false;
            // Strictly inside every facet not containing the face.
            for (j, a) in self.facets.iter().enumerate() {
                if face.tight & (1 << j) != 0 {
                    continue;
                }
                let v = dot_f64(a, &p);
                if v >= MARGIN {
                    reject = true;
                    break;
                }
                if v > -MARGIN {
                    unsure = true;
                }
            }
            // Residual must land in the polar cone.
            if !reject {
                let q: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
                for g in &self.gens {
                    let v = dot_f64(g, &q);
                    if v >= POLAR_REJECT {
                        reject = true;
                        break;
                    }
                    if v > POLAR_ACCEPT {
                        unsure = true;
                    }
                }
            }
            if reject {
                continue;
            }
            if unsure || accepted.is_some() {
                return None; // margin hit or ambiguous acceptance
            }
            accepted = Some(face.dim);
        }
        accepted
    }
}

/// Monte Carlo conic intrinsic volumes: project a uniform sphere direction
/// onto the cone and bucket by the dimension of the receiving face. Linear
/// subspaces short-circuit to their exact distribution.
pub fn intrinsic_volumes(c: &Cone, params: McParams) -> IntrinsicVolumeVector {
    let d = c.ambient_dim();
    if c.is_linear_subspace() {
        let mut v = vec![AngleEstimate::exact(0.0); d + 1];
        v[c.dim()] = AngleEstimate::exact(1.0);
        return IntrinsicVolumeVector { v };
    }
    let sampler = MoreauSampler::new(c);
    let buckets = mc::estimate_buckets(params, d + 1, |rng| {
        let u = mc::sphere_sample(rng, d);
        sampler.project_face_dim(&u)
    });
    IntrinsicVolumeVector {
        v: (0..=d)
            .map(|k| AngleEstimate::from_proportion(buckets.proportion(k), params.seed))
            .collect(),
    }
}

/// Intrinsic volumes through the best available route: exact face
/// decomposition when closed-form, Monte Carlo otherwise.
pub fn intrinsic_volumes_hybrid(c: &Cone, params: McParams) -> IntrinsicVolumeVector {
    match intrinsic_volumes_exact(c) {
        Some(values) => IntrinsicVolumeVector {
            v: values.into_iter().map(AngleEstimate::exact).collect(),
        },
        None => intrinsic_volumes(c, params),
    }
}

// ---------------------------------------------------------------------------
// Grassmann angles
// ---------------------------------------------------------------------------

/// Per-cone data for the subspace-intersection estimators.
struct GrassmannSampler {
    d: usize,
    ell: usize,
    lin: Vec<Vec<f64>>,
    pointed_gens: Vec<Vec<f64>>,
}

impl GrassmannSampler {
    fn new(c: &Cone) -> Self {
        let lin_exact = lineality_basis(c);
        GrassmannSampler {
            d: c.ambient_dim(),
            ell: c.lineality_dim(),
            lin: orthonormalize_f64(
                &lin_exact.iter().map(|b| linalg::to_f64_vec(b)).collect::<Vec<_>>(),
                1e-12,
            ),
            pointed_gens: pointed_quotient_gens_f64(c),
        }
    }

    /// Draws a Haar subspace basis of the given dimension.
    fn draw_subspace(&self, rng: &mut ChaCha8Rng, dim: usize) -> Option<Vec<Vec<f64>>> {
        if dim == 0 {
            return Some(vec![]);
        }
        let cols = mc::gaussian_matrix(rng, dim, self.d);
        let basis = orthonormalize_f64(&cols, 1e-10);
        (basis.len() == dim).then_some(basis)
    }

    /// Does `C ∩ (W + L)` contain a nonzero point of the pointed part whose
    /// witness in `W` additionally satisfies an optional halfspace condition?
    ///
    /// `halfspace`: when `Some(u)`, the witness `y = x' + l` in `W` must have
    /// `<y, u> >= 0`.
    fn pointed_intersection(
        &self,
        w_basis: &[Vec<f64>],
        halfspace: Option<&[f64]>,
    ) -> Option<bool> {
        let m = self.pointed_gens.len();
        if m == 0 {
            return Some(false);
        }
        // Basis of V = W + L and its orthogonal complement.
        let mut v_vectors: Vec<Vec<f64>> = w_basis.to_vec();
        v_vectors.extend(self.lin.iter().cloned());
        let v_basis = orthonormalize_f64(&v_vectors, 1e-10);
        if v_basis.len() != w_basis.len() + self.ell {
            return None; // degenerate draw: W and L nearly intersect
        }
        let q = orthonormal_complement_f64(&v_basis, self.d);

        // Rows: <q_i, sum lambda_j g_j> = 0, optional halfspace with slack,
        // and sum lambda_j = 1.
        let use_halfspace = halfspace.is_some();
        let ncols = m + usize::from(use_halfspace);
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(q.len() + 2);
        let mut rhs: Vec<f64> = Vec::new();
        for qi in &q {
            let mut row: Vec<f64> = self.pointed_gens.iter().map(|g| dot_f64(qi, g)).collect();
            row.resize(ncols, 0.0);
            rows.push(row);
            rhs.push(0.0);
        }
        if let Some(u) = halfspace {
            let r = self.halfspace_functional(w_basis, u)?;
            let mut row: Vec<f64> = self.pointed_gens.iter().map(|g| dot_f64(&r, g)).collect();
            row.push(-1.0); // slack: r.x - s = 0, s >= 0
            rows.push(row);
            rhs.push(0.0);
        }
        let mut sum_row = vec![1.0; m];
        sum_row.resize(ncols, 0.0);
        rows.push(sum_row);
        rhs.push(1.0);

        match feasible_f64(&rows, &rhs, MARGIN, LP_INFEAS) {
            Feasibility::Feasible => Some(true),
            Feasibility::Infeasible => Some(false),
            Feasibility::Marginal => None,
        }
    }

    /// Linear functional `r` with `<r, x'> = <y(x'), u>` where `y(x')` is the
    /// unique point of `(x' + L) ∩ W` (defined a.s. when `dim W + ell <= d`).
    fn halfspace_functional(&self, w_basis: &[Vec<f64>], u: &[f64]) -> Option<Vec<f64>> {
        if self.ell == 0 {
            return Some(u.to_vec());
        }
        // y = x' + B_L beta with (I - P_W)(x' + B_L beta) = 0.
        // Solve M beta = -(I - P_W) x' in the least-squares sense, where
        // M = (I - P_W) B_L; then <y, u> = <x', u> + <B_L beta, u>.
        let proj_w = |x: &[f64]| -> Vec<f64> {
            let mut p = vec![0.0; self.d];
            for b in w_basis {
                let c = dot_f64(x, b);
                for (pi, bi) in p.iter_mut().zip(b) {
                    *pi += c * bi;
                }
            }
            p
        };
        let m_cols: Vec<Vec<f64>> = self
            .lin
            .iter()
            .map(|bl| {
                let p = proj_w(bl);
                bl.iter().zip(&p).map(|(a, b)| a - b).collect()
            })
            .collect();
        // Normal matrix N = M^T M (ell x ell).
        let ell = self.ell;
        let mut n = vec![vec![0.0; ell]; ell];
        for i in 0..ell {
            for j in 0..ell {
                n[i][j] = dot_f64(&m_cols[i], &m_cols[j]);
            }
        }
        let n_inv = invert_small(&n)?;
        // <y, u> = <x', u> + sum_i beta_i <B_L_i, u> with beta = -N^{-1} M^T x'
        // (M's columns are already W-orthogonal), so by transposition
        // r = u - sum_j (sum_i N^{-1}_{ji} <B_L_i, u>) M_col_j.
        let bl_u: Vec<f64> = self.lin.iter().map(|bl| dot_f64(bl, u)).collect();
        let coeffs: Vec<f64> = (0..ell)
            .map(|j| (0..ell).map(|i| n_inv[j][i] * bl_u[i]).sum())
            .collect();
        let mut r = u.to_vec();
        for (c, m_col) in coeffs.iter().zip(&m_cols) {
            for (ri, mi) in r.iter_mut().zip(m_col) {
                *ri -= c * mi;
            }
        }
        Some(r)
    }
}

/// Inverse of a small symmetric positive matrix; `None` when near-singular.
fn invert_small(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
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
        if max < 1e-10 {
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

/// Classical Grassmann angle: probability that a Haar-random subspace of
/// codimension `k` meets the cone nontrivially.
pub fn grassmann_angle(c: &Cone, k: usize, params: McParams) -> AngleEstimate {
    assert!(k <= c.ambient_dim());
    if c.dim() == 0 {
        return AngleEstimate::exact(0.0);
    }
    if k < c.lineality_dim() {
        return AngleEstimate::exact(1.0);
    }
    if k >= c.dim() {
        return AngleEstimate::exact(0.0);
    }
    debug_assert!(!c.is_linear_subspace());
    let w = c.ambient_dim() - k;
    let sampler = GrassmannSampler::new(c);
    if w + sampler.ell >= sampler.d {
        // W + L is the whole space: the pointed part always meets it.
        return AngleEstimate::exact(1.0);
    }
    let prop = mc::estimate_proportion(params, |rng| {
        let w_basis = sampler.draw_subspace(rng, w)?;
        sampler.pointed_intersection(&w_basis, None)
    });
    AngleEstimate::from_proportion(prop, params.seed)
}

/// Modified Grassmann angle: probability that a Haar-random closed
/// half-subspace of codimension `k` meets the cone nontrivially.
pub fn modified_grassmann_angle(c: &Cone, k: usize, params: McParams) -> AngleEstimate {
    let d = c.ambient_dim();
    assert!(k <= d);
    if c.dim() == 0 || k == d {
        return AngleEstimate::exact(0.0);
    }
    if k < c.lineality_dim() {
        return AngleEstimate::exact(1.0);
    }
    if k >= c.dim() {
        return AngleEstimate::exact(0.0);
    }
    debug_assert!(!c.is_linear_subspace());
    let w = d - k;
    let sampler = GrassmannSampler::new(c);
    let prop = mc::estimate_proportion(params, |rng| {
        let w_basis = sampler.draw_subspace(rng, w)?;
        let u = mc::sphere_sample(rng, d);
        sampler.pointed_intersection(&w_basis, Some(&u))
    });
    AngleEstimate::from_proportion(prop, params.seed)
}

/// Exact modified Grassmann angle from the exact intrinsic volumes (tail sum
/// above index `k`), when those are closed-form.
pub fn modified_grassmann_angle_exact(c: &Cone, k: usize) -> Option<f64> {
    if c.dim() == 0 {
        return Some(0.0);
    }
    let v = intrinsic_volumes_exact(c)?;
    Some(v.iter().skip(k + 1).sum())
}

/// Hybrid modified Grassmann angle: exact tail sum when available, LP Monte
/// Carlo otherwise.
pub fn modified_grassmann_angle_hybrid(c: &Cone, k: usize, params: McParams) -> AngleEstimate {
    match modified_grassmann_angle_exact(c, k) {
        Some(v) => AngleEstimate::exact(v),
        None => modified_grassmann_angle(c, k, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(d: usize, gens: &[&[i64]]) -> Cone {
        Cone::from_integer_generators(d, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    fn octant() -> Cone {
        cone(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])
    }

    #[test]
    fn exact_solid_angles() {
        let quadrant = cone(2, &[&[1, 0], &[0, 1]]);
        assert!((solid_angle_exact(&quadrant).unwrap() - 0.25).abs() < 1e-12);
        let halfspace = cone(3, &[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1]]);
        assert!((solid_angle_exact(&halfspace).unwrap() - 0.5).abs() < 1e-12);
        assert!((solid_angle_exact(&octant()).unwrap() - 0.125).abs() < 1e-12);
        let zero = Cone::from_generators(2, vec![]).unwrap();
        assert!((solid_angle_exact(&zero).unwrap() - 1.0).abs() < 1e-12);
        let full = Cone::full_space(3);
        assert!((solid_angle_exact(&full).unwrap() - 1.0).abs() < 1e-12);
        // Quarter-space: wedge with lineality 1 in R^3.
        let wedge = cone(3, &[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!((solid_angle_exact(&wedge).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn solid_angle_mc_matches_exact_in_4d() {
        // Orthant of R^4 embedded as a cone: exact value 1/16.
        let c = cone(
            4,
            &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]],
        );
        assert!(solid_angle_exact(&c).is_none());
        let est = solid_angle(&c, McParams::new(200_000, 11));
        assert!(!est.exact);
        assert!(
            (est.value - 0.0625).abs() < 4.0 * est.stderr + 1e-3,
            "got {} +- {}",
            est.value,
            est.stderr
        );
    }

    #[test]
    fn intrinsic_volumes_exact_quadrant() {
        let quadrant = cone(2, &[&[1, 0], &[0, 1]]);
        let v = intrinsic_volumes_exact(&quadrant).unwrap();
        assert!((v[0] - 0.25).abs() < 1e-12);
        assert!((v[1] - 0.5).abs() < 1e-12);
        assert!((v[2] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn intrinsic_volumes_exact_octant() {
        let v = intrinsic_volumes_exact(&octant()).unwrap();
        let expect = [0.125, 0.375, 0.375, 0.125];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn intrinsic_volumes_mc_agrees_with_exact() {
        let c = cone(3, &[&[1, 0, 0], &[1, 2, 0], &[1, 1, 3]]);
        let exact = intrinsic_volumes_exact(&c).unwrap();
        let est = intrinsic_volumes(&c, McParams::new(100_000, 5));
        for k in 0..=3 {
            let tol = 4.0 * est.v[k].stderr + 1e-3;
            assert!(
                (est.v[k].value - exact[k]).abs() < tol,
                "k={k}: {} vs {}",
                est.v[k].value,
                exact[k]
            );
        }
        assert!((est.sum() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn intrinsic_volumes_of_subspace() {
        let line = cone(3, &[&[1, 1, 0], &[-1, -1, 0]]);
        let v = intrinsic_volumes(&line, McParams::new(1000, 1));
        assert_eq!(v.v[1].value, 1.0);
        assert!(v.v[1].exact);
        assert_eq!(v.v[0].value, 0.0);
        let exact = intrinsic_volumes_exact(&line).unwrap();
        assert!((exact[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grassmann_chain_for_quadrant() {
        let quadrant = cone(2, &[&[1, 0], &[0, 1]]);
        let p = McParams::new(100_000, 9);
        let g0 = grassmann_angle(&quadrant, 0, p);
        let g1 = grassmann_angle(&quadrant, 1, p.derive(1));
        let g2 = grassmann_angle(&quadrant, 2, p.derive(2));
        assert_eq!(g0.value, 1.0);
        assert!(g0.exact);
        assert!((g1.value - 0.5).abs() < 4.0 * g1.stderr + 1e-3, "{}", g1.value);
        assert_eq!(g2.value, 0.0);
    }

    #[test]
    fn grassmann_subspace_values_are_exact() {
        // A plane in R^3: gamma_0 = gamma_1 = 1, gamma_2 = gamma_3 = 0.
        let plane = cone(3, &[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0]]);
        let p = McParams::new(1000, 3);
        for (k, expect) in [(0, 1.0), (1, 1.0), (2, 0.0), (3, 0.0)] {
            let g = grassmann_angle(&plane, k, p);
            assert!(g.exact);
            assert_eq!(g.value, expect, "k={k}");
        }
    }

    #[test]
    fn halfspace_meets_every_line() {
        let halfspace = cone(3, &[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1]]);
        let g = grassmann_angle(&halfspace, 2, McParams::new(50_000, 21));
        // gamma_{d-1}: a random line always meets a halfspace nontrivially.
        assert!(
            g.value > 1.0 - 4.0 * g.stderr - 1e-3,
            "gamma_2(halfspace) = {}",
            g.value
        );
    }

    #[test]
    fn modified_grassmann_basics() {
        let quadrant = cone(2, &[&[1, 0], &[0, 1]]);
        let p = McParams::new(100_000, 13);
        // alpha_1 = (gamma_1 + gamma_2)/2 = 1/4.
        let a1 = modified_grassmann_angle(&quadrant, 1, p);
        assert!((a1.value - 0.25).abs() < 4.0 * a1.stderr + 2e-3, "{}", a1.value);
        // alpha_0 = 1 - v_0 = 3/4.
        let a0 = modified_grassmann_angle(&quadrant, 0, p.derive(7));
        assert!((a0.value - 0.75).abs() < 4.0 * a0.stderr + 2e-3, "{}", a0.value);
        // alpha_d is identically 0.
        let a2 = modified_grassmann_angle(&quadrant, 2, p);
        assert_eq!(a2.value, 0.0);
        assert!(a2.exact);
    }

    #[test]
    fn modified_grassmann_exact_route() {
        let quadrant = cone(2, &[&[1, 0], &[0, 1]]);
        assert!((modified_grassmann_angle_exact(&quadrant, 0).unwrap() - 0.75).abs() < 1e-12);
        assert!((modified_grassmann_angle_exact(&quadrant, 1).unwrap() - 0.25).abs() < 1e-12);
        assert!((modified_grassmann_angle_exact(&quadrant, 2).unwrap() - 0.0).abs() < 1e-12);
        // dim C = k case: alpha_{k-1}(C) = alpha(C).
        let octant = super::tests::octant();
        let a2 = modified_grassmann_angle_exact(&octant, 2).unwrap();
        assert!((a2 - 0.125).abs() < 1e-12);
    }

    #[test]
    fn half_line_alpha0() {
        // alpha_0 of a half-line in R^1: 1/2 exactly via the exact route,
        // and via Monte Carlo.
        let ray = cone(1, &[&[1]]);
        assert!((modified_grassmann_angle_exact(&ray, 0).unwrap() - 0.5).abs() < 1e-12);
        let est = modified_grassmann_angle(&ray, 0, McParams::new(50_000, 2));
        assert!((est.value - 0.5).abs() < 4.0 * est.stderr + 2e-3, "{}", est.value);
    }

    #[test]
    fn dimension_invariance_of_angles() {
        // Embed the quadrant into R^3: gamma_1 and alpha_1 are unchanged.
        let embedded = cone(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let p = McParams::new(100_000, 17);
        let g1 = grassmann_angle(&embedded, 1, p);
        assert!((g1.value - 0.5).abs() < 4.0 * g1.stderr + 2e-3, "{}", g1.value);
        let a1 = modified_grassmann_angle(&embedded, 1, p.derive(3));
        assert!((a1.value - 0.25).abs() < 4.0 * a1.stderr + 2e-3, "{}", a1.value);
        let sa = solid_angle_exact(&embedded).unwrap();
        assert!((sa - 0.25).abs() < 1e-12);
    }

    #[test]
    fn alpha_k_of_supspace_cases() {
        // C = R^{k+1}: alpha_k = 1 (the excluded case of the averaging
        // formula, where the naive average would give 1/2).
        let plane = cone(3, &[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0]]);
        let a1 = modified_grassmann_angle(&plane, 1, McParams::new(1000, 1));
        assert!(a1.exact);
        assert_eq!(a1.value, 1.0);
        let a2 = modified_grassmann_angle(&plane, 2, McParams::new(1000, 1));
        assert_eq!(a2.value, 0.0);
    }
}
