//! Polyhedral cones: face lattice, polarity, tangent/normal cones and exact
//! metric projection.
//!
//! A cone is stored by generators. Facets are recovered by enumerating
//! candidate hyperplanes spanned by generator subsets and keeping the
//! one-sided ones; this handles every degeneracy (lineality, lower
//! dimension, redundant generators) with one code path and is fast at the
//! scale this crate targets. The face lattice is then the closure of facet
//! intersections, with each face identified by the set of generators lying
//! on it.

use crate::error::GeomError;
use crate::linalg::{
    self, dot, is_zero_vec, neg, nullspace, project_onto_span, primitive_integer_vector,
    row_space_basis, sub, QVec,
};
use crate::rat::{Rat, rat_one};
use num_traits::Zero;
use std::collections::HashMap;

/// Hard cap so face bookkeeping fits in a `u64` bitmask.
const MAX_GENERATORS: usize = 64;
const MAX_FACETS: usize = 64;

#[derive(Debug, Clone)]
pub struct ConeFace {
    pub dim: usize,
    /// Indices of generators lying on this face.
    pub generators: Vec<usize>,
    /// Facets containing the face (canonical tight set).
    pub tight_facets: u64,
    /// Basis of the linear span of the face.
    pub span_basis: Vec<QVec>,
}

#[derive(Debug, Clone)]
pub struct Cone {
    ambient_dim: usize,
    generators: Vec<QVec>,
    dim: usize,
    lineality_dim: usize,
    /// Basis of lin C.
    lin_basis: Vec<QVec>,
    /// Normals e with <e, x> = 0 on C (basis of the orthogonal complement).
    equalities: Vec<QVec>,
    /// Outward facet normals a (within lin C, primitive): <a, x> <= 0 on C.
    facets: Vec<QVec>,
    /// All faces, sorted by ascending dimension. The cone itself is last.
    faces: Vec<ConeFace>,
    /// Canonical tight-facet set -> face index.
    face_by_tight: HashMap<u64, usize>,
}

impl Cone {
    pub fn from_generators(ambient_dim: usize, gens: Vec<QVec>) -> Result<Self, GeomError> {
        for g in &gens {
            if g.len() != ambient_dim {
                return Err(GeomError::DimensionMismatch {
                    expected: ambient_dim,
                    got: g.len(),
                });
            }
        }
        let mut generators: Vec<QVec> = Vec::new();
        for g in gens {
            if !is_zero_vec(&g) && !generators.contains(&g) {
                generators.push(g);
            }
        }
        if generators.len() > MAX_GENERATORS {
            return Err(GeomError::TooLarge {
                what: "cone generators",
                max: MAX_GENERATORS,
            });
        }

        let lin_basis = row_space_basis(&generators);
        let dim = lin_basis.len();
        let equalities = nullspace(&generators, ambient_dim);

        let facets = enumerate_facets(ambient_dim, &generators, &equalities, dim)?;
        let faces = build_face_lattice(&generators, &facets);
        let lineality_dim = faces.first().map_or(0, |f| f.dim);
        let face_by_tight = faces
            .iter()
            .enumerate()
            .map(|(i, f)| (f.tight_facets, i))
            .collect();

        Ok(Cone {
            ambient_dim,
            generators,
            dim,
            lineality_dim,
            lin_basis,
            equalities,
            facets,
            faces,
            face_by_tight,
        })
    }

    pub fn from_integer_generators(
        ambient_dim: usize,
        gens: &[Vec<i64>],
    ) -> Result<Self, GeomError> {
        Self::from_generators(
            ambient_dim,
            gens.iter().map(|g| linalg::qvec_from_i64(g)).collect(),
        )
    }

    /// The full linear space R^d.
    pub fn full_space(ambient_dim: usize) -> Self {
        let mut gens = Vec::new();
        for i in 0..ambient_dim {
            let mut e = vec![Rat::zero(); ambient_dim];
            e[i] = rat_one();
            gens.push(e.clone());
            gens.push(neg(&e));
        }
        Self::from_generators(ambient_dim, gens).expect("full space is a valid cone")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lineality_dim(&self) -> usize {
        self.lineality_dim
    }

    pub fn is_linear_subspace(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality_dim == 0
    }

    pub fn generators(&self) -> &[QVec] {
        &self.generators
    }

    pub fn lin_basis(&self) -> &[QVec] {
        &self.lin_basis
    }

    pub fn equalities(&self) -> &[QVec] {
        &self.equalities
    }

    pub fn facet_normals(&self) -> &[QVec] {
        &self.facets
    }

    pub fn faces(&self) -> &[ConeFace] {
        &self.faces
    }

    pub fn faces_of_dim(&self, k: usize) -> impl Iterator<Item = (usize, &ConeFace)> {
        self.faces.iter().enumerate().filter(move |(_, f)| f.dim == k)
    }

    /// Number of faces per dimension, indices 0..=dim.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0usize; self.dim + 1];
        for face in &self.faces {
            f[face.dim] += 1;
        }
        f
    }

    /// `sum_i (-1)^i f_i(C)`.
    pub fn euler_characteristic(&self) -> i64 {
        self.faces
            .iter()
            .map(|f| if f.dim % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.equalities.iter().all(|e| dot(e, x).is_zero())
            && self.facets.iter().all(|a| dot(a, x) <= Rat::zero())
    }

    /// The face whose relative interior contains `x`, or `None` if `x` is
    /// outside the cone.
    pub fn face_of_point(&self, x: &[Rat]) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let mut tight = 0u64;
        for (j, a) in self.facets.iter().enumerate() {
            if dot(a, x).is_zero() {
                tight |= 1 << j;
            }
        }
        let idx = *self
            .face_by_tight
            .get(&tight)
            .expect("tight set of a cone point always names a face");
        Some(idx)
    }

    pub fn relint_contains(&self, face_idx: usize, x: &[Rat]) -> bool {
        self.face_of_point(x) == Some(face_idx)
    }

    /// Polar cone `{v : <w, v> <= 0 for all w in C}`.
    pub fn polar(&self) -> Cone {
        let mut gens: Vec<QVec> = self.facets.clone();
        for e in &self.equalities {
            gens.push(e.clone());
            gens.push(neg(e));
        }
        Cone::from_generators(self.ambient_dim, gens)
            .expect("polar of a valid cone is a valid cone")
    }

    /// Tangent cone of `self` at one of its faces: `C + span(F)`.
    pub fn tangent_at_face(&self, face_idx: usize) -> Cone {
        let face = &self.faces[face_idx];
        let mut gens = self.generators.clone();
        for b in &face.span_basis {
            gens.push(b.clone());
            gens.push(neg(b));
        }
        Cone::from_generators(self.ambient_dim, gens)
            .expect("tangent cone of a valid cone is a valid cone")
    }

    /// Normal cone at a face: polar of the tangent cone there.
    pub fn normal_at_face(&self, face_idx: usize) -> Cone {
        self.tangent_at_face(face_idx).polar()
    }

    /// Exact Moreau decomposition `x = p + q` with `p` the metric projection
    /// onto the cone, `q` in the polar cone, `<p, q> = 0`. Also returns the
    /// index of the unique face whose relative interior contains `p`.
    pub fn moreau_project(&self, x: &[Rat]) -> Result<(QVec, QVec, usize), GeomError> {
        for (idx, face) in self.faces.iter().enumerate() {
            let p = project_onto_span(&face.span_basis, x);
            // p lies in span(F); it is tight on every facet containing F.
            // relint membership additionally needs strictness elsewhere.
            let mut in_relint = true;
            for (j, a) in self.facets.iter().enumerate() {
                if face.tight_facets & (1 << j) != 0 {
                    continue;
                }
                if dot(a, &p) >= Rat::zero() {
                    in_relint = false;
                    break;
                }
            }
            if !in_relint {
                continue;
            }
            let q = sub(x, &p);
            if self.generators.iter().all(|g| dot(g, &q) <= Rat::zero()) {
                debug_assert!(dot(&p, &q).is_zero());
                return Ok((p, q, idx));
            }
        }
        // Relative interiors of faces partition the cone, so the projection
        // always lands in exactly one of them.
        Err(GeomError::DegenerateProjection)
    }
}

fn enumerate_facets(
    ambient_dim: usize,
    generators: &[QVec],
    equalities: &[QVec],
    dim: usize,
) -> Result<Vec<QVec>, GeomError> {
    let mut facets: Vec<QVec> = Vec::new();
    let mut seen: std::collections::HashSet<Vec<crate::rat::Int>> = Default::default();
    if dim == 0 {
        return Ok(facets);
    }
    let m = generators.len();
    let k = dim - 1;
    if k > m {
        return Ok(facets);
    }
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        // Candidate normal: orthogonal to the subset within lin C.
        let mut constraints: Vec<QVec> = subset.iter().map(|&i| generators[i].clone()).collect();
        constraints.extend_from_slice(equalities);
        let ns = nullspace(&constraints, ambient_dim);
        if ns.len() == 1 {
            let a = primitive_integer_vector(&ns[0]);
            let a_q: QVec = a.iter().map(|x| Rat::from_integer(x.clone())).collect();
            let mut pos = false;
            let mut neg_seen = false;
            for g in generators {
                let s = dot(&a_q, g);
                if s > Rat::zero() {
                    pos = true;
                } else if s < Rat::zero() {
                    neg_seen = true;
                }
                if pos && neg_seen {
                    break;
                }
            }
            if !(pos && neg_seen) {
                // One-sided: orient outward (<a, g> <= 0 for all generators).
                let oriented = if pos { neg(&a_q) } else { a_q };
                let key = primitive_integer_vector(&oriented);
                if seen.insert(key) {
                    if facets.len() == MAX_FACETS {
                        return Err(GeomError::TooLarge {
                            what: "cone facets",
                            max: MAX_FACETS,
                        });
                    }
                    facets.push(oriented);
                }
            }
        }
        // Next k-subset of 0..m in lexicographic order.
        if !advance_combination(&mut subset, m) {
            break;
        }
    }
    Ok(facets)
}

/// Advances `subset` to the next k-combination of `0..m`; false at the end.
fn advance_combination(subset: &mut [usize], m: usize) -> bool {
    let k = subset.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] != i + m - k {
            subset[i] += 1;
            for j in (i + 1)..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn gens_tight_on(generators: &[QVec], facets: &[QVec], tight: u64) -> Vec<usize> {
    generators
        .iter()
        .enumerate()
        .filter(|(_, g)| {
            facets
                .iter()
                .enumerate()
                .all(|(j, a)| tight & (1 << j) == 0 || dot(a, g).is_zero())
        })
        .map(|(i, _)| i)
        .collect()
}

fn canonical_tight(generators: &[QVec], facets: &[QVec], gen_set: &[usize]) -> u64 {
    let mut tight = 0u64;
    for (j, a) in facets.iter().enumerate() {
        if gen_set.iter().all(|&i| dot(a, &generators[i]).is_zero()) {
            tight |= 1 << j;
        }
    }
    tight
}

fn build_face_lattice(generators: &[QVec], facets: &[QVec]) -> Vec<ConeFace> {
    // Closure of facet intersections, with each face keyed by its canonical
    // tight-facet set.
    let mut by_tight: HashMap<u64, Vec<usize>> = HashMap::new();
    let all_gens: Vec<usize> = (0..generators.len()).collect();
    by_tight.insert(canonical_tight(generators, facets, &all_gens), all_gens);
    let mut worklist: Vec<u64> = by_tight.keys().copied().collect();
    for j in 0..facets.len() {
        let gens = gens_tight_on(generators, facets, 1 << j);
        let tight = canonical_tight(generators, facets, &gens);
        if by_tight.insert(tight, gens).is_none() {
            worklist.push(tight);
        }
    }
    // Pairwise intersections until closure.
    let mut i = 0;
    while i < worklist.len() {
        let a = worklist[i];
        i += 1;
        let existing: Vec<u64> = by_tight.keys().copied().collect();
        for b in existing {
            let joined = a | b;
            let gens = gens_tight_on(generators, facets, joined);
            let tight = canonical_tight(generators, facets, &gens);
            if !by_tight.contains_key(&tight) {
                by_tight.insert(tight, gens);
                worklist.push(tight);
            }
        }
    }
    let mut faces: Vec<ConeFace> = by_tight
        .into_iter()
        .map(|(tight, gen_set)| {
            let vecs: Vec<QVec> = gen_set.iter().map(|&i| generators[i].clone()).collect();
            let span_basis = row_space_basis(&vecs);
            ConeFace {
                dim: span_basis.len(),
                generators: gen_set,
                tight_facets: tight,
                span_basis,
            }
        })
        .collect();
    faces.sort_by_key(|f| (f.dim, f.generators.clone()));
    faces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qvec_from_i64 as qv;
    use crate::rat::rat;

    fn cone(d: usize, gens: &[&[i64]]) -> Cone {
        Cone::from_integer_generators(d, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn first_quadrant_basics() {
        let c = cone(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.lineality_dim(), 0);
        assert_eq!(c.f_vector(), vec![1, 2, 1]);
        assert_eq!(c.euler_characteristic(), 0);
        assert!(c.contains(&qv(&[2, 3])));
        assert!(!c.contains(&qv(&[-1, 3])));
    }

    #[test]
    fn polar_of_first_quadrant_is_third_quadrant() {
        let c = cone(2, &[&[1, 0], &[0, 1]]);
        let p = c.polar();
        assert!(p.contains(&qv(&[-1, -2])));
        assert!(!p.contains(&qv(&[1, 0])));
        assert!(!p.contains(&qv(&[-1, 1])));
    }

    #[test]
    fn polar_involution() {
        let cones = [
            cone(2, &[&[1, 0], &[0, 1]]),
            cone(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 5]]),
            cone(2, &[&[1, 0], &[-1, 0], &[0, 1]]),
            cone(3, &[&[1, 2, 3]]),
        ];
        for c in &cones {
            let pp = c.polar().polar();
            // Same set: mutual containment of generators.
            for g in c.generators() {
                assert!(pp.contains(g));
            }
            for g in pp.generators() {
                assert!(c.contains(g));
            }
        }
    }

    #[test]
    fn polar_of_subspace_is_complement() {
        let line = cone(2, &[&[1, 1], &[-1, -1]]);
        assert!(line.is_linear_subspace());
        let p = line.polar();
        assert!(p.is_linear_subspace());
        assert_eq!(p.dim(), 1);
        assert!(p.contains(&qv(&[1, -1])));
    }

    #[test]
    fn polar_of_origin_is_full_space() {
        let zero = Cone::from_generators(3, vec![]).unwrap();
        assert_eq!(zero.dim(), 0);
        let p = zero.polar();
        assert_eq!(p.dim(), 3);
        assert!(p.is_linear_subspace());
    }

    #[test]
    fn euler_relation_for_cones() {
        // Non-subspaces give 0, subspaces give (-1)^dim.
        assert_eq!(cone(2, &[&[1, 0], &[0, 1]]).euler_characteristic(), 0);
        let line = cone(2, &[&[1, 0], &[-1, 0]]);
        assert_eq!(line.euler_characteristic(), -1);
        let halfspace = cone(
            3,
            &[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1]],
        );
        assert!(!halfspace.is_linear_subspace());
        assert_eq!(halfspace.euler_characteristic(), 0);
        let zero = Cone::from_generators(2, vec![]).unwrap();
        assert_eq!(zero.euler_characteristic(), 1);
    }

    #[test]
    fn halfplane_face_lattice() {
        let c = cone(2, &[&[1, 0], &[-1, 0], &[0, 1]]);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.lineality_dim(), 1);
        assert_eq!(c.f_vector(), vec![0, 1, 1]);
    }

    #[test]
    fn moreau_projection_examples() {
        // First quadrant, x = (1, -1): p = (1, 0) on the x-axis ray.
        let c = cone(2, &[&[1, 0], &[0, 1]]);
        let (p, q, face) = c.moreau_project(&qv(&[1, -1])).unwrap();
        assert_eq!(p, qv(&[1, 0]));
        assert_eq!(q, qv(&[0, -1]));
        assert_eq!(c.faces()[face].dim, 1);

        // Full space: p = x, q = 0.
        let full = Cone::full_space(3);
        let (p, q, _) = full.moreau_project(&qv(&[4, -5, 6])).unwrap();
        assert_eq!(p, qv(&[4, -5, 6]));
        assert!(is_zero_vec(&q));

        // Half-line pos{(1,0)}, x = (-1, 2): p = 0, q = x.
        let ray = cone(2, &[&[1, 0]]);
        let (p, q, face) = ray.moreau_project(&qv(&[-1, 2])).unwrap();
        assert!(is_zero_vec(&p));
        assert_eq!(q, qv(&[-1, 2]));
        assert_eq!(ray.faces()[face].dim, 0);
    }

    #[test]
    fn moreau_pythagoras() {
        let c = cone(3, &[&[1, 0, 0], &[1, 1, 0], &[1, 1, 3]]);
        let x = vec![rat(3, 2), rat(-7, 3), rat(1, 4)];
        let (p, q, _) = c.moreau_project(&x).unwrap();
        assert!(dot(&p, &q).is_zero());
        let x2 = dot(&x, &x);
        assert_eq!(x2, dot(&p, &p) + dot(&q, &q));
        assert!(c.contains(&p));
        assert!(c.polar().contains(&q));
    }

    #[test]
    fn face_of_point_partition() {
        let c = cone(2, &[&[1, 0], &[0, 1]]);
        let interior = c.face_of_point(&qv(&[1, 1])).unwrap();
        assert_eq!(c.faces()[interior].dim, 2);
        let edge = c.face_of_point(&qv(&[3, 0])).unwrap();
        assert_eq!(c.faces()[edge].dim, 1);
        let apex = c.face_of_point(&qv(&[0, 0])).unwrap();
        assert_eq!(c.faces()[apex].dim, 0);
        assert_eq!(c.face_of_point(&qv(&[-1, 0])), None);
    }

    #[test]
    fn tangent_cone_at_face_adds_span() {
        let c = cone(2, &[&[1, 0], &[0, 1]]);
        let (edge_idx, _) = c.faces_of_dim(1).next().unwrap();
        let t = c.tangent_at_face(edge_idx);
        assert_eq!(t.dim(), 2);
        assert_eq!(t.lineality_dim(), 1);
    }
}
