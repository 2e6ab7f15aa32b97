//! Convex lattice polytopes: exact hull, H-representation, full face
//! lattice, relative interiors and exact (lattice-normalized) volumes.
//!
//! A polytope is handled through its homogenization cone `pos{(1, p_i)}`:
//! facets and faces of the cone in one dimension up are exactly the facets
//! and faces of the polytope, so all the degenerate-case handling lives in
//! `cone`. Lower-dimensional polytopes come out of the same machinery with
//! their affine hull recorded as integer equalities.

use crate::cone::Cone;
use crate::error::GeomError;
use crate::linalg::{self, dot_i64, integer_kernel, QVec};
use crate::rat::{Int, Rat, rat_int};
use num_traits::{Signed, ToPrimitive, Zero};

pub const MAX_AMBIENT_DIM: usize = 6;

/// Integer halfspace `<normal, x> <= offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: Vec<i64>,
    pub offset: i64,
}

/// Integer hyperplane `<normal, x> = offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    pub normal: Vec<i64>,
    pub offset: i64,
}

#[derive(Debug, Clone)]
pub struct Face {
    pub dim: usize,
    /// Indices into `Polytope::vertices`.
    pub vertices: Vec<usize>,
    /// Facet indices whose hyperplanes contain the face (canonical set).
    pub tight_facets: u64,
    /// Saturated integer basis of the lattice `Z^d ∩ dir(aff F)`.
    pub dir_lattice_basis: Vec<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub struct Polytope {
    ambient_dim: usize,
    /// Minimal V-representation, sorted lexicographically.
    vertices: Vec<Vec<i64>>,
    dim: usize,
    facets: Vec<Halfspace>,
    /// Affine-hull equations; empty for full-dimensional polytopes.
    aff_equalities: Vec<Hyperplane>,
    /// All nonempty faces sorted by (dim, vertex set); the polytope is last.
    faces: Vec<Face>,
}

impl Polytope {
    /// Convex hull of integer points. Duplicates and non-vertex points are
    /// removed; lower-dimensional hulls are supported.
    pub fn convex_hull(points: &[Vec<i64>]) -> Result<Self, GeomError> {
        let Some(first) = points.first() else {
            return Err(GeomError::EmptyInput);
        };
        let ambient_dim = first.len();
        if ambient_dim == 0 || ambient_dim > MAX_AMBIENT_DIM {
            return Err(GeomError::AmbientDimTooLarge {
                got: ambient_dim,
                max: MAX_AMBIENT_DIM,
            });
        }
        for p in points {
            if p.len() != ambient_dim {
                return Err(GeomError::DimensionMismatch {
                    expected: ambient_dim,
                    got: p.len(),
                });
            }
        }
        let mut dedup: Vec<Vec<i64>> = Vec::new();
        for p in points {
            if !dedup.contains(p) {
                dedup.push(p.clone());
            }
        }

        // Homogenize: p -> (1, p).
        let gens: Vec<QVec> = dedup
            .iter()
            .map(|p| {
                let mut v = Vec::with_capacity(ambient_dim + 1);
                v.push(rat_int(1));
                v.extend(p.iter().map(|&x| rat_int(x)));
                v
            })
            .collect();
        let cone = Cone::from_generators(ambient_dim + 1, gens)?;
        let dim = cone.dim() - 1;

        // Facets: cone normal (a0, a) with <a0,a>.(1,x) <= 0  <=>  <a,x> <= -a0.
        let mut facets: Vec<Halfspace> = Vec::new();
        for a in cone.facet_normals() {
            let ints = dehomogenize_normal(a)?;
            facets.push(Halfspace {
                offset: -ints[0],
                normal: ints[1..].to_vec(),
            });
        }
        // Affine hull: cone equality (e0, e).(1,x) = 0  <=>  <e,x> = -e0.
        let mut aff_equalities: Vec<Hyperplane> = Vec::new();
        for e in cone.equalities() {
            let ints = dehomogenize_normal(e)?;
            aff_equalities.push(Hyperplane {
                offset: -ints[0],
                normal: ints[1..].to_vec(),
            });
        }

        // Vertices: 1-faces of the homogenization cone.
        let mut vertex_points: Vec<Vec<i64>> = cone
            .faces_of_dim(1)
            .map(|(_, f)| dedup[f.generators[0]].clone())
            .collect();
        vertex_points.sort();
        let vertex_index = |p: &Vec<i64>| vertex_points.iter().position(|v| v == p);

        // Faces: cone faces of dim >= 1, shifted down by one.
        let mut faces: Vec<Face> = Vec::new();
        for cf in cone.faces() {
            if cf.dim == 0 {
                continue; // apex = empty face, excluded from the lattice here
            }
            let mut vs: Vec<usize> = cf
                .generators
                .iter()
                .filter_map(|&gi| vertex_index(&dedup[gi]))
                .collect();
            vs.sort_unstable();
            vs.dedup();
            let dir_lattice_basis =
                direction_lattice(ambient_dim, &vertex_points, &vs, cf.dim - 1)?;
            faces.push(Face {
                dim: cf.dim - 1,
                vertices: vs,
                tight_facets: cf.tight_facets,
                dir_lattice_basis,
            });
        }
        faces.sort_by(|a, b| (a.dim, &a.vertices).cmp(&(b.dim, &b.vertices)));

        Ok(Polytope {
            ambient_dim,
            vertices: vertex_points,
            dim,
            facets,
            aff_equalities,
            faces,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.ambient_dim
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn aff_equalities(&self) -> &[Hyperplane] {
        &self.aff_equalities
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn faces_of_dim(&self, k: usize) -> impl Iterator<Item = (usize, &Face)> {
        self.faces.iter().enumerate().filter(move |(_, f)| f.dim == k)
    }

    /// Index of the face equal to the whole polytope.
    pub fn top_face(&self) -> usize {
        self.faces.len() - 1
    }

    /// `f_0 .. f_dim` (vertices, edges, ..., the polytope itself).
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0usize; self.dim + 1];
        for face in &self.faces {
            f[face.dim] += 1;
        }
        f
    }

    /// `sum_i (-1)^i f_i` over proper faces and the polytope; equals 1.
    pub fn euler_characteristic(&self) -> i64 {
        self.faces
            .iter()
            .map(|f| if f.dim % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn contains_int(&self, x: &[i64]) -> bool {
        self.aff_equalities
            .iter()
            .all(|h| dot_i64(&h.normal, x) == h.offset as i128)
            && self
                .facets
                .iter()
                .all(|f| dot_i64(&f.normal, x) <= f.offset as i128)
    }

    pub fn contains_rat(&self, x: &[Rat]) -> bool {
        let q = |v: &[i64]| linalg::qvec_from_i64(v);
        self.aff_equalities
            .iter()
            .all(|h| linalg::dot(&q(&h.normal), x) == rat_int(h.offset))
            && self
                .facets
                .iter()
                .all(|f| linalg::dot(&q(&f.normal), x) <= rat_int(f.offset))
    }

    /// Canonical tight-facet set of a point inside the polytope.
    fn tight_set_rat(&self, x: &[Rat]) -> u64 {
        let mut tight = 0u64;
        for (j, f) in self.facets.iter().enumerate() {
            let q = linalg::qvec_from_i64(&f.normal);
            if linalg::dot(&q, x) == rat_int(f.offset) {
                tight |= 1 << j;
            }
        }
        tight
    }

    /// Face whose relative interior contains `x`, or None outside.
    pub fn face_of_point_rat(&self, x: &[Rat]) -> Option<usize> {
        if !self.contains_rat(x) {
            return None;
        }
        let tight = self.tight_set_rat(x);
        self.faces.iter().position(|f| f.tight_facets == tight)
    }

    pub fn face_of_point_int(&self, x: &[i64]) -> Option<usize> {
        let q = linalg::qvec_from_i64(x);
        self.face_of_point_rat(&q)
    }

    /// True iff `x` lies in the relative interior of the given face.
    pub fn relint_contains(&self, face_idx: usize, x: &[Rat]) -> bool {
        self.face_of_point_rat(x) == Some(face_idx)
    }

    /// Children of a face in the lattice: faces one dimension lower whose
    /// vertex set is contained in it.
    pub fn face_children(&self, face_idx: usize) -> Vec<usize> {
        let f = &self.faces[face_idx];
        if f.dim == 0 {
            return vec![];
        }
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, g)| {
                g.dim + 1 == f.dim && g.vertices.iter().all(|v| f.vertices.contains(v))
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// A rational point in the relative interior of a face (vertex average).
    pub fn relint_point(&self, face_idx: usize) -> QVec {
        let f = &self.faces[face_idx];
        let n = rat_int(f.vertices.len() as i64);
        let mut acc = vec![Rat::zero(); self.ambient_dim];
        for &vi in &f.vertices {
            for (a, &x) in acc.iter_mut().zip(&self.vertices[vi]) {
                *a += rat_int(x);
            }
        }
        acc.into_iter().map(|a| a / &n).collect()
    }

    /// Tangent cone `pos(P - v)` for `v` in the relative interior of a face.
    pub fn tangent_cone(&self, face_idx: usize) -> Cone {
        let v = self.relint_point(face_idx);
        let gens: Vec<QVec> = self
            .vertices
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&v)
                    .map(|(&pi, vi)| rat_int(pi) - vi)
                    .collect()
            })
            .collect();
        Cone::from_generators(self.ambient_dim, gens)
            .expect("tangent cone of a valid polytope is a valid cone")
    }

    /// Normal cone: polar of the tangent cone at the face.
    pub fn normal_cone(&self, face_idx: usize) -> Cone {
        self.tangent_cone(face_idx).polar()
    }

    /// Vertices of a face expressed in the coordinates of its direction
    /// lattice basis (relative to the face's first vertex). These are
    /// integer coordinates because the basis is saturated.
    pub fn face_lattice_coords(&self, face_idx: usize) -> Vec<Vec<Int>> {
        let f = &self.faces[face_idx];
        let base = &self.vertices[f.vertices[0]];
        let basis_q: Vec<QVec> = f
            .dir_lattice_basis
            .iter()
            .map(|b| linalg::qvec_from_i64(b))
            .collect();
        f.vertices
            .iter()
            .map(|&vi| {
                let diff: QVec = self.vertices[vi]
                    .iter()
                    .zip(base)
                    .map(|(&a, &b)| rat_int(a - b))
                    .collect();
                let coeffs = linalg::solve_in_span(&basis_q, &diff)
                    .expect("face vertices lie in the face's direction space");
                coeffs
                    .into_iter()
                    .map(|c| {
                        debug_assert!(c.denom().to_u32() == Some(1));
                        c.to_integer()
                    })
                    .collect()
            })
            .collect()
    }

    /// Simplicial decomposition of a face as tuples of vertex indices.
    pub fn triangulate_face(&self, face_idx: usize) -> Vec<Vec<usize>> {
        let f = &self.faces[face_idx];
        if f.dim == 0 {
            return vec![vec![f.vertices[0]]];
        }
        let apex = f.vertices[0];
        let mut simplices = Vec::new();
        for child in self.face_children(face_idx) {
            if self.faces[child].vertices.contains(&apex) {
                continue;
            }
            for mut s in self.triangulate_face(child) {
                s.insert(0, apex);
                simplices.push(s);
            }
        }
        simplices
    }

    /// Lattice-normalized volume of a face: the volume of the face measured
    /// in coordinates of the saturated basis of its direction lattice. This
    /// equals intrinsic volume / covolume and is always rational.
    pub fn relative_volume(&self, face_idx: usize) -> Rat {
        let f = &self.faces[face_idx];
        if f.dim == 0 {
            return rat_int(1);
        }
        let coords = self.face_lattice_coords(face_idx);
        let coord_of = |vi: usize| {
            let pos = f.vertices.iter().position(|&v| v == vi).unwrap();
            &coords[pos]
        };
        let k = f.dim;
        let mut total = Rat::zero();
        let mut factorial = rat_int(1);
        for i in 2..=k as i64 {
            factorial *= rat_int(i);
        }
        for simplex in self.triangulate_face(face_idx) {
            let base = coord_of(simplex[0]);
            let rows: Vec<QVec> = simplex[1..]
                .iter()
                .map(|&vi| {
                    coord_of(vi)
                        .iter()
                        .zip(base)
                        .map(|(a, b)| Rat::from_integer(a - b))
                        .collect()
                })
                .collect();
            let d = linalg::det(rows);
            total += d.abs();
        }
        total / factorial
    }

    /// Euclidean intrinsic volume of a face (`relative_volume` times the
    /// covolume of the direction lattice); irrational in general.
    pub fn intrinsic_volume_f64(&self, face_idx: usize) -> f64 {
        let f = &self.faces[face_idx];
        let gram = linalg::gram_det(
            &f.dir_lattice_basis
                .iter()
                .map(|b| b.iter().map(|&x| Int::from(x)).collect())
                .collect::<Vec<_>>(),
        );
        let cov = gram.to_f64().unwrap_or(f64::INFINITY).sqrt();
        crate::rat::rat_to_f64(&self.relative_volume(face_idx)) * cov
    }

    /// Translate by an integer vector.
    pub fn translate(&self, t: &[i64]) -> Result<Self, GeomError> {
        let pts: Vec<Vec<i64>> = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(t).map(|(&a, &b)| a + b).collect())
            .collect();
        Self::convex_hull(&pts)
    }

    /// The dilate `nP` as a polytope (n >= 1).
    pub fn dilate(&self, n: i64) -> Result<Self, GeomError> {
        if n < 1 {
            return Err(GeomError::NegativeDilate);
        }
        let pts: Vec<Vec<i64>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|&a| a * n).collect())
            .collect();
        Self::convex_hull(&pts)
    }
}

fn dehomogenize_normal(a: &[Rat]) -> Result<Vec<i64>, GeomError> {
    let prim = linalg::primitive_integer_vector(a);
    prim.iter()
        .map(|x| x.to_i64().ok_or(GeomError::Overflow))
        .collect()
}

/// Saturated basis of `Z^d ∩ dir(aff F)` for the face on the given vertices.
fn direction_lattice(
    ambient_dim: usize,
    vertices: &[Vec<i64>],
    face_vertices: &[usize],
    face_dim: usize,
) -> Result<Vec<Vec<i64>>, GeomError> {
    if face_dim == 0 {
        return Ok(vec![]);
    }
    // Equations of the direction space: nullspace of the difference vectors,
    // then the kernel of those equations as an integer lattice.
    let base = &vertices[face_vertices[0]];
    let diffs: Vec<QVec> = face_vertices[1..]
        .iter()
        .map(|&vi| {
            vertices[vi]
                .iter()
                .zip(base)
                .map(|(&a, &b)| rat_int(a - b))
                .collect()
        })
        .collect();
    let equations = linalg::nullspace(&diffs, ambient_dim);
    let int_eqs: Vec<Vec<Int>> = equations
        .iter()
        .map(|e| linalg::primitive_integer_vector(e))
        .collect();
    let kernel = integer_kernel(&int_eqs, ambient_dim);
    debug_assert_eq!(kernel.len(), face_dim);
    kernel
        .into_iter()
        .map(|b| {
            b.iter()
                .map(|x| x.to_i64().ok_or(GeomError::Overflow))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn unit_square() -> Polytope {
        Polytope::convex_hull(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    fn reeve(h: i64) -> Polytope {
        Polytope::convex_hull(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, h]])
            .unwrap()
    }

    #[test]
    fn square_with_interior_and_duplicate_points() {
        let p = Polytope::convex_hull(&[
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![1, 1],
            vec![0, 0],
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.dim(), 2);
        assert_eq!(p.f_vector(), vec![4, 4, 1]);
        assert_eq!(p.euler_characteristic(), 1);
    }

    #[test]
    fn reeve_tetrahedron_combinatorics() {
        let p = reeve(2);
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().len(), 4);
        assert_eq!(p.dim(), 3);
        assert_eq!(p.f_vector(), vec![4, 6, 4, 1]);
        assert_eq!(p.euler_characteristic(), 1);
    }

    #[test]
    fn lower_dimensional_segment() {
        let p = Polytope::convex_hull(&[vec![0, 0], vec![2, 0]]).unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.ambient_dim(), 2);
        assert_eq!(p.aff_equalities().len(), 1);
        assert!(p.contains_int(&[1, 0]));
        assert!(!p.contains_int(&[1, 1]));
        assert!(!p.contains_int(&[3, 0]));
    }

    #[test]
    fn point_polytope() {
        let p = Polytope::convex_hull(&[vec![3, -1, 2], vec![3, -1, 2]]).unwrap();
        assert_eq!(p.dim(), 0);
        assert_eq!(p.f_vector(), vec![1]);
        assert_eq!(p.relative_volume(p.top_face()), rat_int(1));
    }

    #[test]
    fn empty_input_rejected() {
        assert_eq!(
            Polytope::convex_hull(&[]).unwrap_err(),
            GeomError::EmptyInput
        );
    }

    #[test]
    fn hull_idempotence() {
        let p = reeve(3);
        let q = Polytope::convex_hull(p.vertices()).unwrap();
        assert_eq!(p.vertices(), q.vertices());
        assert_eq!(p.f_vector(), q.f_vector());
    }

    #[test]
    fn relint_membership() {
        let p = unit_square();
        let half = crate::rat::rat(1, 2);
        let mid = vec![half.clone(), half.clone()];
        let top = p.top_face();
        assert!(p.relint_contains(top, &mid));
        // Edge midpoint is not in the relative interior of the square...
        let edge_mid = vec![half, rat_int(0)];
        assert!(!p.relint_contains(top, &edge_mid));
        // ...but is in the relative interior of its edge.
        let f = p.face_of_point_rat(&edge_mid).unwrap();
        assert_eq!(p.faces()[f].dim, 1);
        // A vertex is in the relative interior of the vertex face only.
        let origin = vec![rat_int(0), rat_int(0)];
        let v = p.face_of_point_rat(&origin).unwrap();
        assert_eq!(p.faces()[v].dim, 0);
    }

    #[test]
    fn segment_relint_endpoints() {
        let p = Polytope::convex_hull(&[vec![0], vec![1]]).unwrap();
        let top = p.top_face();
        assert!(p.relint_contains(top, &[crate::rat::rat(1, 2)]));
        assert!(!p.relint_contains(top, &[rat_int(0)]));
    }

    #[test]
    fn volumes() {
        let sq = unit_square();
        assert_eq!(sq.relative_volume(sq.top_face()), rat_int(1));
        let r = reeve(5);
        assert_eq!(r.relative_volume(r.top_face()), crate::rat::rat(5, 6));
        // Diagonal segment: relative volume counts lattice steps.
        let seg = Polytope::convex_hull(&[vec![0, 0], vec![2, 2]]).unwrap();
        assert_eq!(seg.relative_volume(seg.top_face()), rat_int(2));
        assert!((seg.intrinsic_volume_f64(seg.top_face()) - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cube_face_lattice() {
        let mut pts = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        let cube = Polytope::convex_hull(&pts).unwrap();
        assert_eq!(cube.f_vector(), vec![8, 12, 6, 1]);
        assert_eq!(cube.euler_characteristic(), 1);
        assert_eq!(cube.relative_volume(cube.top_face()), rat_int(1));
    }

    #[test]
    fn tangent_and_normal_cones_of_square() {
        let p = unit_square();
        // Vertex (0,0): tangent = first quadrant, normal = third quadrant.
        let v_idx = p
            .faces_of_dim(0)
            .find(|(_, f)| p.vertices()[f.vertices[0]] == vec![0, 0])
            .unwrap()
            .0;
        let t = p.tangent_cone(v_idx);
        assert_eq!(t.dim(), 2);
        assert!(t.contains(&linalg::qvec_from_i64(&[1, 0])));
        assert!(t.contains(&linalg::qvec_from_i64(&[0, 1])));
        assert!(!t.contains(&linalg::qvec_from_i64(&[-1, 0])));
        let n = p.normal_cone(v_idx);
        assert_eq!(n.dim(), 2);
        assert!(n.contains(&linalg::qvec_from_i64(&[-1, -1])));

        // Edge: tangent is a halfplane (lineality 1), normal is a ray.
        let e_idx = p.faces_of_dim(1).next().unwrap().0;
        let te = p.tangent_cone(e_idx);
        assert_eq!(te.dim(), 2);
        assert_eq!(te.lineality_dim(), 1);
        let ne = p.normal_cone(e_idx);
        assert_eq!(ne.dim(), 1);
        assert!(ne.is_pointed());

        // Whole polytope: tangent is the plane, normal is {0}.
        let nt = p.normal_cone(p.top_face());
        assert_eq!(nt.dim(), 0);
    }

    #[test]
    fn translation_preserves_structure() {
        let p = reeve(4);
        let q = p.translate(&[5, -3, 7]).unwrap();
        assert_eq!(p.f_vector(), q.f_vector());
        assert_eq!(
            p.relative_volume(p.top_face()),
            q.relative_volume(q.top_face())
        );
    }

    #[test]
    fn six_dim_cross_check_and_cap() {
        let p = Polytope::convex_hull(&[vec![0; 7]]);
        assert!(matches!(p, Err(GeomError::AmbientDimTooLarge { .. })));
    }
}
