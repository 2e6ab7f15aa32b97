//! Lattice point enumeration in dilated polytopes and determinants of the
//! sublattices living in face direction spaces.
//!
//! Enumeration walks the integer bounding box of `nP` and filters by the
//! affine-hull equations and facet inequalities; every accepted point is
//! tagged with the unique face of `nP` whose relative interior contains it,
//! so relative-interior counts come for free.

use crate::error::GeomError;
use crate::linalg::{dot_i64, gram_det};
use crate::polytope::Polytope;
use crate::rat::{Int, Rat};
use num_traits::ToPrimitive;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct LatticePointSet {
    pub dilate: i64,
    pub points: Vec<Vec<i64>>,
    /// For each point, the index (into `Polytope::faces`) of the face of the
    /// dilate whose relative interior contains it. Faces of `nP` are in
    /// natural bijection with faces of `P` for `n >= 1`.
    pub face_of: Vec<usize>,
}

impl LatticePointSet {
    pub fn count(&self) -> u64 {
        self.points.len() as u64
    }

    /// Number of points in the relative interior of each face.
    pub fn counts_by_face(&self, n_faces: usize) -> Vec<u64> {
        let mut c = vec![0u64; n_faces];
        for &f in &self.face_of {
            c[f] += 1;
        }
        c
    }

    /// Counts aggregated by face dimension.
    pub fn counts_by_dim(&self, p: &Polytope) -> HashMap<usize, u64> {
        let mut m = HashMap::new();
        for &f in &self.face_of {
            *m.entry(p.faces()[f].dim).or_insert(0) += 1;
        }
        m
    }
}

/// All points of `nP ∩ Z^d`, each tagged with its face. `n = 0` yields the
/// single point at the origin (the 0-dilate of any polytope).
pub fn enumerate_points(p: &Polytope, n: i64) -> Result<LatticePointSet, GeomError> {
    if n < 0 {
        return Err(GeomError::NegativeDilate);
    }
    let d = p.ambient_dim();
    if n == 0 {
        return Ok(LatticePointSet {
            dilate: 0,
            points: vec![vec![0; d]],
            face_of: vec![p.top_face()],
        });
    }
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for v in p.vertices() {
        for i in 0..d {
            lo[i] = lo[i].min(v[i] * n);
            hi[i] = hi[i].max(v[i] * n);
        }
    }
    let mut face_by_tight: HashMap<u64, usize> = HashMap::new();
    for (i, f) in p.faces().iter().enumerate() {
        face_by_tight.insert(f.tight_facets, i);
    }

    let mut points = Vec::new();
    let mut face_of = Vec::new();
    let mut x = lo.clone();
    'outer: loop {
        // Membership in nP: <e, x> = n*e0 on the affine hull, <a, x> <= n*b.
        let in_aff = p
            .aff_equalities()
            .iter()
            .all(|h| dot_i64(&h.normal, &x) == (h.offset as i128) * (n as i128));
        if in_aff {
            let mut inside = true;
            let mut tight = 0u64;
            for (j, f) in p.facets().iter().enumerate() {
                let v = dot_i64(&f.normal, &x);
                let rhs = (f.offset as i128) * (n as i128);
                if v > rhs {
                    inside = false;
                    break;
                }
                if v == rhs {
                    tight |= 1 << j;
                }
            }
            if inside {
                let face = *face_by_tight
                    .get(&tight)
                    .expect("tight set of a lattice point names a face");
                points.push(x.clone());
                face_of.push(face);
            }
        }
        // Advance odometer.
        for i in 0..d {
            if x[i] < hi[i] {
                x[i] += 1;
                continue 'outer;
            }
            x[i] = lo[i];
        }
        break;
    }
    Ok(LatticePointSet {
        dilate: n,
        points,
        face_of,
    })
}

/// Determinant data of the lattice `Z^d ∩ dir(aff F)`.
#[derive(Debug, Clone)]
pub struct LatticeDet {
    /// Exact squared covolume (Gram determinant of a saturated basis).
    pub gram: Int,
    /// Euclidean covolume `sqrt(gram)`.
    pub covolume: f64,
}

/// Covolume of the direction lattice of a face. Vertices have determinant 1.
pub fn lattice_determinant(p: &Polytope, face_idx: usize) -> LatticeDet {
    let basis: Vec<Vec<Int>> = p.faces()[face_idx]
        .dir_lattice_basis
        .iter()
        .map(|b| b.iter().map(|&x| Int::from(x)).collect())
        .collect();
    let gram = gram_det(&basis);
    let covolume = gram.to_f64().unwrap_or(f64::INFINITY).sqrt();
    LatticeDet { gram, covolume }
}

/// Discrete volume of the `n`-dilate: covolume times the point count.
/// Exact integer (`count`) for full-dimensional polytopes.
pub fn discrete_volume(p: &Polytope, n: i64) -> Result<(u64, f64), GeomError> {
    let pts = enumerate_points(p, n)?;
    let det = lattice_determinant(p, p.top_face());
    Ok((pts.count(), det.covolume * pts.count() as f64))
}

/// Number of points in the relative interior of the `n`-dilate.
pub fn interior_count(p: &Polytope, n: i64) -> Result<u64, GeomError> {
    let pts = enumerate_points(p, n)?;
    let top = p.top_face();
    Ok(pts.face_of.iter().filter(|&&f| f == top).count() as u64)
}

/// Exact relative volume times count normalization used by the Ehrhart
/// machinery: `L(F) = det(F) * |F ∩ Z^d|` specialises to the raw count when
/// the face is full-dimensional in its lattice, which is what exact fits use.
pub fn face_point_count(p: &Polytope, face_idx: usize, n: i64) -> Result<u64, GeomError> {
    // Count points of n*F by enumerating the face as its own polytope.
    let f = &p.faces()[face_idx];
    let pts: Vec<Vec<i64>> = f
        .vertices
        .iter()
        .map(|&vi| p.vertices()[vi].clone())
        .collect();
    let fp = Polytope::convex_hull(&pts)?;
    Ok(enumerate_points(&fp, n)?.count())
}

/// Ratio `|nP ∩ Z^d| / n^k` compared against the relative volume; the
/// difference vanishes as `n` grows.
pub fn ehrhart_ratio(p: &Polytope, n: i64) -> Result<(f64, Rat), GeomError> {
    let pts = enumerate_points(p, n)?;
    let ratio = pts.count() as f64 / (n as f64).powi(p.dim() as i32);
    Ok((ratio, p.relative_volume(p.top_face())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_to_f64;

    fn cube3() -> Polytope {
        let mut pts = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        Polytope::convex_hull(&pts).unwrap()
    }

    fn reeve(h: i64) -> Polytope {
        Polytope::convex_hull(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, h]])
            .unwrap()
    }

    #[test]
    fn cube_dilate_counts() {
        let c = cube3();
        assert_eq!(enumerate_points(&c, 2).unwrap().count(), 27);
        assert_eq!(enumerate_points(&c, 0).unwrap().count(), 1);
        for n in 1..4 {
            let expect = ((n + 1) * (n + 1) * (n + 1)) as u64;
            assert_eq!(enumerate_points(&c, n).unwrap().count(), expect);
        }
    }

    #[test]
    fn reeve_has_only_vertices_at_dilate_one() {
        for h in [1, 2, 5, 20] {
            let r = reeve(h);
            let pts = enumerate_points(&r, 1).unwrap();
            assert_eq!(pts.count(), 4, "h = {h}");
            for &f in &pts.face_of {
                assert_eq!(r.faces()[f].dim, 0);
            }
        }
    }

    #[test]
    fn segment_gcd_count() {
        let seg = Polytope::convex_hull(&[vec![0, 0], vec![3, 6]]).unwrap();
        // gcd(3,6) + 1 = 4 points.
        assert_eq!(enumerate_points(&seg, 1).unwrap().count(), 4);
    }

    #[test]
    fn relint_counts_partition_total() {
        let c = cube3();
        let pts = enumerate_points(&c, 3).unwrap();
        let per_face = pts.counts_by_face(c.faces().len());
        let total: u64 = per_face.iter().sum();
        assert_eq!(total, pts.count());
        // Interior of the 3-dilate of the unit cube: (3-1)^3 = 8.
        assert_eq!(per_face[c.top_face()], 8);
    }

    #[test]
    fn lattice_determinants() {
        let c = cube3();
        let d = lattice_determinant(&c, c.top_face());
        assert_eq!(d.gram, Int::from(1));
        // Vertex face.
        let v = c.faces_of_dim(0).next().unwrap().0;
        assert_eq!(lattice_determinant(&c, v).gram, Int::from(1));
        // Diagonal segment in Z^2: covolume sqrt(2).
        let seg = Polytope::convex_hull(&[vec![0, 0], vec![1, 1]]).unwrap();
        let d = lattice_determinant(&seg, seg.top_face());
        assert_eq!(d.gram, Int::from(2));
        assert!((d.covolume - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn discrete_volume_limit_for_segments() {
        // L(nP)/n -> |P| with the covolume normalization, for several
        // segments of different directions.
        for (a, b) in [([0, 0], [1, 1]), ([0, 0], [2, 4]), ([1, 1], [4, 1]), ([0, 1], [3, 3]), ([-2, 0], [2, 2])] {
            let seg = Polytope::convex_hull(&[a.to_vec(), b.to_vec()]).unwrap();
            let (_, l128) = discrete_volume(&seg, 128).unwrap();
            let intrinsic = seg.intrinsic_volume_f64(seg.top_face());
            let ratio = l128 / 128.0;
            assert!(
                (ratio - intrinsic).abs() / intrinsic < 0.03,
                "segment {a:?}-{b:?}: {ratio} vs {intrinsic}"
            );
        }
    }

    #[test]
    fn ehrhart_limit_2d_3d() {
        for p in [cube3(), reeve(3)] {
            let (r32, vol) = ehrhart_ratio(&p, 32).unwrap();
            let v = rat_to_f64(&vol);
            assert!((r32 - v).abs() / v < 0.10, "n=32: {r32} vs {v}");
            let (r128, _) = ehrhart_ratio(&p, 128).unwrap();
            assert!((r128 - v).abs() / v < 0.03, "n=128: {r128} vs {v}");
        }
    }

    #[test]
    fn translation_invariance_of_enumeration() {
        let r = reeve(3);
        let t = r.translate(&[2, -1, 3]).unwrap();
        for n in 1..4 {
            assert_eq!(
                enumerate_points(&r, n).unwrap().count(),
                enumerate_points(&t, n).unwrap().count()
            );
        }
    }

    #[test]
    fn negative_dilate_rejected() {
        let c = cube3();
        assert!(matches!(
            enumerate_points(&c, -1),
            Err(GeomError::NegativeDilate)
        ));
    }
}
