//! Built-in polytopes and cones, plus seeded random fixtures for the
//! verification suites. Builtins are addressable from the CLI as
//! `cube:d`, `simplex:d` and `reeve:h`.

use crate::cone::Cone;
use crate::error::GeomError;
use crate::polytope::Polytope;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BuiltinError {
    #[error("unknown builtin '{0}': expected cube:D, simplex:D or reeve:H")]
    Unknown(String),
    #[error("invalid builtin parameter in '{0}'")]
    BadParameter(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// `[0,1]^d`.
pub fn cube(d: usize) -> Result<Polytope, GeomError> {
    let mut pts = Vec::with_capacity(1 << d);
    for mask in 0..(1u32 << d) {
        pts.push((0..d).map(|i| ((mask >> i) & 1) as i64).collect());
    }
    Polytope::convex_hull(&pts)
}

/// `conv{0, e_1, ..., e_d}`.
pub fn simplex(d: usize) -> Result<Polytope, GeomError> {
    let mut pts = vec![vec![0i64; d]];
    for i in 0..d {
        let mut e = vec![0i64; d];
        e[i] = 1;
        pts.push(e);
    }
    Polytope::convex_hull(&pts)
}

/// `conv{0, e_1, e_2, (1, 1, h)}`: the standard source of negative
/// linear coefficients in dilation polynomials.
pub fn reeve(h: i64) -> Result<Polytope, GeomError> {
    Polytope::convex_hull(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, h]])
}

/// Parses `cube:D`, `simplex:D` or `reeve:H`.
pub fn builtin_polytope(spec: &str) -> Result<Polytope, BuiltinError> {
    let (kind, param) = spec
        .split_once(':')
        .ok_or_else(|| BuiltinError::Unknown(spec.to_string()))?;
    let n: i64 = param
        .parse()
        .map_err(|_| BuiltinError::BadParameter(spec.to_string()))?;
    if n < 1 {
        return Err(BuiltinError::BadParameter(spec.to_string()));
    }
    match kind {
        "cube" => Ok(cube(n as usize)?),
        "simplex" => Ok(simplex(n as usize)?),
        "reeve" => Ok(reeve(n)?),
        _ => Err(BuiltinError::Unknown(spec.to_string())),
    }
}

/// Parses builtin cone specs: `orthant:D`, `halfspace:D`, `subspace:D:J`,
/// `ray:D`, `full:D`, `zero:D`.
pub fn builtin_cone(spec: &str) -> Result<Cone, BuiltinError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| -> Result<usize, BuiltinError> {
        s.parse()
            .map_err(|_| BuiltinError::BadParameter(spec.to_string()))
    };
    let cone = |d: usize, gens: Vec<Vec<i64>>| {
        Cone::from_integer_generators(d, &gens).map_err(BuiltinError::Geometry)
    };
    match parts.as_slice() {
        ["orthant", d] => {
            let d = parse(d)?;
            let gens = (0..d)
                .map(|i| {
                    let mut e = vec![0i64; d];
                    e[i] = 1;
                    e
                })
                .collect();
            cone(d, gens)
        }
        ["halfspace", d] => {
            let d = parse(d)?;
            let mut gens: Vec<Vec<i64>> = Vec::new();
            for i in 0..d - 1 {
                let mut e = vec![0i64; d];
                e[i] = 1;
                gens.push(e.clone());
                e[i] = -1;
                gens.push(e);
            }
            let mut up = vec![0i64; d];
            up[d - 1] = 1;
            gens.push(up);
            cone(d, gens)
        }
        ["subspace", d, j] => {
            let (d, j) = (parse(d)?, parse(j)?);
            let mut gens = Vec::new();
            for i in 0..j.min(d) {
                let mut e = vec![0i64; d];
                e[i] = 1;
                gens.push(e.clone());
                e[i] = -1;
                gens.push(e);
            }
            cone(d, gens)
        }
        ["ray", d] => {
            let d = parse(d)?;
            let mut e = vec![0i64; d];
            e[0] = 1;
            cone(d, vec![e])
        }
        ["full", d] => Ok(Cone::full_space(parse(d)?)),
        ["zero", d] => cone(parse(d)?, vec![]),
        _ => Err(BuiltinError::Unknown(spec.to_string())),
    }
}

/// A mixed bag of cones covering the degenerate strata: pointed, with
/// lineality, subspaces, halfspaces, the origin and the full space, plus
/// seeded random cones up to the requested count (ambient dimension <= 4).
pub fn cone_test_set(rng: &mut ChaCha8Rng, total: usize) -> Vec<Cone> {
    let mut cones: Vec<Cone> = vec![
        builtin_cone("orthant:2").unwrap(),
        builtin_cone("orthant:3").unwrap(),
        builtin_cone("orthant:4").unwrap(),
        builtin_cone("halfspace:2").unwrap(),
        builtin_cone("halfspace:3").unwrap(),
        builtin_cone("subspace:2:1").unwrap(),
        builtin_cone("subspace:3:2").unwrap(),
        builtin_cone("subspace:4:2").unwrap(),
        builtin_cone("ray:3").unwrap(),
        builtin_cone("full:2").unwrap(),
        builtin_cone("zero:3").unwrap(),
        // wedge: pointed planar cross-section times a line
        Cone::from_integer_generators(3, &[vec![1, 0, 0], vec![-1, 0, 0], vec![0, 1, 0], vec![0, 1, 1]])
            .unwrap(),
    ];
    while cones.len() < total {
        let d = 2 + (rng.gen::<u32>() % 3) as usize; // 2..=4
        cones.push(random_cone(rng, d));
    }
    cones
}

/// Random cone from a handful of integer generators in `[-3, 3]^d`;
/// occasionally adds the negative of a generator to create lineality.
pub fn random_cone(rng: &mut ChaCha8Rng, d: usize) -> Cone {
    loop {
        let m = d + (rng.gen::<u32>() % 3) as usize;
        let mut gens: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..d).map(|_| (rng.gen::<i64>().rem_euclid(7)) - 3).collect())
            .collect();
        if rng.gen::<f64>() < 0.25 {
            let pick = gens[rng.gen::<usize>() % gens.len()].clone();
            gens.push(pick.iter().map(|x| -x).collect());
        }
        match Cone::from_integer_generators(d, &gens) {
            Ok(c) if c.dim() > 0 => return c,
            _ => continue,
        }
    }
}

/// Random full-dimensional lattice polytope in dimension `d` with small
/// coordinates.
pub fn random_full_polytope(rng: &mut ChaCha8Rng, d: usize) -> Polytope {
    loop {
        let m = d + 2 + (rng.gen::<u32>() % 4) as usize;
        let pts: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..d).map(|_| (rng.gen::<i64>().rem_euclid(4))).collect())
            .collect();
        if let Ok(p) = Polytope::convex_hull(&pts) {
            if p.dim() == d {
                return p;
            }
        }
    }
}

/// Random lattice simplex of intrinsic dimension `dim` in ambient `dim`,
/// vertices in `[0, 2]^dim`.
pub fn random_lattice_simplex(rng: &mut ChaCha8Rng, dim: usize) -> Polytope {
    loop {
        let pts: Vec<Vec<i64>> = (0..=dim)
            .map(|_| (0..dim).map(|_| (rng.gen::<i64>().rem_euclid(3))).collect())
            .collect();
        if let Ok(p) = Polytope::convex_hull(&pts) {
            if p.dim() == dim && p.vertices().len() == dim + 1 {
                return p;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::batch_rng;

    #[test]
    fn builtin_specs() {
        assert_eq!(builtin_polytope("cube:3").unwrap().vertices().len(), 8);
        assert_eq!(builtin_polytope("simplex:2").unwrap().vertices().len(), 3);
        assert_eq!(builtin_polytope("reeve:7").unwrap().dim(), 3);
        assert!(builtin_polytope("torus:3").is_err());
        assert!(builtin_polytope("cube").is_err());
        assert!(builtin_polytope("cube:0").is_err());
        assert!(builtin_polytope("cube:x").is_err());
        assert_eq!(builtin_cone("orthant:4").unwrap().dim(), 4);
        assert!(builtin_cone("subspace:3:2").unwrap().is_linear_subspace());
    }

    #[test]
    fn cone_set_has_variety() {
        let mut rng = batch_rng(7, 0);
        let cones = cone_test_set(&mut rng, 22);
        assert!(cones.len() >= 22);
        assert!(cones.iter().any(|c| c.is_linear_subspace()));
        assert!(cones.iter().any(|c| c.lineality_dim() > 0 && !c.is_linear_subspace()));
        assert!(cones.iter().any(|c| c.is_pointed() && c.dim() == 4));
    }

    #[test]
    fn random_simplex_is_simplex() {
        let mut rng = batch_rng(3, 1);
        for dim in 1..=3 {
            let s = random_lattice_simplex(&mut rng, dim);
            assert_eq!(s.dim(), dim);
            assert_eq!(s.vertices().len(), dim + 1);
        }
    }
}
