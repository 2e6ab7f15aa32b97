//! JSON schemas for polytopes and cones, plus the output serialization
//! shared by the CLI. Rationals travel as `"p/q"` strings so no exact value
//! ever rides through floating point; Monte Carlo values always carry an
//! explicit `stderr` field.

use crate::cone::Cone;
use crate::ehrhart::{Coefficient, FittedPolynomial};
use crate::polytope::Polytope;
use crate::rat::{parse_rat, rat_int, Rat};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON in {path} at byte {offset} (line {line}, column {column}): {message}")]
    Json {
        path: String,
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Geometry(#[from] crate::error::GeomError),
}

/// `{"dim": d, "vertices": [[int, ...], ...]}`
#[derive(Debug, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    pub vertices: Vec<Vec<i64>>,
}

impl PolytopeJson {
    pub fn from_polytope(p: &Polytope) -> Self {
        PolytopeJson {
            dim: p.ambient_dim(),
            vertices: p.vertices().to_vec(),
        }
    }

    pub fn into_polytope(self) -> Result<Polytope, InputError> {
        for v in &self.vertices {
            if v.len() != self.dim {
                return Err(InputError::Schema(format!(
                    "vertex {v:?} does not have the declared dimension {}",
                    self.dim
                )));
            }
        }
        Ok(Polytope::convex_hull(&self.vertices)?)
    }
}

/// A number that may arrive as an integer, a float, or a `"p/q"` string.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatJson {
    Int(i64),
    Str(String),
}

impl RatJson {
    fn to_rat(&self) -> Result<Rat, InputError> {
        match self {
            RatJson::Int(n) => Ok(rat_int(*n)),
            RatJson::Str(s) => {
                parse_rat(s).map_err(|e| InputError::Schema(format!("bad rational '{s}': {e}")))
            }
        }
    }
}

/// `{"ambient_dim": d, "generators": [[int|"p/q", ...], ...]}`
#[derive(Debug, Serialize, Deserialize)]
pub struct ConeJson {
    pub ambient_dim: usize,
    pub generators: Vec<Vec<RatJson>>,
}

impl ConeJson {
    pub fn into_cone(self) -> Result<Cone, InputError> {
        let mut gens = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            if g.len() != self.ambient_dim {
                return Err(InputError::Schema(format!(
                    "generator of length {} does not match ambient_dim {}",
                    g.len(),
                    self.ambient_dim
                )));
            }
            gens.push(g.iter().map(|x| x.to_rat()).collect::<Result<Vec<_>, _>>()?);
        }
        Ok(Cone::from_generators(self.ambient_dim, gens)?)
    }
}

fn json_error(path: &str, text: &str, e: serde_json::Error) -> InputError {
    let (line, column) = (e.line(), e.column());
    // serde_json reports 1-based line/column; translate to a byte offset.
    let offset = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum::<usize>()
        + column.saturating_sub(1);
    InputError::Json {
        path: path.to_string(),
        offset,
        line,
        column,
        message: e.to_string(),
    }
}

pub fn parse_polytope_json(path: &str, text: &str) -> Result<Polytope, InputError> {
    let parsed: PolytopeJson =
        serde_json::from_str(text).map_err(|e| json_error(path, text, e))?;
    parsed.into_polytope()
}

pub fn parse_cone_json(path: &str, text: &str) -> Result<Cone, InputError> {
    let parsed: ConeJson = serde_json::from_str(text).map_err(|e| json_error(path, text, e))?;
    parsed.into_cone()
}

pub fn load_polytope(path: &str) -> Result<Polytope, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_string(),
        source,
    })?;
    parse_polytope_json(path, &text)
}

pub fn load_cone(path: &str) -> Result<Cone, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_string(),
        source,
    })?;
    parse_cone_json(path, &text)
}

/// Serialized polynomial coefficient: exact string or value-with-error.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum CoefficientJson {
    Exact(String),
    Estimated { value: f64, stderr: f64 },
}

impl From<&Coefficient> for CoefficientJson {
    fn from(c: &Coefficient) -> Self {
        match c {
            Coefficient::Exact(r) => CoefficientJson::Exact(crate::rat::format_rat(r)),
            Coefficient::Estimated { value, stderr } => CoefficientJson::Estimated {
                value: *value,
                stderr: *stderr,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PolynomialJson {
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub degree: usize,
    pub basis: String,
    pub coeffs: Vec<CoefficientJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hstar: Option<Vec<CoefficientJson>>,
}

impl PolynomialJson {
    pub fn new(family: &str, k: Option<usize>, poly: &FittedPolynomial) -> Self {
        PolynomialJson {
            family: family.to_string(),
            k,
            degree: poly.degree,
            basis: match poly.basis {
                crate::ehrhart::Basis::Monomial => "monomial".into(),
                crate::ehrhart::Basis::Binomial => "binomial".into(),
            },
            coeffs: poly.coeffs.iter().map(CoefficientJson::from).collect(),
            hstar: None,
        }
    }

    pub fn with_hstar(mut self, h: &FittedPolynomial) -> Self {
        self.hstar = Some(h.coeffs.iter().map(CoefficientJson::from).collect());
        self
    }
}

/// Minimal CSV writer: quotes fields containing separators or quotes.
pub fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|f| csv_escape(f)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polytope_json_round_trip() {
        let text = r#"{"dim": 2, "vertices": [[0,0],[1,0],[0,1],[1,1]]}"#;
        let p = parse_polytope_json("test", text).unwrap();
        assert_eq!(p.vertices().len(), 4);
        let back = serde_json::to_string(&PolytopeJson::from_polytope(&p)).unwrap();
        let p2 = parse_polytope_json("test", &back).unwrap();
        assert_eq!(p.vertices(), p2.vertices());
    }

    #[test]
    fn json_error_carries_byte_offset() {
        let text = "{\"dim\": 2,\n \"vertices\": [[0,0],]}";
        let err = parse_polytope_json("bad.json", text).unwrap_err();
        match err {
            InputError::Json { offset, line, .. } => {
                assert_eq!(line, 2);
                assert!(offset > 10, "offset {offset}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn cone_json_accepts_rational_strings() {
        let text = r#"{"ambient_dim": 2, "generators": [[1, 0], ["1/2", "1/3"]]}"#;
        let c = parse_cone_json("test", text).unwrap();
        assert_eq!(c.dim(), 2);
    }

    #[test]
    fn schema_mismatch_reported() {
        let text = r#"{"dim": 3, "vertices": [[0,0]]}"#;
        assert!(matches!(
            parse_polytope_json("t", text),
            Err(InputError::Schema(_))
        ));
    }

    #[test]
    fn csv_escaping() {
        assert_eq!(csv_escape("plain"), "plain");
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
        assert_eq!(csv_escape("q\"q"), "\"q\"\"q\"");
    }
}
