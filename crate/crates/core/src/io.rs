//! JSON file formats.
//!
//! Solution file:
//!
//! ```json
//! {"n": 4, "arithmetic": "rational", "entries": [["0","1/2",...],...], "theta": "1"}
//! ```
//!
//! Rational scalars are `"p/q"` strings in lowest terms, float scalars JSON
//! numbers. An optional `"metadata"` object carries construction details.
//! Symmetry and the zero diagonal are re-validated on load.

use serde_json::{json, Map, Value};

use crate::curvature::DiagCurvature;
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::matrix::{SolutionReport, SymSolutionMatrix};
use crate::scalar::{Arithmetic, Rational, Scalar};

/// A solution with its θ and free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile<T> {
    pub matrix: SymSolutionMatrix<T>,
    pub theta: T,
    pub metadata: Option<Value>,
}

/// A solution file of either arithmetic mode.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySolution {
    Rational(SolutionFile<Rational>),
    Float(SolutionFile<f64>),
}

impl AnySolution {
    pub fn arithmetic(&self) -> Arithmetic {
        match self {
            AnySolution::Rational(_) => Arithmetic::Rational,
            AnySolution::Float(_) => Arithmetic::Float,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnySolution::Rational(s) => s.matrix.n(),
            AnySolution::Float(s) => s.matrix.n(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnySolution::Rational(s) => solution_to_json(s),
            AnySolution::Float(s) => solution_to_json(s),
        }
    }
}

fn matrix_rows<T: Scalar>(n: usize, entries: &[T]) -> Value {
    Value::Array(
        entries
            .chunks(n)
            .map(|row| Value::Array(row.iter().map(Scalar::to_json).collect()))
            .collect(),
    )
}

pub fn solution_to_json<T: Scalar>(s: &SolutionFile<T>) -> Value {
    let mut obj = Map::new();
    obj.insert("n".into(), json!(s.matrix.n()));
    obj.insert("arithmetic".into(), json!(T::ARITHMETIC.as_str()));
    obj.insert("entries".into(), matrix_rows(s.matrix.n(), s.matrix.entries()));
    obj.insert("theta".into(), s.theta.to_json());
    if let Some(meta) = &s.metadata {
        obj.insert("metadata".into(), meta.clone());
    }
    Value::Object(obj)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field \"{key}\"")))
}

fn read_square<T: Scalar>(value: &Value, n: usize, what: &str) -> Result<Vec<T>> {
    let rows = value
        .as_array()
        .ok_or_else(|| Error::Parse(format!("\"{what}\" must be an array of rows")))?;
    if rows.len() != n {
        return Err(Error::Parse(format!("\"{what}\" has {} rows, expected {n}", rows.len())));
    }
    let mut out = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("row {i} of \"{what}\" is not an array")))?;
        if row.len() != n {
            return Err(Error::Parse(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        for v in row {
            out.push(T::from_json(v)?);
        }
    }
    Ok(out)
}

fn read_n(obj: &Map<String, Value>) -> Result<usize> {
    field(obj, "n")?
        .as_u64()
        .filter(|&n| n >= 1)
        .map(|n| n as usize)
        .ok_or_else(|| Error::Parse("\"n\" must be a positive integer".into()))
}

fn typed_solution<T: Scalar>(obj: &Map<String, Value>) -> Result<SolutionFile<T>> {
    let n = read_n(obj)?;
    let entries = read_square::<T>(field(obj, "entries")?, n, "entries")?;
    let matrix = SymSolutionMatrix::new(n, entries)?;
    let theta = T::from_json(field(obj, "theta")?)?;
    Ok(SolutionFile {
        matrix,
        theta,
        metadata: obj.get("metadata").cloned(),
    })
}

fn read_arithmetic(obj: &Map<String, Value>) -> Result<Arithmetic> {
    match field(obj, "arithmetic")?.as_str() {
        Some("rational") => Ok(Arithmetic::Rational),
        Some("float") => Ok(Arithmetic::Float),
        other => Err(Error::Parse(format!("unknown arithmetic tag {other:?}"))),
    }
}

/// Parses a solution file; structural problems surface as
/// [`Error::Asymmetric`] / [`Error::NonzeroDiagonal`].
pub fn parse_solution(text: &str) -> Result<AnySolution> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("solution file must be a JSON object".into()))?;
    match read_arithmetic(obj)? {
        Arithmetic::Rational => typed_solution(obj).map(AnySolution::Rational),
        Arithmetic::Float => typed_solution(obj).map(AnySolution::Float),
    }
}

/// Parses a solution file that must be in the arithmetic mode of `T`.
pub fn parse_solution_as<T: Scalar>(text: &str) -> Result<SolutionFile<T>> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("solution file must be a JSON object".into()))?;
    let found = read_arithmetic(obj)?;
    if found != T::ARITHMETIC {
        return Err(Error::ArithmeticMismatch {
            expected: T::ARITHMETIC.to_string(),
            found: found.to_string(),
        });
    }
    typed_solution(obj)
}

/// `{"n": int, "edges": [[i, j], ...]}`, 0-based, `i < j`, sorted.
pub fn graph_to_json(g: &Graph) -> Value {
    json!({ "n": g.n(), "edges": g.edges() })
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("graph file must be a JSON object".into()))?;
    let n = read_n(obj)?;
    let edges = field(obj, "edges")?
        .as_array()
        .ok_or_else(|| Error::Parse("\"edges\" must be an array".into()))?;
    let mut list = Vec::with_capacity(edges.len());
    for e in edges {
        let pair = e
            .as_array()
            .filter(|p| p.len() == 2)
            .and_then(|p| Some((p[0].as_u64()? as usize, p[1].as_u64()? as usize)))
            .ok_or_else(|| Error::Parse(format!("malformed edge {e}")))?;
        list.push(pair);
    }
    Graph::from_edges(n, &list)
}

/// `{"n": int, "arithmetic": tag, "r": [[...]]}`.
pub fn tensor_to_json<T: Scalar>(r: &DiagCurvature<T>) -> Value {
    json!({
        "n": r.n(),
        "arithmetic": T::ARITHMETIC.as_str(),
        "r": matrix_rows(r.n(), r.entries()),
    })
}

pub fn parse_tensor_as<T: Scalar>(text: &str) -> Result<DiagCurvature<T>> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("tensor file must be a JSON object".into()))?;
    if let Some(tag) = obj.get("arithmetic") {
        let found = read_arithmetic(obj)?;
        if found != T::ARITHMETIC {
            return Err(Error::ArithmeticMismatch {
                expected: T::ARITHMETIC.to_string(),
                found: tag.to_string(),
            });
        }
    }
    let n = read_n(obj)?;
    let r = read_square::<T>(field(obj, "r")?, n, "r")?;
    DiagCurvature::new(n, r)
}

/// Serializes a verification report; exact values become `"p/q"` strings.
pub fn report_to_json<T: Scalar>(rep: &SolutionReport<T>) -> Value {
    json!({
        "is_solution": rep.is_solution,
        "arithmetic": rep.arithmetic.as_str(),
        "n": rep.d.len(),
        "theta": rep.theta.as_ref().map(Scalar::to_json),
        "trace_d": rep.trace_d.to_json(),
        "hat_theta": rep.hat_theta,
        "hat_theta_sq": rep.hat_theta_sq().as_ref().map(Scalar::to_json),
        "max_residual": rep.max_residual,
        "violation": rep.violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_solution_round_trip() {
        let m = SymSolutionMatrix::from_upper(4, |i, j| {
            if i / 2 == j / 2 {
                Rational::from_ratio(2, 3)
            } else {
                Rational::from_ratio(-1, 3)
            }
        });
        let file = SolutionFile {
            matrix: m,
            theta: Rational::from_int(1),
            metadata: Some(json!({"family": "disjoint-complete"})),
        };
        let text = solution_to_json(&file).to_string();
        assert!(text.contains("\"-1/3\""));
        match parse_solution(&text).unwrap() {
            AnySolution::Rational(back) => assert_eq!(back, file),
            other => panic!("wrong mode {other:?}"),
        }
        assert!(matches!(
            parse_solution_as::<f64>(&text),
            Err(Error::ArithmeticMismatch { .. })
        ));
    }

    #[test]
    fn asymmetric_file_is_structural_error() {
        let text = r#"{"n":2,"arithmetic":"float","entries":[[0,1],[2,0]],"theta":0}"#;
        assert_eq!(parse_solution(text).unwrap_err(), Error::Asymmetric { i: 0, j: 1 });
        let text = r#"{"n":2,"arithmetic":"float","entries":[[0,1],[1"#;
        assert!(matches!(parse_solution(text), Err(Error::Parse(_))));
        let text = r#"{"n":2,"arithmetic":"complex","entries":[[0,1],[1,0]],"theta":0}"#;
        assert!(matches!(parse_solution(text), Err(Error::Parse(_))));
    }

    #[test]
    fn graph_round_trip() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3), (1, 2)]).unwrap();
        let text = graph_to_json(&g).to_string();
        assert_eq!(text, r#"{"edges":[[0,1],[1,2],[2,3]],"n":4}"#);
        assert_eq!(parse_graph(&text).unwrap(), g);
    }
}
