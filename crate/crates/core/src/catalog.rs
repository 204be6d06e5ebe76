//! Named solution families, their construction with re-verification, and the
//! per-dimension catalog.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::characters::{cubic_solution, octic_solution, quartic_solution, PhiFunction};
use crate::curvature::{sphere_product_tensor, tensor_to_solution};
use crate::error::{Error, Result};
use crate::finite_field::prime_power;
use crate::graphs::{
    self, disjoint_complete, gq_symplectic, kneser2, paley_graph, pds_subgroups, rook, srg_params_of,
    srg_to_solution, Graph, SrgParams,
};
use crate::group_ring::{composite_solution, phi_to_matrix};
use crate::io::{AnySolution, SolutionFile};
use crate::matrix::{inflate, verify_basic, SolutionReport};
use crate::scalar::{format_rational, Rational, Scalar};

/// Tolerance for float-mode solutions built from characters.
pub const FLOAT_TOL: f64 = 1e-9;

/// A family together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    DisjointComplete { m: usize, l: usize },
    Kneser2 { m: usize },
    Rook { m: usize },
    Paley { q: u64 },
    GqSymplectic { q: u64 },
    Pds { q: u64, l: usize },
    Composite { l: u64, m: u64, variant: u8 },
    Cubic { q: u64 },
    Quartic { q: u64 },
    Octic { q: u64 },
    /// Round spheres of radius `1` and the Einstein-compatible radius.
    SphereProduct { k: usize, l: usize },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::DisjointComplete { .. } => "disjoint-complete",
            FamilySpec::Kneser2 { .. } => "kneser2",
            FamilySpec::Rook { .. } => "rook",
            FamilySpec::Paley { .. } => "paley",
            FamilySpec::GqSymplectic { .. } => "gq-symplectic",
            FamilySpec::Pds { .. } => "pds",
            FamilySpec::Composite { .. } => "composite",
            FamilySpec::Cubic { .. } => "cubic",
            FamilySpec::Quartic { .. } => "quartic",
            FamilySpec::Octic { .. } => "octic",
            FamilySpec::SphereProduct { .. } => "sphere-product",
        }
    }

    /// Parameters as `(name, value)` pairs in a fixed order.
    pub fn params(&self) -> Vec<(&'static str, u64)> {
        match *self {
            FamilySpec::DisjointComplete { m, l } => vec![("m", m as u64), ("l", l as u64)],
            FamilySpec::Kneser2 { m } | FamilySpec::Rook { m } => vec![("m", m as u64)],
            FamilySpec::Paley { q }
            | FamilySpec::GqSymplectic { q }
            | FamilySpec::Cubic { q }
            | FamilySpec::Quartic { q }
            | FamilySpec::Octic { q } => vec![("q", q)],
            FamilySpec::Pds { q, l } => vec![("q", q), ("l", l as u64)],
            FamilySpec::Composite { l, m, variant } => vec![("l", l), ("m", m), ("variant", variant as u64)],
            FamilySpec::SphereProduct { k, l } => vec![("k", k as u64), ("l", l as u64)],
        }
    }

    /// The srg of a graph family; `None` for the other families.
    pub fn graph(&self) -> Option<Result<Graph>> {
        Some(match *self {
            FamilySpec::DisjointComplete { m, l } => disjoint_complete(m, l),
            FamilySpec::Kneser2 { m } => kneser2(m),
            FamilySpec::Rook { m } => rook(m),
            FamilySpec::Paley { q } => paley_graph(q),
            FamilySpec::GqSymplectic { q } => gq_symplectic(q),
            FamilySpec::Pds { q, l } => pds_subgroups(q, l),
            _ => return None,
        })
    }
}

fn base_metadata(spec: &FamilySpec) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("family".into(), json!(spec.name()));
    let params: Map<String, Value> = spec.params().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    meta.insert("params".into(), Value::Object(params));
    meta
}

fn srg_json(p: &SrgParams) -> Value {
    json!({ "n": p.n, "r": p.r, "lambda": p.lambda, "mu": p.mu })
}

fn checked<T: Scalar>(s: crate::matrix::SymSolutionMatrix<T>, theta: T, tol: f64, what: &str) -> Result<SolutionFile<T>> {
    let rep = verify_basic(&s, tol)?;
    let ok = rep.is_solution
        && (s.is_zero() || rep.theta.as_ref().is_some_and(|t| t.approx_eq(&theta, tol * (1.0 + theta.abs().to_f64_lossy()))));
    if !ok {
        return Err(Error::ConstructionMismatch(format!("{what} failed re-verification")));
    }
    Ok(SolutionFile {
        matrix: s,
        theta,
        metadata: None,
    })
}

fn character_file(phi: &PhiFunction, theta: f64) -> Result<SolutionFile<f64>> {
    let s = phi_to_matrix(&phi.to_group_function())?;
    let mut file = checked(s, theta, FLOAT_TOL, phi.kind.as_str())?;
    file.metadata = Some(phi.metadata());
    Ok(file)
}

/// Builds and re-verifies the solution of a family. Graph families, the
/// composite family and sphere products are exact; character families are
/// floats.
pub fn construct(spec: &FamilySpec) -> Result<AnySolution> {
    let mut meta = base_metadata(spec);
    if let Some(graph) = spec.graph() {
        let g = graph?;
        let p = srg_params_of(&g)
            .map_err(|e| Error::ConstructionMismatch(format!("graph is not strongly regular: {e:?}")))?;
        let (s, theta) = srg_to_solution::<Rational>(&g)?;
        let mut file = checked(s, theta, 0.0, spec.name())?;
        meta.insert("srg".into(), srg_json(&p));
        file.metadata = Some(Value::Object(meta));
        return Ok(AnySolution::Rational(file));
    }
    match *spec {
        FamilySpec::Composite { l, m, variant } => {
            let (phi, theta) = composite_solution::<Rational>(l, m, variant)?;
            let mut file = checked(phi_to_matrix(&phi)?, theta, 0.0, "composite")?;
            file.metadata = Some(Value::Object(meta));
            Ok(AnySolution::Rational(file))
        }
        FamilySpec::SphereProduct { k, l } => {
            let t = sphere_product_tensor(k, l, &Rational::from_int(1))?;
            let (s, theta) = tensor_to_solution(&t);
            let mut file = checked(s, theta, 0.0, "sphere-product")?;
            file.metadata = Some(Value::Object(meta));
            Ok(AnySolution::Rational(file))
        }
        FamilySpec::Quartic { q } => character_file(&quartic_solution(q)?, 0.0).map(AnySolution::Float),
        FamilySpec::Octic { q } => character_file(&octic_solution(q)?, 0.0).map(AnySolution::Float),
        FamilySpec::Cubic { q } => {
            let (phi, theta) = cubic_solution(q)?;
            character_file(&phi, theta).map(AnySolution::Float)
        }
        _ => unreachable!("graph families handled above"),
    }
}

/// One catalog line.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogRow {
    pub family: String,
    pub params: Vec<(String, u64)>,
    pub n: u64,
    pub srg: Option<SrgParams>,
    /// `"p/q"` for exact rows, decimal otherwise.
    pub theta: String,
    pub hat_theta: f64,
    /// Exact `θ̂²` when known.
    pub hat_theta_sq: Option<String>,
    pub verified: bool,
    pub note: Option<String>,
}

fn float_text(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    format!("{v:.12}")
}

fn row_from_report<T: Scalar>(
    family: &str,
    params: Vec<(String, u64)>,
    srg: Option<SrgParams>,
    rep: &SolutionReport<T>,
    exact_text: impl Fn(&T) -> String,
) -> CatalogRow {
    CatalogRow {
        family: family.to_string(),
        params,
        n: rep.d.len() as u64,
        srg,
        theta: rep.theta.as_ref().map(&exact_text).unwrap_or_else(|| "-".into()),
        hat_theta: rep.hat_theta,
        hat_theta_sq: T::is_exact().then(|| rep.hat_theta_sq().map(|v| exact_text(&v))).flatten(),
        verified: rep.is_solution,
        note: None,
    }
}

/// Verifies a constructed solution afresh and turns it into a row.
pub fn row_for(spec: &FamilySpec) -> Result<CatalogRow> {
    let sol = construct(spec)?;
    let params: Vec<(String, u64)> = spec.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let srg = match spec.graph() {
        Some(g) => srg_params_of(&g?).ok(),
        None => None,
    };
    Ok(match &sol {
        AnySolution::Rational(f) => {
            let rep = verify_basic(&f.matrix, 0.0)?;
            row_from_report(spec.name(), params, srg, &rep, |v: &Rational| format_rational(v))
        }
        AnySolution::Float(f) => {
            let rep = verify_basic(&f.matrix, FLOAT_TOL)?;
            row_from_report(spec.name(), params, srg, &rep, |v: &f64| float_text(*v))
        }
    })
}

fn factor_pairs(n: u64) -> Vec<(u64, u64)> {
    (2..=n).take_while(|a| a * a <= n).filter(|a| n.is_multiple_of(*a)).map(|a| (a, n / a)).collect()
}

fn is_prime(n: u64) -> bool {
    prime_power(n).is_some_and(|(p, k)| p == n && k == 1)
}

/// The specs applicable in dimension `n`.
pub fn specs_for_dimension(n: u64) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for (a, b) in factor_pairs(n) {
        out.push(FamilySpec::DisjointComplete { m: a as usize, l: b as usize });
        if a != b {
            out.push(FamilySpec::DisjointComplete { m: b as usize, l: a as usize });
        }
    }
    for (a, b) in factor_pairs(n) {
        for variant in 1..=3 {
            out.push(FamilySpec::Composite { l: a, m: b, variant });
        }
    }
    if let Some(m) = (4..=n).find(|m| m * (m - 1) / 2 == n) {
        out.push(FamilySpec::Kneser2 { m: m as usize });
    }
    if let Some(m) = (2..=n).find(|m| m * m == n) {
        out.push(FamilySpec::Rook { m: m as usize });
        if prime_power(m).is_some() {
            for l in 1..=m as usize {
                out.push(FamilySpec::Pds { q: m, l });
            }
        }
    }
    if let Some(q) = (2..=n).find(|q| (q + 1) * (q * q + 1) == n) {
        if prime_power(q).is_some() {
            out.push(FamilySpec::GqSymplectic { q });
        }
    }
    if prime_power(n).is_some() {
        if n % 4 == 1 {
            out.push(FamilySpec::Paley { q: n });
            out.push(FamilySpec::Quartic { q: n });
        }
        if n % 8 == 1 {
            out.push(FamilySpec::Octic { q: n });
        }
        if n % 3 == 1 {
            out.push(FamilySpec::Cubic { q: n });
        }
    }
    for k in (2..=n / 2).filter(|k| n - k >= 2) {
        out.push(FamilySpec::SphereProduct { k: k as usize, l: (n - k) as usize });
    }
    out
}

/// `diag(S, 0)` of the two-cliques solution in dimension `n - 1`.
fn inflation_row(n: u64) -> Result<CatalogRow> {
    let base = FamilySpec::DisjointComplete { m: ((n - 1) / 2) as usize, l: 2 };
    let AnySolution::Rational(file) = construct(&base)? else {
        unreachable!("graph families are exact")
    };
    let s = inflate(&file.matrix, n as usize)?;
    let rep = verify_basic(&s, 0.0)?;
    let mut row = row_from_report(
        "inflation",
        vec![("from".to_string(), n - 1)],
        None,
        &rep,
        |v: &Rational| format_rational(v),
    );
    row.note = Some(format!("diag(S, 0) of disjoint-complete m={} l=2", (n - 1) / 2));
    Ok(row)
}

/// Parameter-only row for the Fischer group graph `srg(306936, 31671, 3510, 3240)`.
pub fn fi24_row() -> CatalogRow {
    let p = SrgParams {
        n: 306_936,
        r: 31_671,
        lambda: 3_510,
        mu: 3_240,
    };
    CatalogRow {
        family: "fi24".into(),
        params: Vec::new(),
        n: p.n,
        srg: Some(p),
        theta: p.theta().to_string(),
        hat_theta: p.hat_theta().expect("nondegenerate"),
        hat_theta_sq: p.hat_theta_sq().map(|v| format_rational(&v)),
        verified: false,
        note: Some("parameters only; matrix not constructed".into()),
    }
}

/// Every applicable row for `4 ≤ n ≤ max_n`, plus an inflation row for odd
/// primes not covered by a two-valued family, plus the Fi₂₄ parameter row.
pub fn catalog(max_n: u64) -> Result<Vec<CatalogRow>> {
    if max_n < 4 {
        return Err(Error::InvalidParameter(format!("catalog needs max_n >= 4, got {max_n}")));
    }
    let mut rows = Vec::new();
    for n in 4..=max_n {
        for spec in specs_for_dimension(n) {
            rows.push(row_for(&spec)?);
        }
        if is_prime(n) && n % 4 == 3 {
            rows.push(inflation_row(n)?);
        }
    }
    rows.push(fi24_row());
    Ok(rows)
}

fn params_text(params: &[(String, u64)]) -> String {
    if params.is_empty() {
        return "-".into();
    }
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

/// Fixed-width text table.
pub fn catalog_text(rows: &[CatalogRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<18} {:<18} {:>7} {:<28} {:>16} {:>16} {:<8}",
        "family", "params", "n", "srg", "theta", "hat_theta", "verified"
    );
    for r in rows {
        let srg = r
            .srg
            .map(|p| format!("({},{},{},{})", p.n, p.r, p.lambda, p.mu))
            .unwrap_or_else(|| "-".into());
        let _ = write!(
            out,
            "{:<18} {:<18} {:>7} {:<28} {:>16} {:>16.12} {:<8}",
            r.family,
            params_text(&r.params),
            r.n,
            srg,
            r.theta,
            r.hat_theta,
            if r.verified { "yes" } else { "no" }
        );
        if let Some(note) = &r.note {
            let _ = write!(out, " {note}");
        }
        out.push('\n');
    }
    out
}

pub fn catalog_json(rows: &[CatalogRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "family": r.family,
                    "params": r.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<Map<_, _>>(),
                    "n": r.n,
                    "srg": r.srg.as_ref().map(srg_json),
                    "theta": r.theta,
                    "hat_theta": r.hat_theta,
                    "hat_theta_sq": r.hat_theta_sq,
                    "verified": r.verified,
                    "note": r.note,
                })
            })
            .collect(),
    )
}

/// Dimensions in `4..=max_n` lacking a verified row with `θ̂ ≠ 0`.
pub fn uncovered_dimensions(rows: &[CatalogRow], max_n: u64) -> Vec<u64> {
    (4..=max_n)
        .filter(|&n| !rows.iter().any(|r| r.n == n && r.verified && r.hat_theta > 0.0))
        .collect()
}

/// Closed-form `θ̂²` of the srg families, for cross-checks.
pub fn family_hat_theta_sq(spec: &FamilySpec) -> Option<Rational> {
    let r = |a: i64, b: i64| Rational::from_ratio(a, b);
    Some(match *spec {
        FamilySpec::DisjointComplete { m, l } => {
            let (m, l) = (m as i64, l as i64);
            r((l - 1) * (m * l - 1), l * l * m * (m - 1))
        }
        FamilySpec::Kneser2 { m } => {
            let m = m as i64;
            r((5 - m) * (5 - m) * (m + 1), m * (m - 1) * (m - 2) * (m - 3))
        }
        FamilySpec::Rook { m } => {
            let m = m as i64;
            r((m - 3) * (m - 3) * (m + 1), 2 * m * m * (m - 1) * (m - 1))
        }
        FamilySpec::Paley { .. } => r(0, 1),
        FamilySpec::GqSymplectic { q } => {
            let (s, t) = (q as i64, q as i64);
            r(
                (s - t - 1) * (s - t - 1) * (s * t + t + 1),
                s * s * (s + 1) * (t * s + 1) * t * (t + 1),
            )
        }
        FamilySpec::Pds { q, l } => {
            let (m, l) = (q as i64, l as i64);
            r((m - 2 * l + 1) * (m - 2 * l + 1) * (m + 1), m * m * l * (m - 1) * (m - l + 1))
        }
        FamilySpec::Composite { l, m, variant } => {
            return crate::group_ring::composite_hat_theta_sq(l, m, variant).ok()
        }
        _ => return None,
    })
}

/// Parameters predicted by the closed formulas for a graph family.
pub fn family_params(spec: &FamilySpec) -> Option<SrgParams> {
    Some(match *spec {
        FamilySpec::DisjointComplete { m, l } => graphs::formulas::disjoint_complete(m as u64, l as u64),
        FamilySpec::Kneser2 { m } => graphs::formulas::kneser2(m as u64),
        FamilySpec::Rook { m } => graphs::formulas::rook(m as u64),
        FamilySpec::Paley { q } => graphs::formulas::paley(q),
        FamilySpec::GqSymplectic { q } => graphs::formulas::gq(q, q),
        FamilySpec::Pds { q, l } => graphs::formulas::pds(q, l as u64),
        _ => return None,
    })
}
