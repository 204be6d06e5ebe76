//! Strongly regular graph families and the passage from an srg to a
//! two-valued solution `S = A + yK`, `y = r / (1 - n)`.
//!
//! Vertex orderings are fixed so that generated files are byte-stable:
//!
//! * Kneser graphs: 2-subsets `{a < b}` of `0..m` in lexicographic order.
//! * Rook's graph: vertex `row · m + col`.
//! * Field-based families: field elements by their index in
//!   [`FieldTable`](crate::finite_field::FieldTable), pairs `(x, y)` of
//!   elements as `x · q + y`.

use num_rational::BigRational;
use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::FieldTable;
use crate::matrix::SymSolutionMatrix;
use crate::scalar::{Rational, Scalar};

/// Simple undirected graph backed by one adjacency bitset per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::MalformedGraph(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::MalformedGraph(format!("loop at vertex {a}")));
            }
            g.set(a, b);
        }
        Ok(g)
    }

    /// Validates a dense 0/1 adjacency matrix (symmetric, zero diagonal).
    pub fn from_adjacency(n: usize, adjacency: &[u8]) -> Result<Self> {
        if adjacency.len() != n * n {
            return Err(Error::MalformedGraph(format!(
                "expected {} entries, found {}",
                n * n,
                adjacency.len()
            )));
        }
        let mut g = Self::empty(n);
        for i in 0..n {
            if adjacency[i * n + i] != 0 {
                return Err(Error::MalformedGraph(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                let (a, b) = (adjacency[i * n + j], adjacency[j * n + i]);
                if a > 1 || b > 1 {
                    return Err(Error::MalformedGraph(format!("entry at ({i}, {j}) is not 0/1")));
                }
                if a != b {
                    return Err(Error::MalformedGraph(format!("asymmetric at ({i}, {j})")));
                }
                if a == 1 {
                    g.set(i, j);
                }
            }
        }
        Ok(g)
    }

    /// Cayley graph on `0..n`: `a ~ b` iff `connected(a, b)`, for a symmetric
    /// irreflexive predicate.
    pub(crate) fn from_predicate(n: usize, mut connected: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                if connected(a, b) {
                    g.set(a, b);
                }
            }
        }
        g
    }

    fn set(&mut self, a: usize, b: usize) {
        self.rows[a * self.words + b / 64] |= 1 << (b % 64);
        self.rows[b * self.words + a / 64] |= 1 << (a % 64);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.rows[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.rows[a * self.words..(a + 1) * self.words]
    }

    pub fn degree(&self, a: usize) -> usize {
        self.row(a).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn common_neighbors(&self, a: usize, b: usize) -> usize {
        self.row(a)
            .iter()
            .zip(self.row(b))
            .map(|(x, y)| (x & y).count_ones() as usize)
            .sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|a| self.degree(a)).sum::<usize>() / 2
    }

    /// Sorted edge list with `i < j`.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.adjacent(a, b) {
                    out.push([a, b]);
                }
            }
        }
        out
    }

    /// Dense 0/1 adjacency matrix, row-major.
    pub fn adjacency(&self) -> Vec<u8> {
        let n = self.n;
        let mut out = vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                out[a * n + b] = u8::from(self.adjacent(a, b));
            }
        }
        out
    }
}

/// Parameters `(n, r, λ, μ)` of a strongly regular graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SrgParams {
    pub n: u64,
    pub r: u64,
    pub lambda: u64,
    pub mu: u64,
}

impl SrgParams {
    /// Validates ranges and the counting relation `μ(n - r - 1) = r(r - λ - 1)`.
    pub fn new(n: u64, r: u64, lambda: u64, mu: u64) -> Result<Self> {
        let p = Self { n, r, lambda, mu };
        if n == 0 || r > n - 1 || lambda > r || (r < n - 1 && mu > r) {
            return Err(Error::InvalidParameter(format!("srg parameters {p:?} out of range")));
        }
        if !p.relation_holds() {
            return Err(Error::InvalidParameter(format!(
                "srg parameters {p:?} violate mu(n-r-1) = r(r-lambda-1)"
            )));
        }
        Ok(p)
    }

    /// `μ(n - r - 1) = r(r - λ - 1)`, evaluated over the integers.
    pub fn relation_holds(&self) -> bool {
        let (n, r, l, m) = (self.n as i128, self.r as i128, self.lambda as i128, self.mu as i128);
        m * (n - r - 1) == r * (r - l - 1)
    }

    /// `r^c = n - r - 1`.
    pub fn r_complement(&self) -> u64 {
        self.n - self.r - 1
    }

    /// Parameters of the complementary graph.
    pub fn complement(&self) -> Self {
        let (n, r, l, m) = (self.n as i64, self.r as i64, self.lambda as i64, self.mu as i64);
        let rc = n - r - 1;
        let (lc, mc) = if self.r == 0 {
            // Complement of the empty graph is complete: no non-adjacent pairs.
            (n - 2, 0)
        } else if rc == 0 {
            (0, 0)
        } else {
            (m + n - 2 * (r + 1), l + n - 2 * r)
        };
        Self {
            n: self.n,
            r: rc as u64,
            lambda: lc.max(0) as u64,
            mu: mc as u64,
        }
    }

    /// `θ = λ - μ + 1` of the associated two-valued solution.
    pub fn theta(&self) -> i64 {
        self.lambda as i64 - self.mu as i64 + 1
    }

    /// `θ̂² = (λ - μ + 1)² (n - 1) / (n r r^c)`; `None` for the empty or
    /// complete graph.
    pub fn hat_theta_sq(&self) -> Option<Rational> {
        let rc = self.r_complement();
        if self.r == 0 || rc == 0 {
            return None;
        }
        let t = BigInt::from(self.theta());
        let num = &t * &t * BigInt::from(self.n - 1);
        let den = BigInt::from(self.n) * BigInt::from(self.r) * BigInt::from(rc);
        Some(BigRational::new(num, den))
    }

    pub fn hat_theta(&self) -> Option<f64> {
        let rc = self.r_complement();
        if self.r == 0 || rc == 0 {
            return None;
        }
        let (n, r, rc) = (self.n as f64, self.r as f64, rc as f64);
        Some(self.theta().unsigned_abs() as f64 * ((n - 1.0) / (n * r * rc)).sqrt())
    }
}

/// Why a graph is not strongly regular, with a witnessing vertex pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotSrg {
    /// Vertices `u` and `v` have different degrees.
    Irregular { u: usize, v: usize },
    /// Adjacent pair whose common-neighbor count differs from the first one.
    Lambda { u: usize, v: usize },
    /// Non-adjacent pair whose common-neighbor count differs from the first one.
    Mu { u: usize, v: usize },
}

/// Brute-force srg detection over all vertex pairs.
///
/// λ (resp. μ) is reported as `0` when no adjacent (resp. non-adjacent) pair
/// exists.
pub fn srg_params_of(g: &Graph) -> std::result::Result<SrgParams, NotSrg> {
    let n = g.n();
    if n == 0 {
        return Ok(SrgParams { n: 0, r: 0, lambda: 0, mu: 0 });
    }
    let r = g.degree(0);
    for v in 1..n {
        if g.degree(v) != r {
            return Err(NotSrg::Irregular { u: 0, v });
        }
    }
    let mut lambda: Option<usize> = None;
    let mut mu: Option<usize> = None;
    for u in 0..n {
        for v in u + 1..n {
            let c = g.common_neighbors(u, v);
            let (slot, adjacent) = if g.adjacent(u, v) {
                (&mut lambda, true)
            } else {
                (&mut mu, false)
            };
            match slot {
                None => *slot = Some(c),
                Some(prev) if *prev != c => {
                    return Err(if adjacent {
                        NotSrg::Lambda { u, v }
                    } else {
                        NotSrg::Mu { u, v }
                    })
                }
                _ => {}
            }
        }
    }
    Ok(SrgParams {
        n: n as u64,
        r: r as u64,
        lambda: lambda.unwrap_or(0) as u64,
        mu: mu.unwrap_or(0) as u64,
    })
}

/// `m` disjoint copies of the complete graph on `l` vertices:
/// `srg(ml, l - 1, l - 2, 0)`.
pub fn disjoint_complete(m: usize, l: usize) -> Result<Graph> {
    if m < 1 || l < 2 {
        return Err(Error::InvalidParameter(format!(
            "disjoint_complete needs m >= 1 and l >= 2, got m = {m}, l = {l}"
        )));
    }
    Ok(Graph::from_predicate(m * l, |a, b| a / l == b / l))
}

fn two_subsets(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect()
}

/// Kneser graph `K(m, 2)`: 2-subsets of `0..m`, adjacent when disjoint.
pub fn kneser2(m: usize) -> Result<Graph> {
    if m < 4 {
        return Err(Error::InvalidParameter(format!("kneser2 needs m >= 4, got {m}")));
    }
    let verts = two_subsets(m);
    Ok(Graph::from_predicate(verts.len(), |x, y| {
        let ((a, b), (c, d)) = (verts[x], verts[y]);
        a != c && a != d && b != c && b != d
    }))
}

/// Rook's graph on an `m × m` board, as the Cayley graph of `ℤ/m × ℤ/m` with
/// connection set `{(i, j) ≠ (0, 0) : i = 0 or j = 0}`.
pub fn rook(m: usize) -> Result<Graph> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("rook needs m >= 2, got {m}")));
    }
    let in_set = |i: usize, j: usize| (i, j) != (0, 0) && (i == 0 || j == 0);
    Ok(Graph::from_predicate(m * m, |a, b| {
        let (ra, ca) = (a / m, a % m);
        let (rb, cb) = (b / m, b % m);
        in_set((rb + m - ra) % m, (cb + m - ca) % m)
    }))
}

/// Paley graph on `𝔽_q`, `q ≡ 1 (mod 4)`: `a ~ b` iff `b - a` is a nonzero square.
pub fn paley_graph(q: u64) -> Result<Graph> {
    if q % 4 != 1 {
        return Err(Error::InvalidParameter(format!("Paley graph needs q ≡ 1 mod 4, got {q}")));
    }
    let f = FieldTable::new(q)?;
    Ok(paley_from_field(&f))
}

pub(crate) fn paley_from_field(f: &FieldTable) -> Graph {
    let q = f.order() as usize;
    let square: Vec<bool> = (0..q as u32).map(|x| x != 0 && f.log_index(x).is_multiple_of(2)).collect();
    Graph::from_predicate(q, |a, b| square[f.sub_index(b as u32, a as u32) as usize])
}

/// Collinearity graph of the symplectic generalized quadrangle `W(q)`:
/// points are the 1-dimensional subspaces of `𝔽_q⁴`, adjacent when distinct
/// and orthogonal under `x₀y₁ - x₁y₀ + x₂y₃ - x₃y₂`.
///
/// Points are listed by their normalized representative (first nonzero
/// coordinate `1`) in index order of `(x₀, x₁, x₂, x₃)`.
pub fn gq_symplectic(q: u64) -> Result<Graph> {
    let f = FieldTable::new(q)?;
    let q = q as u32;
    let mut points: Vec<[u32; 4]> = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let v = [a, b, c, d];
                    if v.iter().find(|&&x| x != 0) == Some(&1) {
                        points.push(v);
                    }
                }
            }
        }
    }
    let form = |x: &[u32; 4], y: &[u32; 4]| {
        let t1 = f.sub_index(f.mul_index(x[0], y[1]), f.mul_index(x[1], y[0]));
        let t2 = f.sub_index(f.mul_index(x[2], y[3]), f.mul_index(x[3], y[2]));
        f.add_index(t1, t2)
    };
    Ok(Graph::from_predicate(points.len(), |a, b| form(&points[a], &points[b]) == 0))
}

/// Cayley graph on `𝔽_q ⊕ 𝔽_q` whose connection set is the union of `l`
/// lines through the origin, minus the origin. Slopes are the first `l`
/// field elements in index order; `l = q + 1` adds the vertical line.
pub fn pds_subgroups(q: u64, l: usize) -> Result<Graph> {
    let f = FieldTable::new(q)?;
    let qu = q as usize;
    if l < 1 || l > qu + 1 {
        return Err(Error::InvalidParameter(format!("pds needs 1 <= l <= q + 1, got l = {l}, q = {q}")));
    }
    let mut in_set = vec![false; qu * qu];
    for slope in 0..l.min(qu) as u32 {
        for x in 0..q as u32 {
            let y = f.mul_index(slope, x);
            in_set[x as usize * qu + y as usize] = true;
        }
    }
    if l == qu + 1 {
        for y in 0..qu {
            in_set[y] = true;
        }
    }
    in_set[0] = false;
    Ok(Graph::from_predicate(qu * qu, |a, b| {
        let (xa, ya) = ((a / qu) as u32, (a % qu) as u32);
        let (xb, yb) = ((b / qu) as u32, (b % qu) as u32);
        let dx = f.sub_index(xb, xa) as usize;
        let dy = f.sub_index(yb, ya) as usize;
        in_set[dx * qu + dy]
    }))
}

/// Complementary graph, `A^c = K - A`.
pub fn complement(g: &Graph) -> Graph {
    Graph::from_predicate(g.n(), |a, b| !g.adjacent(a, b))
}

/// `S = A + yK` with `y = r / (1 - n)` and `θ = λ - μ + 1`.
pub fn srg_to_solution<T: Scalar>(g: &Graph) -> Result<(SymSolutionMatrix<T>, T)> {
    let p = srg_params_of(g)
        .map_err(|e| Error::Precondition(format!("graph is not strongly regular: {e:?}")))?;
    if p.r == 0 || p.r_complement() == 0 {
        return Err(Error::DegenerateGraph);
    }
    let y = T::from_ratio(p.r as i64, 1 - p.n as i64);
    let x = T::one() + y.clone();
    let s = SymSolutionMatrix::from_upper(g.n(), |i, j| if g.adjacent(i, j) { x.clone() } else { y.clone() });
    Ok((s, T::from_int(p.theta())))
}

/// Closed-form parameter formulas per family, used for cross-checks.
pub mod formulas {
    use super::SrgParams;

    fn c2(m: u64) -> u64 {
        m * m.saturating_sub(1) / 2
    }

    pub fn disjoint_complete(m: u64, l: u64) -> SrgParams {
        SrgParams { n: m * l, r: l - 1, lambda: l - 2, mu: 0 }
    }

    pub fn kneser2(m: u64) -> SrgParams {
        SrgParams {
            n: c2(m),
            r: c2(m - 2),
            lambda: c2(m.saturating_sub(4)),
            mu: c2(m - 3),
        }
    }

    pub fn rook(m: u64) -> SrgParams {
        SrgParams { n: m * m, r: 2 * (m - 1), lambda: m - 2, mu: 2 }
    }

    pub fn paley(q: u64) -> SrgParams {
        SrgParams { n: q, r: (q - 1) / 2, lambda: (q - 5) / 4, mu: (q - 1) / 4 }
    }

    /// Generalized quadrangle of order `(s, t)`.
    pub fn gq(s: u64, t: u64) -> SrgParams {
        SrgParams { n: (s + 1) * (s * t + 1), r: s * (t + 1), lambda: s - 1, mu: t + 1 }
    }

    /// Union of `l` subgroups of order `m` in a group of order `m²`.
    pub fn pds(m: u64, l: u64) -> SrgParams {
        SrgParams { n: m * m, r: l * (m - 1), lambda: l * l + m - 3 * l, mu: l * l - l }
    }
}
