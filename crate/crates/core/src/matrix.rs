//! The solution matrix `S` and verification of the basic system
//!
//! ```text
//! S = Sᵀ,   S ⊙ 1 = 0,   S J = 0,   S ⊙ S + S² = θ S + D
//! ```
//!
//! together with the scale, inflation and block-sum operations that map
//! solutions to solutions.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{dense_square, integer_square, Arithmetic, Scalar};

/// Largest dimension accepted by [`verify_basic`].
pub const MAX_VERIFY_DIM: usize = 20_000;

/// Symmetric zero-diagonal `n × n` matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymSolutionMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Scalar> SymSolutionMatrix<T> {
    /// Validates symmetry and the zero diagonal.
    pub fn new(n: usize, entries: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be at least 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::Shape {
                expected: n * n,
                found: entries.len(),
            });
        }
        for i in 0..n {
            if !entries[i * n + i].is_zero() {
                return Err(Error::NonzeroDiagonal { i });
            }
            for j in i + 1..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::Asymmetric { i, j });
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        Self {
            n,
            entries: vec![T::zero(); n * n],
        }
    }

    /// Builds the matrix from its strict upper triangle, `f(i, j)` for `i < j`.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                entries[j * n + i] = v.clone();
                entries[i * n + j] = v;
            }
        }
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// `‖S‖₂² = Σ S_{i,j}²`.
    pub fn norm_sq(&self) -> T {
        if let Some(img) = T::integer_image(&self.entries) {
            let sum = img
                .numerators
                .iter()
                .try_fold(0i128, |acc, &v| acc.checked_add((v as i128) * (v as i128)));
            if let Some(sum) = sum {
                let den = img.denominator as i128;
                return T::from_i128_ratio(sum, den * den);
            }
        }
        self.entries
            .iter()
            .filter(|v| !v.is_zero())
            .fold(T::zero(), |acc, v| acc + v.clone() * v.clone())
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Distinct off-diagonal values, in first-seen order (row-major, `i < j`).
    pub fn distinct_off_diagonal(&self) -> Vec<T> {
        let mut seen: Vec<T> = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let v = self.get(i, j);
                if !seen.contains(v) {
                    seen.push(v.clone());
                }
            }
        }
        seen
    }
}

/// First reason a matrix fails the basic system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Row `row` does not sum to zero.
    RowSum { row: usize },
    /// Entry `(i, j)` is inconsistent with the θ read off the reference entry.
    Theta { i: usize, j: usize },
    /// `S_{i,j} ≠ S_{j,i}` (only reported by group-function checks).
    Symmetry { i: usize, j: usize },
    /// Nonzero diagonal entry (only reported by group-function checks).
    Diagonal { i: usize },
    /// `(S²)_{i,i} ≠ ‖row i‖²` (only reported by group-function checks).
    Norm { i: usize },
}

/// Outcome of verifying the basic system.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport<T> {
    pub is_solution: bool,
    /// Present iff `is_solution`; `0` for the zero matrix.
    pub theta: Option<T>,
    /// `D_i = (S²)_{i,i}`.
    pub d: Vec<T>,
    pub trace_d: T,
    /// `|θ| / √tr D` for a nonzero solution, otherwise `0`.
    pub hat_theta: f64,
    pub max_residual: f64,
    pub arithmetic: Arithmetic,
    pub violation: Option<Violation>,
}

impl<T: Scalar> SolutionReport<T> {
    /// `θ̂² = θ² / tr D`, exact in rational mode.
    pub fn hat_theta_sq(&self) -> Option<T> {
        let theta = self.theta.as_ref()?;
        if self.trace_d.is_zero() {
            return Some(T::zero());
        }
        Some(theta.clone() * theta.clone() / self.trace_d.clone())
    }
}

fn check_tol<T: Scalar>(tol: f64) -> Result<()> {
    if T::is_exact() && tol != 0.0 {
        return Err(Error::ToleranceInExactMode(tol));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be nonnegative, got {tol}")));
    }
    Ok(())
}

/// Verifies the basic system for `s`.
///
/// Exact scalars are checked for equality (`tol` must be `0`); floats are
/// accepted when every residual is within `tol · (1 + ‖S‖₂²)`.
pub fn verify_basic<T: Scalar>(s: &SymSolutionMatrix<T>, tol: f64) -> Result<SolutionReport<T>> {
    check_tol::<T>(tol)?;
    if s.n > MAX_VERIFY_DIM {
        return Err(Error::TooLarge {
            n: s.n,
            cap: MAX_VERIFY_DIM,
        });
    }
    if let Some(img) = T::integer_image(&s.entries) {
        if let Some(report) = verify_integer::<T>(s.n, &img.numerators, img.denominator) {
            return Ok(report);
        }
    }
    Ok(verify_generic(s, tol))
}

fn verify_generic<T: Scalar>(s: &SymSolutionMatrix<T>, tol: f64) -> SolutionReport<T> {
    let n = s.n;
    let sq = dense_square(&s.entries, n);
    let d: Vec<T> = (0..n).map(|i| sq[i * n + i].clone()).collect();
    let trace_d = d.iter().cloned().fold(T::zero(), |a, b| a + b);
    let scale = 1.0 + trace_d.to_f64_lossy();
    let limit = tol * scale;

    let mut max_residual = 0f64;
    let mut violation = None;
    // Exact residuals are judged by equality, float residuals by the limit.
    let mut note = |res: T, v: Violation| {
        let r = res.abs().to_f64_lossy();
        max_residual = max_residual.max(r);
        let bad = if T::is_exact() { !res.is_zero() } else { r > limit };
        if bad && violation.is_none() {
            violation = Some(v);
        }
    };

    for i in 0..n {
        let sum = s.row(i).iter().cloned().fold(T::zero(), |a, b| a + b);
        note(sum, Violation::RowSum { row: i });
    }

    // Reference entry: largest |S_ij| (first in row-major order among ties).
    let mut reference: Option<(usize, usize)> = None;
    let mut best = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let a = s.get(i, j).abs();
            if a > best {
                best = a;
                reference = Some((i, j));
            }
        }
    }
    let theta = match reference {
        None => T::zero(),
        Some((i, j)) => {
            let sij = s.get(i, j).clone();
            (sij.clone() * sij.clone() + sq[i * n + j].clone()) / sij
        }
    };

    for i in 0..n {
        for j in i + 1..n {
            let sij = s.get(i, j).clone();
            let res = sij.clone() * sij.clone() + sq[i * n + j].clone() - theta.clone() * sij;
            note(res, Violation::Theta { i, j });
        }
    }

    finish(theta, d, trace_d, max_residual, violation)
}

/// Exact verification on `S = N / den` using machine integers; `None` when the
/// integer kernels cannot represent `N²`.
fn verify_integer<T: Scalar>(n: usize, num: &[i64], den: i64) -> Option<SolutionReport<T>> {
    let sq = integer_square(num, n)?;
    let den2 = (den as i128) * (den as i128);
    let d: Vec<T> = (0..n).map(|i| T::from_i128_ratio(sq[i * n + i], den2)).collect();
    let trace_num: i128 = (0..n).map(|i| sq[i * n + i]).sum();
    let trace_d = T::from_i128_ratio(trace_num, den2);

    let mut max_residual = 0f64;
    let mut violation = None;
    let mut flag = |r: f64, v: Violation| {
        max_residual = max_residual.max(r);
        if violation.is_none() {
            violation = Some(v);
        }
    };

    for i in 0..n {
        let sum: i128 = num[i * n..(i + 1) * n].iter().map(|&v| v as i128).sum();
        if sum != 0 {
            flag(sum.unsigned_abs() as f64 / den as f64, Violation::RowSum { row: i });
        }
    }

    let mut reference: Option<(usize, usize)> = None;
    let mut best = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            let a = num[i * n + j].unsigned_abs();
            if a > best {
                best = a;
                reference = Some((i, j));
            }
        }
    }
    // With S = N/d, the θ-equation reads N_ij² + (N²)_ij = (θ d) N_ij.
    let (big_num, big_den) = match reference {
        None => (0i128, 1i128),
        Some((i, j)) => {
            let nij = num[i * n + j] as i128;
            (nij * nij + sq[i * n + j], nij)
        }
    };
    for i in 0..n {
        for j in i + 1..n {
            let nij = num[i * n + j] as i128;
            let lhs = (nij * nij + sq[i * n + j]).checked_mul(big_den)?;
            let rhs = big_num.checked_mul(nij)?;
            if lhs != rhs {
                let r = ((lhs - rhs) as f64 / big_den as f64).abs() / (den as f64 * den as f64);
                flag(r, Violation::Theta { i, j });
            }
        }
    }
    let theta = T::from_i128_ratio(big_num, big_den.checked_mul(den as i128)?);
    Some(finish(theta, d, trace_d, max_residual, violation))
}

fn finish<T: Scalar>(
    theta: T,
    d: Vec<T>,
    trace_d: T,
    max_residual: f64,
    violation: Option<Violation>,
) -> SolutionReport<T> {
    let is_solution = violation.is_none();
    let hat_theta = if is_solution && !trace_d.is_zero() {
        theta.abs().to_f64_lossy() / trace_d.to_f64_lossy().sqrt()
    } else {
        0.0
    };
    SolutionReport {
        is_solution,
        theta: is_solution.then_some(theta),
        d,
        trace_d,
        hat_theta,
        max_residual,
        arithmetic: T::ARITHMETIC,
        violation,
    }
}

/// `θ̂ = |θ| / ‖S‖₂`.
pub fn hat_theta<T: Scalar>(theta: &T, s: &SymSolutionMatrix<T>) -> Result<f64> {
    let norm = s.norm_sq();
    if norm.is_zero() {
        return Err(Error::ZeroSolution);
    }
    Ok(theta.abs().to_f64_lossy() / norm.to_f64_lossy().sqrt())
}

/// `θ̂² = θ² / ‖S‖₂²`, exact in rational mode.
pub fn hat_theta_sq<T: Scalar>(theta: &T, s: &SymSolutionMatrix<T>) -> Result<T> {
    let norm = s.norm_sq();
    if norm.is_zero() {
        return Err(Error::ZeroSolution);
    }
    Ok(theta.clone() * theta.clone() / norm)
}

/// `(tS, tθ)`.
pub fn scale<T: Scalar>(s: &SymSolutionMatrix<T>, theta: &T, t: &T) -> (SymSolutionMatrix<T>, T) {
    (s.map(|v| v.clone() * t.clone()), theta.clone() * t.clone())
}

/// Embeds `S` as the leading block of an `m × m` zero matrix.
pub fn inflate<T: Scalar>(s: &SymSolutionMatrix<T>, m: usize) -> Result<SymSolutionMatrix<T>> {
    if m <= s.n {
        return Err(Error::InvalidParameter(format!(
            "inflation target {m} must exceed the dimension {}",
            s.n
        )));
    }
    Ok(direct_sum(s, &SymSolutionMatrix::zeros(m - s.n)))
}

fn direct_sum<T: Scalar>(a: &SymSolutionMatrix<T>, b: &SymSolutionMatrix<T>) -> SymSolutionMatrix<T> {
    let n = a.n + b.n;
    let mut entries = vec![T::zero(); n * n];
    for i in 0..a.n {
        entries[i * n..i * n + a.n].clone_from_slice(a.row(i));
    }
    for i in 0..b.n {
        let r = a.n + i;
        entries[r * n + a.n..(r + 1) * n].clone_from_slice(b.row(i));
    }
    SymSolutionMatrix { n, entries }
}

/// Block sum of two solutions.
///
/// For `θ₁, θ₂ ≠ 0` the result is `S₁/θ₁ ⊕ S₂/θ₂` with `θ = 1`; for
/// `θ₁ = θ₂ = 0` it is `S₁ ⊕ S₂` with `θ = 0`. Both inputs are re-verified
/// with the scalar's default tolerance.
pub fn block_combine<T: Scalar>(
    s1: &SymSolutionMatrix<T>,
    theta1: &T,
    s2: &SymSolutionMatrix<T>,
    theta2: &T,
) -> Result<(SymSolutionMatrix<T>, T)> {
    let tol = T::default_tolerance();
    for (s, theta) in [(s1, theta1), (s2, theta2)] {
        let rep = verify_basic(s, tol)?;
        if !rep.is_solution {
            return Err(Error::NotASolution);
        }
        // The reported θ is canonical only for nonzero S; a zero block is
        // compatible with any θ.
        if !s.is_zero() && !rep.theta.as_ref().is_some_and(|t| t.approx_eq(theta, tol * (1.0 + rep.trace_d.to_f64_lossy()))) {
            return Err(Error::NotASolution);
        }
    }
    match (theta1.is_zero(), theta2.is_zero()) {
        (false, false) => {
            let a = s1.map(|v| v.clone() / theta1.clone());
            let b = s2.map(|v| v.clone() / theta2.clone());
            Ok((direct_sum(&a, &b), T::one()))
        }
        (true, true) => Ok((direct_sum(s1, s2), T::zero())),
        _ => Err(Error::UnsupportedCombination),
    }
}

/// `θ̂₁θ̂₂ / √(θ̂₁² + θ̂₂²)`, the size of a block sum with nonzero thetas, in
/// squared form: `θ̂₁²θ̂₂² / (θ̂₁² + θ̂₂²)`.
pub fn block_hat_theta_sq<T: Scalar>(h1_sq: &T, h2_sq: &T) -> T {
    h1_sq.clone() * h2_sq.clone() / (h1_sq.clone() + h2_sq.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::One;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    /// Pentagon: Paley q = 5 with z = 1, y = -1/2.
    fn pentagon() -> SymSolutionMatrix<Rational> {
        SymSolutionMatrix::from_upper(5, |i, j| {
            let d = (j - i) % 5;
            if d == 1 || d == 4 {
                q(1, 2)
            } else {
                q(-1, 2)
            }
        })
    }

    /// Two disjoint edges on 4 vertices: S = A - K/3.
    fn two_edges() -> SymSolutionMatrix<Rational> {
        SymSolutionMatrix::from_upper(4, |i, j| {
            if i / 2 == j / 2 {
                q(2, 3)
            } else {
                q(-1, 3)
            }
        })
    }

    /// Independent oracle: evaluates every scalar equation of the system
    /// entry by entry, with no shared code path.
    fn brute_force_theta(s: &SymSolutionMatrix<Rational>) -> Option<Rational> {
        let n = s.n();
        for i in 0..n {
            let mut sum = Rational::zero();
            for k in 0..n {
                sum += s.get(i, k);
            }
            if !sum.is_zero() {
                return None;
            }
        }
        let mut theta: Option<Rational> = None;
        for i in 0..n {
            for j in i + 1..n {
                let mut lhs = s.get(i, j) * s.get(i, j);
                for k in 0..n {
                    lhs += s.get(i, k) * s.get(k, j);
                }
                let sij = s.get(i, j).clone();
                if sij.is_zero() {
                    if !lhs.is_zero() {
                        return None;
                    }
                } else {
                    let t = lhs / sij;
                    match &theta {
                        None => theta = Some(t),
                        Some(old) if *old != t => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(theta.unwrap_or_else(Rational::zero))
    }

    #[test]
    fn zero_matrix_is_a_solution_with_theta_zero() {
        let rep = verify_basic(&SymSolutionMatrix::<Rational>::zeros(4), 0.0).unwrap();
        assert!(rep.is_solution);
        assert_eq!(rep.theta, Some(Rational::zero()));
        assert_eq!(rep.hat_theta, 0.0);
    }

    #[test]
    fn pentagon_solves_with_theta_zero() {
        let s = pentagon();
        assert_eq!(brute_force_theta(&s), Some(Rational::zero()));
        let rep = verify_basic(&s, 0.0).unwrap();
        assert!(rep.is_solution);
        assert_eq!(rep.theta, Some(Rational::zero()));
        assert_eq!(rep.max_residual, 0.0);
        // D_i = Σ_k S_ik² = 4 · 1/4.
        assert!(rep.d.iter().all(|v| *v == Rational::one()));
        assert_eq!(rep.trace_d, Rational::from_int(5));
    }

    #[test]
    fn integer_and_generic_paths_agree() {
        for s in [pentagon(), two_edges()] {
            let fast = verify_basic(&s, 0.0).unwrap();
            let slow = verify_generic(&s, 0.0);
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn constant_off_diagonal_is_not_a_solution() {
        let s = SymSolutionMatrix::from_upper(5, |_, _| q(3, 7));
        let rep = verify_basic(&s, 0.0).unwrap();
        assert!(!rep.is_solution);
        assert_eq!(rep.violation, Some(Violation::RowSum { row: 0 }));
        assert!(rep.theta.is_none());
    }

    #[test]
    fn inconsistent_theta_records_witness() {
        // Zero row sums but not a solution.
        let s = SymSolutionMatrix::from_upper(4, |i, j| match (i, j) {
            (0, 1) => q(1, 1),
            (0, 2) => q(-1, 1),
            (1, 3) => q(-1, 1),
            (2, 3) => q(1, 1),
            _ => q(0, 1),
        });
        assert!(brute_force_theta(&s).is_none());
        let rep = verify_basic(&s, 0.0).unwrap();
        assert!(!rep.is_solution);
        assert!(matches!(rep.violation, Some(Violation::Theta { .. })));
    }

    #[test]
    fn structural_errors_are_distinct() {
        let asym = vec![0.0, 1.0, 2.0, 0.0];
        assert_eq!(SymSolutionMatrix::new(2, asym).unwrap_err(), Error::Asymmetric { i: 0, j: 1 });
        let diag = vec![1.0, 0.0, 0.0, 0.0];
        assert_eq!(SymSolutionMatrix::new(2, diag).unwrap_err(), Error::NonzeroDiagonal { i: 0 });
        assert!(matches!(SymSolutionMatrix::<f64>::new(2, vec![0.0; 3]), Err(Error::Shape { .. })));
    }

    #[test]
    fn exact_mode_rejects_tolerance() {
        assert_eq!(
            verify_basic(&pentagon(), 1e-9).unwrap_err(),
            Error::ToleranceInExactMode(1e-9)
        );
    }

    #[test]
    fn float_mode_uses_relative_tolerance() {
        let s = pentagon().map(|v| v.clone());
        let f = SymSolutionMatrix::new(5, s.entries().iter().map(|v| v.to_f64_lossy()).collect()).unwrap();
        let rep = verify_basic(&f, 1e-9).unwrap();
        assert!(rep.is_solution);
        assert!(rep.theta.unwrap().abs() < 1e-12);
        let f32m = SymSolutionMatrix::new(5, f.entries().iter().map(|&v| v as f32).collect()).unwrap();
        assert!(verify_basic(&f32m, f32::default_tolerance()).unwrap().is_solution);
    }

    #[test]
    fn hat_theta_values() {
        let s = two_edges();
        let rep = verify_basic(&s, 0.0).unwrap();
        let theta = rep.theta.clone().unwrap();
        // srg(4,1,0,0): θ = λ - μ + 1 = 1, tr D = n r r^c / (n-1) = 4·1·2/3.
        assert_eq!(theta, Rational::one());
        assert_eq!(hat_theta_sq(&theta, &s).unwrap(), q(3, 8));
        assert!((hat_theta(&theta, &s).unwrap() - 0.5 * (1.5f64).sqrt()).abs() < 1e-15);
        assert_eq!(hat_theta(&Rational::zero(), &pentagon()).unwrap(), 0.0);
        assert_eq!(
            hat_theta(&Rational::one(), &SymSolutionMatrix::<Rational>::zeros(3)).unwrap_err(),
            Error::ZeroSolution
        );
    }

    #[test]
    fn scale_edge_cases() {
        let s = two_edges();
        let (s1, t1) = scale(&s, &Rational::one(), &Rational::one());
        assert_eq!((s1, t1), (s.clone(), Rational::one()));
        let (s0, t0) = scale(&s, &Rational::one(), &Rational::zero());
        assert!(s0.is_zero() && t0.is_zero());
    }

    #[test]
    fn inflate_keeps_theta() {
        let s = two_edges();
        let big = inflate(&s, 5).unwrap();
        let rep = verify_basic(&big, 0.0).unwrap();
        assert!(rep.is_solution);
        assert_eq!(rep.theta, Some(Rational::one()));
        assert!(inflate(&s, 4).is_err());
        assert!(inflate(&SymSolutionMatrix::<Rational>::zeros(3), 6).unwrap().is_zero());
    }

    #[test]
    fn block_combine_cases() {
        let s = two_edges();
        let one = Rational::one();
        let (b, theta) = block_combine(&s, &one, &s, &one).unwrap();
        let rep = verify_basic(&b, 0.0).unwrap();
        assert!(rep.is_solution);
        assert_eq!(theta, one);
        assert_eq!(rep.theta, Some(Rational::one()));
        let h = hat_theta_sq(&one, &s).unwrap();
        assert_eq!(rep.hat_theta_sq().unwrap(), block_hat_theta_sq(&h, &h));
        assert_eq!(rep.hat_theta_sq().unwrap(), h / Rational::from_int(2));

        let p = pentagon();
        let zero = Rational::zero();
        let (bp, tp) = block_combine(&p, &zero, &p, &zero).unwrap();
        assert_eq!(bp.n(), 10);
        assert!(tp.is_zero());
        assert!(verify_basic(&bp, 0.0).unwrap().is_solution);

        assert_eq!(
            block_combine(&s, &one, &p, &zero).unwrap_err(),
            Error::UnsupportedCombination
        );
        assert_eq!(block_combine(&s, &zero, &p, &zero).unwrap_err(), Error::NotASolution);
    }
}
