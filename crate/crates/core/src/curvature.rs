//! Diagonal algebraic curvature tensors.
//!
//! A diagonal tensor acts on `∧²V` by `R(eᵢ ∧ eⱼ) = r_{i,j} eᵢ ∧ eⱼ`; it is
//! stored as the symmetric zero-diagonal matrix `(r_{i,j})`. For such tensors
//! Hamilton's `#` reduces to a Jordan product,
//!
//! ```text
//! (R#T)_{i,j} = ½ Σ_k (r_{i,k} t_{j,k} + t_{i,k} r_{j,k}),
//! ```
//!
//! and `R² + R# = θR` with `r_{i,j} = θ/(n-1) + S_{i,j}` is equivalent to the
//! basic system for `S` plus `(n-1) r² = θ r`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{verify_basic, SymSolutionMatrix};
use crate::scalar::Scalar;

/// Largest dimension accepted by [`sharp_bruteforce`].
pub const MAX_BRUTEFORCE_DIM: usize = 8;

/// Eigenvalues `r_{i,j}` of a diagonal curvature tensor, row-major `n × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagCurvature<T> {
    n: usize,
    r: Vec<T>,
}

impl<T: Scalar> DiagCurvature<T> {
    pub fn new(n: usize, r: Vec<T>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("tensor dimension must be at least 2, got {n}")));
        }
        let s = SymSolutionMatrix::new(n, r)?;
        Ok(Self::from_matrix(&s))
    }

    fn from_matrix(s: &SymSolutionMatrix<T>) -> Self {
        Self {
            n: s.n(),
            r: s.entries().to_vec(),
        }
    }

    pub fn from_upper(n: usize, f: impl FnMut(usize, usize) -> T) -> Self {
        Self::from_matrix(&SymSolutionMatrix::from_upper(n, f))
    }

    /// All `r_{i,j} = 1`: the unit sphere.
    pub fn identity(n: usize) -> Self {
        Self::from_upper(n, |_, _| T::one())
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_upper(n, |_, _| T::zero())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.r[i * self.n + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.r
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Self {
            n: self.n,
            r: self.r.iter().map(f).collect(),
        }
    }

    /// Pointwise `a·self + b·other`.
    pub fn combine(&self, a: &T, other: &Self, b: &T) -> Result<Self> {
        same_size(self, other)?;
        Ok(Self::from_upper(self.n, |i, j| {
            a.clone() * self.get(i, j).clone() + b.clone() * other.get(i, j).clone()
        }))
    }

    /// The eigenvalue matrix as a [`SymSolutionMatrix`].
    pub fn as_matrix(&self) -> SymSolutionMatrix<T> {
        SymSolutionMatrix::new(self.n, self.r.clone()).expect("tensor entries are symmetric")
    }

    /// Largest `|r_{i,j}|`.
    pub fn max_abs(&self) -> f64 {
        self.r.iter().map(|v| v.abs().to_f64_lossy()).fold(0.0, f64::max)
    }
}

fn same_size<T, U>(a: &DiagCurvature<T>, b: &DiagCurvature<U>) -> Result<()> {
    if a.n != b.n {
        return Err(Error::Shape {
            expected: a.n * a.n,
            found: b.n * b.n,
        });
    }
    Ok(())
}

/// `R # T` by the Jordan-product formula.
pub fn jordan_sharp<T: Scalar>(r: &DiagCurvature<T>, t: &DiagCurvature<T>) -> Result<DiagCurvature<T>> {
    same_size(r, t)?;
    let n = r.n;
    let half = T::from_ratio(1, 2);
    Ok(DiagCurvature::from_upper(n, |i, j| {
        let mut acc = T::zero();
        for k in 0..n {
            acc = acc
                + r.get(i, k).clone() * t.get(j, k).clone()
                + t.get(i, k).clone() * r.get(j, k).clone();
        }
        half.clone() * acc
    }))
}

/// Pairs `i < j` in lexicographic order, the basis of `so(n)`.
fn planes(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// `X = eᵢeⱼᵀ - eⱼeᵢᵀ` as a dense matrix.
fn skew(n: usize, (i, j): (usize, usize)) -> Vec<f64> {
    let mut x = vec![0.0; n * n];
    x[i * n + j] = 1.0;
    x[j * n + i] = -1.0;
    x
}

fn matmul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Matrix of `ad(X_α)` on `so(n)` in the basis `X_γ`; the coefficient of
/// `X_δ` in `Y` is `⟨Y, X_δ⟩ / ⟨X_δ, X_δ⟩ = Y_{δ.0, δ.1}`.
fn ad_matrices(n: usize) -> Vec<Vec<f64>> {
    let basis = planes(n);
    let mats: Vec<Vec<f64>> = basis.iter().map(|&p| skew(n, p)).collect();
    let dim = basis.len();
    mats.iter()
        .map(|xa| {
            let mut ad = vec![0.0; dim * dim];
            for (g, xg) in mats.iter().enumerate() {
                let ab = matmul(n, xa, xg);
                let ba = matmul(n, xg, xa);
                for (d, &(i, j)) in basis.iter().enumerate() {
                    ad[d * dim + g] = ab[i * n + j] - ba[i * n + j];
                }
            }
            ad
        })
        .collect()
}

/// The full matrix `⟨(R#T) X_α, X_β⟩ = -½ tr(R̃ ∘ ad(X_α) ∘ T̃ ∘ ad(X_β))`
/// over pairs of planes, in lexicographic plane order.
pub fn sharp_bruteforce_matrix(r: &DiagCurvature<f64>, t: &DiagCurvature<f64>) -> Result<Vec<Vec<f64>>> {
    same_size(r, t)?;
    let n = r.n;
    if n > MAX_BRUTEFORCE_DIM {
        return Err(Error::TooLarge {
            n,
            cap: MAX_BRUTEFORCE_DIM,
        });
    }
    let basis = planes(n);
    let dim = basis.len();
    let rv: Vec<f64> = basis.iter().map(|&(i, j)| *r.get(i, j)).collect();
    let tv: Vec<f64> = basis.iter().map(|&(i, j)| *t.get(i, j)).collect();
    let ads = ad_matrices(n);
    let mut out = vec![vec![0.0; dim]; dim];
    for (a, ad_a) in ads.iter().enumerate() {
        for (b, ad_b) in ads.iter().enumerate() {
            let mut tr = 0.0;
            for g in 0..dim {
                for d in 0..dim {
                    tr += rv[g] * ad_a[g * dim + d] * tv[d] * ad_b[d * dim + g];
                }
            }
            out[a][b] = -0.5 * tr;
        }
    }
    Ok(out)
}

/// `R # T` from the Lie-theoretic trace formula; the diagonal of
/// [`sharp_bruteforce_matrix`]. Limited to `n ≤ 8`.
pub fn sharp_bruteforce(r: &DiagCurvature<f64>, t: &DiagCurvature<f64>) -> Result<DiagCurvature<f64>> {
    let full = sharp_bruteforce_matrix(r, t)?;
    let basis = planes(r.n);
    let mut out = vec![0.0; r.n * r.n];
    for (a, &(i, j)) in basis.iter().enumerate() {
        out[i * r.n + j] = full[a][a];
        out[j * r.n + i] = full[a][a];
    }
    DiagCurvature::new(r.n, out)
}

/// `Ric(R) eᵢ = Σ_k r_{i,k} eᵢ`.
pub fn ricci_diag<T: Scalar>(r: &DiagCurvature<T>) -> Vec<T> {
    r.r.chunks(r.n)
        .map(|row| row.iter().cloned().fold(T::zero(), |a, b| a + b))
        .collect()
}

/// `s(R) = Σ_{i≠j} r_{i,j}`.
pub fn scalar_curvature<T: Scalar>(r: &DiagCurvature<T>) -> T {
    ricci_diag(r).into_iter().fold(T::zero(), |a, b| a + b)
}

/// `R = r₀·id + W`, with the Einstein test on `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct EinsteinDecomposition<T> {
    pub r0: T,
    pub w: DiagCurvature<T>,
    pub is_einstein: bool,
    /// `Σ_{i≠j} w_{i,j}²`, the squared norm of `W` read as a matrix `S`.
    pub s_norm_sq: T,
    /// `Σ_{i<j} w_{i,j}²`, the squared norm of `W` on `∧²V`; half of `s_norm_sq`.
    pub w_norm_sq: T,
}

/// `r₀ = s / (n(n-1))`, `W = R - r₀·id`; Einstein iff every row of `W` sums
/// to zero (exactly, or within `tol` for floats).
pub fn einstein_decompose<T: Scalar>(r: &DiagCurvature<T>, tol: f64) -> EinsteinDecomposition<T> {
    let n = r.n;
    let r0 = scalar_curvature(r) / T::from_usize(n * (n - 1)).expect("dimension fits the scalar");
    let w = DiagCurvature::from_upper(n, |i, j| r.get(i, j).clone() - r0.clone());
    let is_einstein = ricci_diag(&w).iter().all(|v| v.approx_eq(&T::zero(), tol));
    let s_norm_sq = w.as_matrix().norm_sq();
    let w_norm_sq = s_norm_sq.clone() / T::from_int(2);
    EinsteinDecomposition {
        r0,
        w,
        is_einstein,
        s_norm_sq,
        w_norm_sq,
    }
}

/// Which root of `(n-1) r² = θ r` to use for the constant part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstantBranch {
    /// `r = θ / (n-1)`.
    #[default]
    Sphere,
    /// `r = 0`.
    Zero,
}

/// `r_{i,j} = r + S_{i,j}` for a verified solution `(S, θ)`.
pub fn solution_to_tensor<T: Scalar>(
    s: &SymSolutionMatrix<T>,
    theta: &T,
    branch: ConstantBranch,
) -> Result<DiagCurvature<T>> {
    let n = s.n();
    if n < 2 {
        return Err(Error::InvalidParameter("tensor dimension must be at least 2".into()));
    }
    let tol = T::default_tolerance();
    let rep = verify_basic(s, tol)?;
    let consistent = match &rep.theta {
        Some(t) => s.is_zero() || t.approx_eq(theta, tol * (1.0 + theta.abs().to_f64_lossy())),
        None => false,
    };
    if !consistent {
        return Err(Error::NotASolution);
    }
    let r = match branch {
        ConstantBranch::Sphere => theta.clone() / T::from_usize(n - 1).expect("dimension fits the scalar"),
        ConstantBranch::Zero => T::zero(),
    };
    Ok(DiagCurvature::from_upper(n, |i, j| r.clone() + s.get(i, j).clone()))
}

/// Inverse of [`solution_to_tensor`] on the sphere branch:
/// `S = W(R)` and `θ = (n-1) r₀`.
pub fn tensor_to_solution<T: Scalar>(r: &DiagCurvature<T>) -> (SymSolutionMatrix<T>, T) {
    let dec = einstein_decompose(r, T::default_tolerance());
    let theta = dec.r0 * T::from_usize(r.n - 1).expect("dimension fits the scalar");
    (dec.w.as_matrix(), theta)
}

/// `R² + R#R - θR`, whose entries are
/// `r_{i,j}² + Σ_k r_{i,k} r_{k,j} - θ r_{i,j}`.
pub fn fixed_point_residual<T: Scalar>(r: &DiagCurvature<T>, theta: &T) -> DiagCurvature<T> {
    let sharp = jordan_sharp(r, r).expect("same tensor");
    DiagCurvature::from_upper(r.n, |i, j| {
        let v = r.get(i, j).clone();
        v.clone() * v.clone() + sharp.get(i, j).clone() - theta.clone() * v
    })
}

/// Product of round spheres `S^k(ρ) × S^ℓ(σ)` with `σ` fixed by the
/// Einstein condition `(k-1)/ρ² = (ℓ-1)/σ²`. Mixed planes carry `0`.
pub fn sphere_product_tensor<T: Scalar>(k: usize, l: usize, rho: &T) -> Result<DiagCurvature<T>> {
    if k < 2 || l < 2 {
        return Err(Error::InvalidParameter(format!(
            "sphere dimensions must be at least 2, got ({k}, {l})"
        )));
    }
    if *rho <= T::zero() {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let a = T::one() / (rho.clone() * rho.clone());
    let b = a.clone() * T::from_usize(k - 1).expect("small") / T::from_usize(l - 1).expect("small");
    Ok(DiagCurvature::from_upper(k + l, |i, j| match (i < k, j < k) {
        (true, true) => a.clone(),
        (false, false) => b.clone(),
        _ => T::zero(),
    }))
}

/// Outcome of comparing [`jordan_sharp`] with [`sharp_bruteforce`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpCheck {
    pub n: usize,
    pub trials: usize,
    /// Largest entrywise deviation over all trials.
    pub max_deviation: f64,
    /// Whether `id # id = (n-2) id` holds exactly.
    pub identity_ok: bool,
}

/// Runs `trials` random pairs with entries uniform in `[-1, 1)`, seeded.
pub fn sharp_check(n: usize, trials: usize, seed: u64) -> Result<SharpCheck> {
    if n < 2 {
        return Err(Error::InvalidParameter("tensor dimension must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = |rng: &mut ChaCha8Rng| DiagCurvature::from_upper(n, |_, _| rng.gen_range(-1.0..1.0));
    let mut max_deviation: f64 = 0.0;
    for _ in 0..trials {
        let r = random(&mut rng);
        let t = random(&mut rng);
        let a = jordan_sharp(&r, &t)?;
        let b = sharp_bruteforce(&r, &t)?;
        max_deviation = max_deviation.max(a.combine(&1.0, &b, &-1.0)?.max_abs());
    }
    let id = DiagCurvature::<crate::scalar::Rational>::identity(n);
    let expected = id.map(|v| v.clone() * crate::scalar::Rational::from_int(n as i64 - 2));
    let identity_ok = jordan_sharp(&id, &id)? == expected;
    Ok(SharpCheck {
        n,
        trials,
        max_deviation,
        identity_ok,
    })
}
