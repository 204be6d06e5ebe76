//! Exact arithmetic in the cyclotomic integers `ℤ[ζ_m]`.
//!
//! Elements are integer vectors in the power basis `1, ζ, …, ζ^{φ(m)-1}`,
//! reduced modulo the `m`-th cyclotomic polynomial. Binary operations on
//! elements of different conductors promote both to the lcm.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use serde_json::{json, Value};

/// `Φ_m`, coefficients low-degree first.
pub fn cyclotomic_poly(m: u64) -> Vec<i64> {
    assert!(m >= 1, "conductor must be positive");
    let mut p = vec![0i64; m as usize + 1];
    p[0] = -1;
    p[m as usize] = 1;
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        p = exact_div(&p, &cyclotomic_poly(d));
    }
    p
}

/// Quotient of `a` by the monic `b`; the remainder must vanish.
fn exact_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let mut quot = vec![0i64; rem.len() - db];
    for k in (0..quot.len()).rev() {
        let c = rem[k + db];
        quot[k] = c;
        for (i, &bi) in b.iter().enumerate() {
            rem[k + i] -= c * bi;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// Reduces a polynomial in `ζ` modulo the monic `phi`.
fn reduce(mut v: Vec<i64>, phi: &[i64]) -> Vec<i64> {
    let deg = phi.len() - 1;
    for k in (deg..v.len()).rev() {
        let c = v[k];
        if c == 0 {
            continue;
        }
        for (i, &pi) in phi.iter().enumerate() {
            v[k - deg + i] -= c * pi;
        }
    }
    v.resize(deg, 0);
    v
}

/// Element of `ℤ[ζ_m]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    m: u64,
    coords: Vec<i64>,
}

impl CycInt {
    /// `Σ counts[k] ζ_m^k`.
    pub fn from_exponent_counts(m: u64, counts: &[i64]) -> Self {
        let phi = cyclotomic_poly(m);
        let mut v = vec![0i64; (m as usize).max(phi.len())];
        for (k, &c) in counts.iter().enumerate() {
            v[k % m as usize] += c;
        }
        Self { m, coords: reduce(v, &phi) }
    }

    pub fn integer(m: u64, v: i64) -> Self {
        Self::from_exponent_counts(m, &[v])
    }

    /// `ζ_m^k`.
    pub fn zeta_pow(m: u64, k: u64) -> Self {
        let mut counts = vec![0i64; m as usize];
        counts[(k % m) as usize] = 1;
        Self::from_exponent_counts(m, &counts)
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Rewrites the element over `ζ_{m'}` for a multiple `m'` of `m`.
    pub fn promote(&self, m2: u64) -> Self {
        assert!(m2.is_multiple_of(self.m), "conductor {m2} is not a multiple of {}", self.m);
        if m2 == self.m {
            return self.clone();
        }
        let step = (m2 / self.m) as usize;
        let mut counts = vec![0i64; m2 as usize];
        for (k, &c) in self.coords.iter().enumerate() {
            counts[k * step % m2 as usize] += c;
        }
        Self::from_exponent_counts(m2, &counts)
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let m = self.m.lcm(&other.m);
        (self.promote(m), other.promote(m))
    }

    /// Complex conjugation, `ζ ↦ ζ⁻¹`.
    pub fn conj(&self) -> Self {
        let m = self.m as usize;
        let mut counts = vec![0i64; m];
        for (k, &c) in self.coords.iter().enumerate() {
            counts[(m - k) % m] += c;
        }
        Self::from_exponent_counts(self.m, &counts)
    }

    /// `z · z̄ = |z|²`, as an element of `ℤ[ζ_m]` (real, not always rational).
    pub fn norm_sq(&self) -> Self {
        self * &self.conj()
    }

    /// The rational integer this element equals, if any.
    pub fn as_integer(&self) -> Option<i64> {
        self.coords[1..].iter().all(|&c| c == 0).then_some(self.coords[0])
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.m as f64;
        self.coords
            .iter()
            .enumerate()
            .map(|(k, &c)| Complex64::from_polar(c as f64, std::f64::consts::TAU * k as f64 / m))
            .sum()
    }

    /// `{"m": conductor, "coords": [...]}`.
    pub fn to_json(&self) -> Value {
        json!({ "m": self.m, "coords": self.coords })
    }
}

impl Add for &CycInt {
    type Output = CycInt;

    fn add(self, rhs: &CycInt) -> CycInt {
        let (a, b) = self.aligned(rhs);
        CycInt {
            m: a.m,
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &CycInt {
    type Output = CycInt;

    fn sub(self, rhs: &CycInt) -> CycInt {
        self + &(-rhs)
    }
}

impl Neg for &CycInt {
    type Output = CycInt;

    fn neg(self) -> CycInt {
        CycInt {
            m: self.m,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &CycInt {
    type Output = CycInt;

    fn mul(self, rhs: &CycInt) -> CycInt {
        let (a, b) = self.aligned(rhs);
        let mut prod = vec![0i64; (a.coords.len() * 2).max(1)];
        for (i, &x) in a.coords.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coords.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        CycInt {
            m: a.m,
            coords: reduce(prod, &cyclotomic_poly(a.m)),
        }
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, &c) in self.coords.iter().enumerate() {
            match (c, k) {
                (0, _) => {}
                (_, 0) => terms.push(c.to_string()),
                (1, _) => terms.push(format!("z^{k}")),
                (-1, _) => terms.push(format!("-z^{k}")),
                _ => terms.push(format!("{c}*z^{k}")),
            }
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        write!(f, "{} (z = zeta_{})", terms.join(" + "), self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn degrees_are_totients() {
        for m in 1..=63u64 {
            let phi = (1..=m).filter(|k| k.gcd(&m) == 1).count();
            assert_eq!(cyclotomic_poly(m).len() - 1, phi, "m = {m}");
        }
    }

    #[test]
    fn gaussian_integers() {
        let i = CycInt::zeta_pow(4, 1);
        assert_eq!((&i * &i).as_integer(), Some(-1));
        let z = &CycInt::integer(4, 3) + &(&CycInt::integer(4, 8) * &i);
        assert_eq!(z.norm_sq().as_integer(), Some(73));
        assert_eq!(z.conj(), &CycInt::integer(4, 3) - &(&CycInt::integer(4, 8) * &i));
        assert!((z.to_complex() - Complex64::new(3.0, 8.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for m in 2..=30u64 {
            let counts = vec![1i64; m as usize];
            assert!(CycInt::from_exponent_counts(m, &counts).is_zero());
            let z = CycInt::zeta_pow(m, 1);
            let mut acc = CycInt::integer(m, 1);
            for _ in 0..m {
                acc = &acc * &z;
            }
            assert_eq!(acc.as_integer(), Some(1));
        }
    }

    #[test]
    fn promotion_is_consistent() {
        // ζ_3 = ζ_6², and 1 + ζ_3 + ζ_3² = 0 survives promotion.
        let w = CycInt::zeta_pow(3, 1);
        assert_eq!(w.promote(6), CycInt::zeta_pow(6, 2));
        let mixed = &w + &CycInt::zeta_pow(4, 1);
        assert_eq!(mixed.conductor(), 12);
        let expected = Complex64::new(-0.5, 3f64.sqrt() / 2.0 + 1.0);
        assert!((mixed.to_complex() - expected).norm() < 1e-12);
    }
}
