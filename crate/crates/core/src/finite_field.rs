//! Table-driven arithmetic in `𝔽_q`, `q = pᵏ ≤ 2²⁰`.
//!
//! The model is deterministic: `𝔽_p[x] / (f)` where `f` is the
//! lexicographically smallest monic primitive polynomial of degree `k`
//! (coefficients compared from the constant term upwards), and the generator
//! is the class of `x`. For `k = 1` the modulus is `x - g` with `g` the
//! smallest primitive root mod `p`, so the class of `x` is again `g`.
//!
//! Elements are addressed by their index `Σ cᵢ pⁱ` in the polynomial basis.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// Returns `(p, k)` with `q = pᵏ`, or `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..).take_while(|d| d * d <= q).find(|d| q.is_multiple_of(*d)).unwrap_or(q);
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_power(n) == Some((n, 1))
}

/// Distinct prime factors by trial division.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Polynomials over `𝔽_p` modulo a monic `f`, coefficient vectors low-first.
struct PolyRing<'a> {
    p: u64,
    f: &'a [u64],
}

impl PolyRing<'_> {
    fn k(&self) -> usize {
        self.f.len() - 1
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let k = self.k();
        let mut prod = vec![0u64; 2 * k];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for d in (k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            // x^d = x^(d-k) · x^k and x^k ≡ -(f_0 + … + f_{k-1} x^{k-1}).
            for (i, &fi) in self.f[..k].iter().enumerate() {
                let t = c * fi % self.p;
                prod[d - k + i] = (prod[d - k + i] + self.p - t) % self.p;
            }
            prod[d] = 0;
        }
        prod.truncate(k);
        prod
    }

    fn pow_x(&self, mut e: u64) -> Vec<u64> {
        let k = self.k();
        let mut base = vec![0u64; k];
        if k == 1 {
            base[0] = (self.p - self.f[0]) % self.p;
        } else {
            base[1] = 1;
        }
        let mut acc = vec![0u64; k];
        acc[0] = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn is_one(v: &[u64]) -> bool {
        v[0] == 1 && v[1..].iter().all(|&c| c == 0)
    }

    /// `x` has multiplicative order exactly `pᵏ - 1`; this forces `f` to be
    /// irreducible, since otherwise the unit group is smaller.
    fn x_is_primitive(&self) -> bool {
        let order = self.p.pow(self.k() as u32) - 1;
        Self::is_one(&self.pow_x(order))
            && prime_factors(order)
                .into_iter()
                .all(|l| !Self::is_one(&self.pow_x(order / l)))
    }
}

/// Exponent and logarithm tables of `𝔽_q` relative to a fixed generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTable {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// Element of a specific field, tagged with the field order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    q: u32,
    index: u32,
}

impl FieldElement {
    pub fn index(self) -> u32 {
        self.index
    }

    pub fn field_order(self) -> u32 {
        self.q
    }

    pub fn is_zero(self) -> bool {
        self.index == 0
    }
}

impl FieldTable {
    /// Builds the deterministic model of `𝔽_q`.
    pub fn new(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::NotAPrimePower(q))?;
        if q > MAX_FIELD_ORDER {
            return Err(Error::FieldTooLarge {
                q,
                cap: MAX_FIELD_ORDER,
            });
        }
        let modulus: Vec<u64> = if k == 1 {
            let g = (1..p.max(2))
                .find(|&g| {
                    p == 2 || prime_factors(p - 1).into_iter().all(|l| pow_mod(g, (p - 1) / l, p) != 1)
                })
                .expect("every prime has a primitive root");
            vec![(p - g) % p, 1]
        } else {
            smallest_primitive(p, k as usize)
        };

        let ring = PolyRing { p, f: &modulus };
        let ku = k as usize;
        let qu = q as usize;
        let mut exp = Vec::with_capacity(qu - 1);
        let mut log = vec![u32::MAX; qu];
        let mut cur = vec![0u64; ku];
        cur[0] = 1;
        let x = ring.pow_x(1);
        for e in 0..qu - 1 {
            let idx = encode(&cur, p);
            exp.push(idx);
            log[idx as usize] = e as u32;
            cur = ring.mul(&cur, &x);
        }
        Ok(Self {
            p: p as u32,
            k,
            q: q as u32,
            modulus: modulus.into_iter().map(|c| c as u32).collect(),
            exp,
            log,
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Monic modulus, coefficients low-degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index >= self.q {
            return Err(Error::InvalidParameter(format!(
                "element index {index} out of range for GF({})",
                self.q
            )));
        }
        Ok(FieldElement { q: self.q, index })
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients below {}",
                self.k, self.p
            )));
        }
        let v: Vec<u64> = coeffs.iter().map(|&c| u64::from(c)).collect();
        self.element(encode(&v, u64::from(self.p)))
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.k as usize);
        let mut i = a.index;
        for _ in 0..self.k {
            v.push(i % self.p);
            i /= self.p;
        }
        v
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { q: self.q, index: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { q: self.q, index: 1 }
    }

    pub fn generator(&self) -> FieldElement {
        FieldElement {
            q: self.q,
            index: self.exp[1 % self.exp.len()],
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(|index| FieldElement { q: self.q, index })
    }

    fn check(&self, a: FieldElement) -> Result<()> {
        if a.q != self.q {
            return Err(Error::FieldMismatch(self.q, a.q));
        }
        Ok(())
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement { q: self.q, index: self.add_index(a.index, b.index) })
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement { q: self.q, index: self.sub_index(a.index, b.index) })
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        Ok(FieldElement { q: self.q, index: self.neg_index(a.index) })
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement { q: self.q, index: self.mul_index(a.index, b.index) })
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        if a.index == 0 {
            return Err(Error::InverseOfZero);
        }
        let e = (self.q - 1 - self.log[a.index as usize]) % (self.q - 1);
        Ok(FieldElement { q: self.q, index: self.exp[e as usize] })
    }

    /// Discrete logarithm to the base [`generator`](Self::generator), in `0..q-1`.
    pub fn dlog(&self, a: FieldElement) -> Result<u32> {
        self.check(a)?;
        if a.index == 0 {
            return Err(Error::LogOfZero);
        }
        Ok(self.log[a.index as usize])
    }

    /// `gᵉ` for any exponent.
    pub fn exp(&self, e: u64) -> FieldElement {
        FieldElement {
            q: self.q,
            index: self.exp[(e % u64::from(self.q - 1)) as usize],
        }
    }

    /// Index of `-1`.
    pub fn minus_one_index(&self) -> u32 {
        self.neg_index(1)
    }

    pub(crate) fn add_index(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += (a % self.p + b % self.p) % self.p * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub(crate) fn neg_index(&self, a: u32) -> u32 {
        if self.k == 1 {
            return (self.p - a) % self.p;
        }
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += (self.p - a % self.p) % self.p * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub(crate) fn sub_index(&self, a: u32, b: u32) -> u32 {
        self.add_index(a, self.neg_index(b))
    }

    pub(crate) fn mul_index(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = (u64::from(self.log[a as usize]) + u64::from(self.log[b as usize])) % u64::from(self.q - 1);
        self.exp[e as usize]
    }

    /// Discrete log of a nonzero index; panics on zero.
    pub(crate) fn log_index(&self, a: u32) -> u32 {
        assert!(a != 0, "log of zero");
        self.log[a as usize]
    }
}

fn encode(coeffs: &[u64], p: u64) -> u32 {
    coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
}

/// Lexicographically smallest (constant term first) monic primitive
/// polynomial of degree `k ≥ 2` over `𝔽_p`.
fn smallest_primitive(p: u64, k: usize) -> Vec<u64> {
    let total = p.pow(k as u32);
    for t in 0..total {
        // Digit 0 of the candidate (most significant in t) is the constant term.
        let mut f = vec![0u64; k + 1];
        let mut rest = t;
        for i in (0..k).rev() {
            f[i] = rest % p;
            rest /= p;
        }
        f[k] = 1;
        if f[0] == 0 {
            continue;
        }
        if (PolyRing { p, f: &f }).x_is_primitive() {
            return f;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

fn format_poly(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (d, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match d {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{d}"),
        };
        terms.push(match (c, d) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    terms.join(" + ")
}

impl fmt::Display for FieldTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {}", self.p, self.k, format_poly(&self.modulus))
    }
}
