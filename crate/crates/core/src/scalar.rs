//! Scalar abstraction shared by every construction in the crate.
//!
//! Two arithmetic modes exist: exact rationals ([`Rational`]) and binary
//! floats (`f64`, `f32`). The mode is carried by the type, so mixing the two
//! inside one computation is a compile error; files carry an explicit tag.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Arithmetic mode tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Rational,
    Float,
}

impl Arithmetic {
    pub fn as_str(self) -> &'static str {
        match self {
            Arithmetic::Rational => "rational",
            Arithmetic::Float => "float",
        }
    }
}

impl std::fmt::Display for Arithmetic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An integer matrix `N` and a positive denominator `d` with `S = N / d`.
///
/// Produced by exact scalars whose entries share a denominator small enough
/// for machine-integer verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerImage {
    pub numerators: Vec<i64>,
    pub denominator: i64,
}

/// Field-like scalar used by the solution matrices, group functions and
/// curvature tensors.
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    const ARITHMETIC: Arithmetic;

    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64_lossy(&self) -> f64;

    /// Tolerance used when callers do not supply one. Zero in exact mode.
    fn default_tolerance() -> f64;

    fn to_json(&self) -> Value;

    fn from_json(value: &Value) -> Result<Self, Error>;

    /// Common-denominator integer form of a slice of entries, if one exists
    /// within machine range. Float scalars never have one.
    fn integer_image(_entries: &[Self]) -> Option<IntegerImage> {
        None
    }

    /// Exact value `num / den` from wide integers; used to map results of the
    /// integer kernels back into the scalar type.
    fn from_i128_ratio(num: i128, den: i128) -> Self;

    fn is_exact() -> bool {
        Self::ARITHMETIC == Arithmetic::Rational
    }

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    /// `|a - b| <= tol`, or exact equality when the scalar is exact.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if Self::is_exact() {
            self == other
        } else {
            (self.clone() - other.clone()).abs().to_f64_lossy() <= tol
        }
    }
}

impl Scalar for f64 {
    const ARITHMETIC: Arithmetic = Arithmetic::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn default_tolerance() -> f64 {
        1e-9
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self).map(Value::Number).unwrap_or(Value::Null)
    }

    fn from_json(value: &Value) -> Result<Self, Error> {
        value
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("expected a JSON number, found {value}")))
    }

    fn from_i128_ratio(num: i128, den: i128) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for f32 {
    const ARITHMETIC: Arithmetic = Arithmetic::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }

    fn default_tolerance() -> f64 {
        1e-5
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(f64::from(*self))
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(value: &Value) -> Result<Self, Error> {
        value
            .as_f64()
            .map(|v| v as f32)
            .ok_or_else(|| Error::Parse(format!("expected a JSON number, found {value}")))
    }

    fn from_i128_ratio(num: i128, den: i128) -> Self {
        (num as f64 / den as f64) as f32
    }
}

impl Scalar for Rational {
    const ARITHMETIC: Arithmetic = Arithmetic::Rational;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64_lossy(&self) -> f64 {
        // numer/denom may individually overflow f64; scale down when needed.
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                let shift = self.numer().bits().max(self.denom().bits()).saturating_sub(1000);
                let n = (self.numer() >> shift).to_f64().unwrap_or(0.0);
                let d = (self.denom() >> shift).to_f64().unwrap_or(1.0);
                n / d
            }
        }
    }

    fn default_tolerance() -> f64 {
        0.0
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(value: &Value) -> Result<Self, Error> {
        match value {
            Value::String(s) => parse_rational(s),
            Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(BigInt::from(n.as_i64().unwrap()))),
            other => Err(Error::Parse(format!(
                "expected a rational string \"p/q\", found {other}"
            ))),
        }
    }

    fn integer_image(entries: &[Self]) -> Option<IntegerImage> {
        let mut lcm = BigInt::one();
        for e in entries {
            if !e.denom().is_one() {
                lcm = lcm.lcm(e.denom());
                if lcm.bits() > 40 {
                    return None;
                }
            }
        }
        let denominator = lcm.to_i64()?;
        let mut numerators = Vec::with_capacity(entries.len());
        for e in entries {
            let scaled = if e.denom().is_one() {
                e.numer() * &lcm
            } else {
                e.numer() * (&lcm / e.denom())
            };
            numerators.push(scaled.to_i64()?);
        }
        Some(IntegerImage {
            numerators,
            denominator,
        })
    }

    fn from_i128_ratio(num: i128, den: i128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Formats a rational as `"p/q"` in lowest terms (`"p"` when `q = 1`).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"p"`; rejects a zero denominator.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational \"{s}\""));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// `S²` for a dense row-major `n × n` matrix.
pub(crate) fn dense_square<T: Scalar>(entries: &[T], n: usize) -> Vec<T> {
    use rayon::prelude::*;
    let mut out = vec![T::zero(); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for k in 0..n {
            let a = &entries[i * n + k];
            if a.is_zero() {
                continue;
            }
            for (j, slot) in row.iter_mut().enumerate() {
                let b = &entries[k * n + j];
                if !b.is_zero() {
                    *slot = slot.clone() + a.clone() * b.clone();
                }
            }
        }
    });
    out
}

/// Exact `N²` for an integer matrix, or `None` when the entries are too large
/// for the machine kernels.
///
/// When `n · max|N|² < 2⁵³` every partial sum is an integer representable in
/// an `f64`, so the float kernel is exact; otherwise an `i128` kernel is used
/// as long as the bound stays below `2¹²⁶`.
pub(crate) fn integer_square(numerators: &[i64], n: usize) -> Option<Vec<i128>> {
    use rayon::prelude::*;
    let max = numerators.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as u128;
    let bound = max.checked_mul(max)?.checked_mul(n as u128)?;
    if bound < (1u128 << 53) {
        let src: Vec<f64> = numerators.iter().map(|&v| v as f64).collect();
        let mut out = vec![0f64; n * n];
        out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for k in 0..n {
                let a = src[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let rk = &src[k * n..(k + 1) * n];
                for (slot, &b) in row.iter_mut().zip(rk) {
                    *slot += a * b;
                }
            }
        });
        Some(out.into_iter().map(|v| v as i128).collect())
    } else if bound < (1u128 << 126) {
        let mut out = vec![0i128; n * n];
        out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for k in 0..n {
                let a = numerators[i * n + k] as i128;
                if a == 0 {
                    continue;
                }
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot += a * numerators[k * n + j] as i128;
                }
            }
        });
        Some(out)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let r = Rational::from_ratio(-6, 4);
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("-3/2").unwrap(), r);
        assert_eq!(parse_rational(" 7 ").unwrap(), Rational::from_int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn integer_image_uses_common_denominator() {
        let e = vec![
            Rational::from_ratio(1, 2),
            Rational::from_ratio(-1, 3),
            Rational::from_int(2),
        ];
        let img = Rational::integer_image(&e).unwrap();
        assert_eq!(img.denominator, 6);
        assert_eq!(img.numerators, vec![3, -2, 12]);
        assert!(f64::integer_image(&[1.0]).is_none());
    }

    #[test]
    fn integer_square_matches_generic() {
        let n = 3;
        let m = vec![0i64, 2, -2, 2, 0, -2, -2, -2, 0];
        let sq = integer_square(&m, n).unwrap();
        let generic: Vec<Rational> = dense_square(
            &m.iter().map(|&v| Rational::from_int(v)).collect::<Vec<_>>(),
            n,
        );
        for (a, b) in sq.iter().zip(&generic) {
            assert_eq!(Rational::from_i128_ratio(*a, 1), *b);
        }
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = BigRational::new(BigInt::from(10).pow(400) * 3, BigInt::from(10).pow(400));
        assert!((big.to_f64_lossy() - 3.0).abs() < 1e-12);
    }
}
