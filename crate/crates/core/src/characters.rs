//! Multiplicative characters of `𝔽_q^×`, modified Jacobi sums
//! `J′(α, β) = Σ_{t≠0,1} α(t) β(1-t)`, and the solutions of the Hopf
//! equations assembled from characters of order 3, 4 and 8.
//!
//! Characters are extended to `𝔽_q` by `α(0) = 0`, including the trivial one.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use serde_json::{json, Value};

use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::finite_field::FieldTable;
use crate::group_ring::{hopf_verify, FinAbelianGroup, GroupFunction};

/// Absolute residual tolerance for the character constructions.
pub const CONSTRUCTION_TOL: f64 = 1e-9;

/// `α(gʲ) = ζ_{q-1}^{e·j}` for the field generator `g` and step `e`.
#[derive(Debug, Clone)]
pub struct MultChar {
    field: Arc<FieldTable>,
    order: u64,
    step: u64,
}

impl PartialEq for MultChar {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.step == other.step
    }
}

fn same_field(a: &Arc<FieldTable>, b: &Arc<FieldTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn group_order(field: &FieldTable) -> u64 {
    u64::from(field.order()) - 1
}

impl MultChar {
    /// The character with exponent step `e mod (q-1)`.
    pub fn from_step(field: &Arc<FieldTable>, e: u64) -> Self {
        let n = group_order(field);
        let step = e % n;
        Self {
            field: Arc::clone(field),
            order: n / step.gcd(&n),
            step,
        }
    }

    pub fn trivial(field: &Arc<FieldTable>) -> Self {
        Self::from_step(field, 0)
    }

    /// Every character of `𝔽_q^×`, by increasing step.
    pub fn all(field: &Arc<FieldTable>) -> Vec<Self> {
        (0..group_order(field)).map(|e| Self::from_step(field, e)).collect()
    }

    pub fn field(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponent_step(&self) -> u64 {
        self.step
    }

    pub fn is_trivial(&self) -> bool {
        self.step == 0
    }

    /// `ᾱ = α⁻¹`.
    pub fn conj(&self) -> Self {
        let n = group_order(&self.field);
        Self::from_step(&self.field, n - self.step)
    }

    /// `αᵗ`.
    pub fn pow(&self, t: u64) -> Self {
        let n = group_order(&self.field);
        Self::from_step(&self.field, (self.step * (t % n)) % n)
    }

    /// `k` with `α(a) = ζ_d^k`, or `None` at `a = 0`.
    pub fn exponent_at(&self, a: u32) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let n = group_order(&self.field);
        let j = u64::from(self.field.log_index(a));
        Some(self.step * j % n / (n / self.order))
    }

    /// Exact value in `ℤ[ζ_d]`, `d` the order of `α`.
    pub fn eval(&self, a: u32) -> CycInt {
        match self.exponent_at(a) {
            Some(k) => CycInt::zeta_pow(self.order, k),
            None => CycInt::integer(self.order, 0),
        }
    }

    pub fn eval_complex(&self, a: u32) -> Complex64 {
        match self.exponent_at(a) {
            Some(k) => Complex64::from_polar(1.0, TAU * k as f64 / self.order as f64),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Values on all of `𝔽_q`, by element index.
    pub fn table(&self) -> Vec<Complex64> {
        (0..self.field.order()).map(|a| self.eval_complex(a)).collect()
    }
}

/// The canonical character of order `d`: step `(q-1)/d`, so `α(g) = ζ_d`.
pub fn char_of_order(field: &Arc<FieldTable>, d: u64) -> Result<MultChar> {
    let n = group_order(field);
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::CharacterOrder { d, order: n });
    }
    Ok(MultChar::from_step(field, n / d))
}

fn check_same(alpha: &MultChar, beta: &MultChar) -> Result<()> {
    if !same_field(&alpha.field, &beta.field) {
        return Err(Error::FieldMismatch(alpha.field.order(), beta.field.order()));
    }
    Ok(())
}

/// `J′(α, β) = Σ_{t≠0,1} α(t) β(1-t)`, exact in `ℤ[ζ_m]`, `m = lcm` of the orders.
pub fn jacobi_mod(alpha: &MultChar, beta: &MultChar) -> Result<CycInt> {
    check_same(alpha, beta)?;
    let f = &alpha.field;
    let m = alpha.order.lcm(&beta.order);
    let (sa, sb) = (m / alpha.order, m / beta.order);
    let mut counts = vec![0i64; m as usize];
    for t in 2..f.order() {
        let ka = alpha.exponent_at(t).expect("t is nonzero");
        let kb = beta.exponent_at(f.sub_index(1, t)).expect("1 - t is nonzero");
        counts[((ka * sa + kb * sb) % m) as usize] += 1;
    }
    Ok(CycInt::from_exponent_counts(m, &counts))
}

/// `Σ_{a≠0} ᾱ(a) β(a)`, i.e. `(q-1)·(α|β)` for the normalized hermitian product.
pub fn char_inner_sum(alpha: &MultChar, beta: &MultChar) -> Result<CycInt> {
    check_same(alpha, beta)?;
    let ab = MultChar::from_step(&alpha.field, alpha.conj().step + beta.step);
    let m = ab.order;
    let mut counts = vec![0i64; m as usize];
    for a in 1..alpha.field.order() {
        counts[ab.exponent_at(a).expect("nonzero") as usize] += 1;
    }
    Ok(CycInt::from_exponent_counts(m, &counts))
}

/// Which character construction produced a [`PhiFunction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionKind {
    Quartic,
    Octic,
    Cubic,
}

impl ConstructionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstructionKind::Quartic => "quartic",
            ConstructionKind::Octic => "octic",
            ConstructionKind::Cubic => "cubic",
        }
    }
}

/// Root chosen for the unit `c` in the cubic construction, where
/// `1 + J′(α, α) = ρ e^{iψ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicBranch {
    /// `c = e^{-iψ/3}`.
    Minus,
    /// `c = e^{+iψ/3}`.
    Plus,
}

impl CubicBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            CubicBranch::Minus => "exp(-i psi/3)",
            CubicBranch::Plus => "exp(+i psi/3)",
        }
    }
}

/// Real function on `(𝔽_q, +)` built from characters, with its provenance.
#[derive(Debug, Clone)]
pub struct PhiFunction {
    pub field: Arc<FieldTable>,
    /// Indexed by field element index; `values[0] = 0`.
    pub values: Vec<f64>,
    pub kind: ConstructionKind,
    /// Order of the character `α` the construction starts from.
    pub char_order: u64,
    pub c: Complex64,
    pub jacobi: CycInt,
    pub theta: f64,
    pub branch: Option<CubicBranch>,
}

impl PhiFunction {
    /// The additive group of the field, `(ℤ/p)ᵏ`, shares the element indexing.
    pub fn additive_group(&self) -> FinAbelianGroup {
        additive_group(&self.field)
    }

    pub fn to_group_function(&self) -> GroupFunction<f64> {
        GroupFunction::new(self.additive_group(), self.values.clone()).expect("q values")
    }

    pub fn metadata(&self) -> Value {
        let mut meta = json!({
            "family": self.kind.as_str(),
            "q": self.field.order(),
            "field": self.field.to_string(),
            "character_order": self.char_order,
            "c": [self.c.re, self.c.im],
            "jacobi": self.jacobi.to_json(),
        });
        if let Some(b) = self.branch {
            meta["branch"] = json!(b.as_str());
        }
        meta
    }
}

pub fn additive_group(field: &FieldTable) -> FinAbelianGroup {
    let p = u64::from(field.characteristic());
    FinAbelianGroup::new(vec![p; field.degree() as usize]).expect("p ≥ 2")
}

fn real_part_values(field: &FieldTable, alpha: &MultChar, c: Complex64) -> Vec<f64> {
    (0..field.order())
        .map(|a| 2.0 * (c * alpha.eval_complex(a)).re)
        .collect()
}

fn field_for(q: u64, modulus: u64, what: &str) -> Result<Arc<FieldTable>> {
    let field = Arc::new(FieldTable::new(q)?);
    if q % modulus != 1 {
        return Err(Error::InvalidParameter(format!(
            "{what} construction needs q ≡ 1 mod {modulus}, got q = {q}"
        )));
    }
    Ok(field)
}

fn check_solution(phi: &PhiFunction) -> Result<f64> {
    let rep = hopf_verify(&phi.to_group_function(), CONSTRUCTION_TOL);
    match rep.theta {
        Some(theta) if rep.is_solution => Ok(theta),
        _ => Err(Error::ConstructionMismatch(format!(
            "{} construction at q = {} has residual {:e}",
            phi.kind.as_str(),
            phi.field.order(),
            rep.max_residual
        ))),
    }
}

/// `φ = α²` for `α` of order 4, i.e. the quadratic character; `θ = 0`.
pub fn quartic_solution(q: u64) -> Result<PhiFunction> {
    let field = field_for(q, 4, "quartic")?;
    let alpha = char_of_order(&field, 4)?;
    let sq = alpha.pow(2);
    let values = (0..field.order()).map(|a| sq.eval_complex(a).re.round()).collect();
    let phi = PhiFunction {
        jacobi: jacobi_mod(&sq, &sq)?,
        field,
        values,
        kind: ConstructionKind::Quartic,
        char_order: 4,
        c: Complex64::new(1.0, 0.0),
        theta: 0.0,
        branch: None,
    };
    check_solution(&phi)?;
    Ok(phi)
}

/// `φ = cα² + c̄ᾱ²` for `α` of order 8, with `Re(c²(1 + J′(α², α²))) = 0`; `θ = 0`.
pub fn octic_solution(q: u64) -> Result<PhiFunction> {
    let field = field_for(q, 8, "octic")?;
    let alpha = char_of_order(&field, 8)?;
    let sq = alpha.pow(2);
    let jacobi = jacobi_mod(&sq, &sq)?;
    let psi = (Complex64::new(1.0, 0.0) + jacobi.to_complex()).arg();
    let c = Complex64::from_polar(1.0, FRAC_PI_4 - psi / 2.0);
    let phi = PhiFunction {
        values: real_part_values(&field, &sq, c),
        field,
        kind: ConstructionKind::Octic,
        char_order: 8,
        c,
        jacobi,
        theta: 0.0,
        branch: None,
    };
    check_solution(&phi)?;
    Ok(phi)
}

/// `φ = cα + c̄ᾱ` for `α` of order 3, with `c³(1 + J′(α, α))` real.
///
/// Both cube-root branches are tried in the order minus, plus; the first one
/// that verifies is kept and recorded in [`PhiFunction::branch`].
pub fn cubic_solution(q: u64) -> Result<(PhiFunction, f64)> {
    let field = field_for(q, 3, "cubic")?;
    let alpha = char_of_order(&field, 3)?;
    let jacobi = jacobi_mod(&alpha, &alpha)?;
    let psi = (Complex64::new(1.0, 0.0) + jacobi.to_complex()).arg();
    let mut last = None;
    for (branch, sign) in [(CubicBranch::Minus, -1.0), (CubicBranch::Plus, 1.0)] {
        let c = Complex64::from_polar(1.0, sign * psi / 3.0);
        let mut phi = PhiFunction {
            values: real_part_values(&field, &alpha, c),
            field: Arc::clone(&field),
            kind: ConstructionKind::Cubic,
            char_order: 3,
            c,
            jacobi: jacobi.clone(),
            theta: 0.0,
            branch: Some(branch),
        };
        match check_solution(&phi) {
            Ok(theta) => {
                log::info!("cubic construction at q = {q}: branch {} verified", branch.as_str());
                phi.theta = theta;
                return Ok((phi, theta));
            }
            Err(e) => {
                log::debug!("cubic construction at q = {q}: branch {} rejected", branch.as_str());
                last = Some(e);
            }
        }
    }
    Err(last.expect("two branches tried"))
}
