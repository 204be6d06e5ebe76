//! Functions on finite abelian groups, their convolution, and the Hopf form
//! of the basic system:
//!
//! ```text
//! φ = φ^σ,   φ(e) = 0,   Σ φ = 0,   φ² + φ*φ = θ φ + ‖φ‖² δ_e
//! ```

use crate::error::{Error, Result};
use crate::graphs::SrgParams;
use crate::matrix::{SolutionReport, SymSolutionMatrix, Violation};
use crate::scalar::{Rational, Scalar};

/// `ℤ/n₁ × … × ℤ/n_k` in additive notation.
///
/// Elements are mixed-radix indices with the first factor least significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinAbelianGroup {
    orders: Vec<u64>,
    n: usize,
}

impl FinAbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.is_empty() || orders.iter().any(|&o| o < 2) {
            return Err(Error::InvalidParameter(format!(
                "cyclic factor orders must be at least 2, got {orders:?}"
            )));
        }
        let n = orders
            .iter()
            .try_fold(1usize, |acc, &o| acc.checked_mul(o as usize))
            .ok_or_else(|| Error::InvalidParameter("group order overflows".into()))?;
        Ok(Self { orders, n })
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n])
    }

    /// `L × M`, with the factors of `L` first.
    pub fn product(l: &Self, m: &Self) -> Self {
        let mut orders = l.orders.clone();
        orders.extend_from_slice(&m.orders);
        Self { orders, n: l.n * m.n }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn digits(&self, mut a: usize) -> Vec<u64> {
        self.orders
            .iter()
            .map(|&o| {
                let d = a as u64 % o;
                a /= o as usize;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u64]) -> usize {
        digits
            .iter()
            .zip(&self.orders)
            .rev()
            .fold(0usize, |acc, (&d, &o)| acc * o as usize + (d % o) as usize)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        if let [o] = self.orders[..] {
            return (a + b) % o as usize;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        for &o in &self.orders {
            let o = o as usize;
            out += (a % o + b % o) % o * place;
            a /= o;
            b /= o;
            place *= o;
        }
        out
    }

    pub fn neg(&self, a: usize) -> usize {
        if let [o] = self.orders[..] {
            return (o as usize - a) % o as usize;
        }
        let mut a = a;
        let (mut out, mut place) = (0, 1);
        for &o in &self.orders {
            let o = o as usize;
            out += (o - a % o) % o * place;
            a /= o;
            place *= o;
        }
        out
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }
}

/// Scalar-valued function on a finite abelian group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction<T> {
    group: FinAbelianGroup,
    values: Vec<T>,
}

impl<T: Scalar> GroupFunction<T> {
    pub fn new(group: FinAbelianGroup, values: Vec<T>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::Shape {
                expected: group.order(),
                found: values.len(),
            });
        }
        Ok(Self { group, values })
    }

    pub fn from_fn(group: FinAbelianGroup, f: impl FnMut(usize) -> T) -> Self {
        let values = (0..group.order()).map(f).collect();
        Self { group, values }
    }

    pub fn zeros(group: FinAbelianGroup) -> Self {
        Self::from_fn(group, |_| T::zero())
    }

    pub fn constant(group: FinAbelianGroup, c: T) -> Self {
        Self::from_fn(group, |_| c.clone())
    }

    /// `δ_g`.
    pub fn delta(group: FinAbelianGroup, g: usize) -> Self {
        Self::from_fn(group, |h| if h == g { T::one() } else { T::zero() })
    }

    /// Characteristic function of `set`.
    pub fn indicator(group: FinAbelianGroup, set: impl Fn(usize) -> bool) -> Self {
        Self::from_fn(group, |h| if set(h) { T::one() } else { T::zero() })
    }

    pub fn group(&self) -> &FinAbelianGroup {
        &self.group
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, g: usize) -> &T {
        &self.values[g]
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Self {
            group: self.group.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// `φ^σ(g) = φ(-g)`.
    pub fn sigma(&self) -> Self {
        Self::from_fn(self.group.clone(), |g| self.values[self.group.neg(g)].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.group.order()).all(|g| self.values[g] == self.values[self.group.neg(g)])
    }

    /// `‖φ‖₂² = Σ φ(g)²`.
    pub fn norm_sq(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| acc + v.clone() * v.clone())
    }

    pub fn sum(&self) -> T {
        self.values.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    /// Pointwise linear combination `a·self + b·other`.
    pub fn combine(&self, a: &T, other: &Self, b: &T) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(Self::from_fn(self.group.clone(), |g| {
            a.clone() * self.values[g].clone() + b.clone() * other.values[g].clone()
        }))
    }
}

/// `(φ * ψ)(g) = Σ_h φ(h) ψ(g - h)`.
pub fn convolve<T: Scalar>(phi: &GroupFunction<T>, psi: &GroupFunction<T>) -> Result<GroupFunction<T>> {
    if phi.group != psi.group {
        return Err(Error::GroupMismatch);
    }
    let g = &phi.group;
    let mut out = vec![T::zero(); g.order()];
    for (h, a) in phi.values.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
        for (u, b) in psi.values.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
            let k = g.add(h, u);
            out[k] = out[k].clone() + a.clone() * b.clone();
        }
    }
    Ok(GroupFunction {
        group: g.clone(),
        values: out,
    })
}

/// Checks the Hopf equations for `φ`.
///
/// Exact scalars are compared for equality and `tol` is ignored; floats pass
/// when every residual is at most `tol` in absolute value. The reported `D`
/// is the constant diagonal `(φ*φ)(e)` of the associated matrix.
pub fn hopf_verify<T: Scalar>(phi: &GroupFunction<T>, tol: f64) -> SolutionReport<T> {
    let g = &phi.group;
    let n = g.order();
    let mut max_residual = 0f64;
    let mut violation = None;
    let mut note = |res: T, v: Violation| {
        let r = res.abs().to_f64_lossy();
        max_residual = max_residual.max(r);
        let bad = if T::is_exact() { !res.is_zero() } else { r > tol };
        if bad && violation.is_none() {
            violation = Some(v);
        }
    };

    for a in 0..n {
        let b = g.neg(a);
        note(phi.values[a].clone() - phi.values[b].clone(), Violation::Symmetry { i: a, j: b });
    }
    note(phi.values[0].clone(), Violation::Diagonal { i: 0 });
    note(phi.sum(), Violation::RowSum { row: 0 });

    let conv = convolve(phi, phi).expect("same group");
    let lhs: Vec<T> = (0..n)
        .map(|a| phi.values[a].clone() * phi.values[a].clone() + conv.values[a].clone())
        .collect();
    let norm = phi.norm_sq();
    note(lhs[0].clone() - norm.clone(), Violation::Norm { i: 0 });

    // Reference element: largest |φ(g)|, first index among ties.
    let mut reference = None;
    let mut best = T::zero();
    for a in 1..n {
        let v = phi.values[a].abs();
        if v > best {
            best = v;
            reference = Some(a);
        }
    }
    let theta = match reference {
        Some(a) => lhs[a].clone() / phi.values[a].clone(),
        None => T::zero(),
    };
    for a in 1..n {
        note(
            lhs[a].clone() - theta.clone() * phi.values[a].clone(),
            Violation::Theta { i: 0, j: a },
        );
    }

    let d0 = conv.values[0].clone();
    let trace_d = T::from_usize(n).expect("group order fits the scalar") * d0.clone();
    let is_solution = violation.is_none();
    let hat_theta = if is_solution && !norm.is_zero() {
        theta.abs().to_f64_lossy() / ((n as f64).sqrt() * norm.to_f64_lossy().sqrt())
    } else {
        0.0
    };
    SolutionReport {
        is_solution,
        theta: is_solution.then_some(theta),
        d: vec![d0; n],
        trace_d,
        hat_theta,
        max_residual,
        arithmetic: T::ARITHMETIC,
        violation,
    }
}

/// `S_{a,b} = φ(b - a)`, rows and columns in group-index order.
pub fn phi_to_matrix<T: Scalar>(phi: &GroupFunction<T>) -> Result<SymSolutionMatrix<T>> {
    if !phi.values[0].is_zero() {
        return Err(Error::Precondition("φ(e) must vanish".into()));
    }
    if !phi.is_symmetric() {
        return Err(Error::Precondition("φ must satisfy φ(g) = φ(-g)".into()));
    }
    let g = &phi.group;
    Ok(SymSolutionMatrix::from_upper(g.order(), |a, b| {
        phi.values[g.sub(b, a)].clone()
    }))
}

/// Why a 0/1 function is not the connection set of a strongly regular
/// Cayley graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CayleyFailure {
    NotSymmetric { g: usize },
    IdentityInSupport,
    /// `α*α` is not constant on the support (or off it) at `g`.
    NotDifferenceSet { g: usize },
}

/// Checks `α = α^σ`, `α(e) = 0`, `α² = α` and
/// `α*α = (λ-μ)α + μ + (r-μ)δ_e`, returning the parameters.
pub fn srg_cayley_check<T: Scalar>(
    alpha: &GroupFunction<T>,
) -> Result<std::result::Result<SrgParams, CayleyFailure>> {
    let mut support = Vec::with_capacity(alpha.values.len());
    for (g, v) in alpha.values.iter().enumerate() {
        if v.is_zero() {
            support.push(false);
        } else if v.is_one() {
            support.push(true);
        } else {
            return Err(Error::Precondition(format!("α({g}) is neither 0 nor 1")));
        }
    }
    let grp = &alpha.group;
    if support[0] {
        return Ok(Err(CayleyFailure::IdentityInSupport));
    }
    if let Some(g) = (0..grp.order()).find(|&g| support[g] != support[grp.neg(g)]) {
        return Ok(Err(CayleyFailure::NotSymmetric { g }));
    }
    let mut counts = vec![0u64; grp.order()];
    let members: Vec<usize> = (0..grp.order()).filter(|&g| support[g]).collect();
    for &a in &members {
        for &b in &members {
            counts[grp.add(a, b)] += 1;
        }
    }
    let r = members.len() as u64;
    let (mut lambda, mut mu) = (None, None);
    for g in 1..grp.order() {
        let slot = if support[g] { &mut lambda } else { &mut mu };
        match *slot {
            None => *slot = Some(counts[g]),
            Some(v) if v != counts[g] => return Ok(Err(CayleyFailure::NotDifferenceSet { g })),
            Some(_) => {}
        }
    }
    let params = SrgParams::new(grp.order() as u64, r, lambda.unwrap_or(0), mu.unwrap_or(0))?;
    Ok(Ok(params))
}

/// The three-parameter family `φ = s χ_A + t χ_B + χ_C` on `L × M` with
/// `A = (L∖0) × 0`, `B = 0 × (M∖0)`, `C = (L∖0) × (M∖0)`. Returns `(φ, θ)`.
pub fn composite_on<T: Scalar>(
    l_group: &FinAbelianGroup,
    m_group: &FinAbelianGroup,
    variant: u8,
) -> Result<(GroupFunction<T>, T)> {
    let l = l_group.order() as i64;
    let m = m_group.order() as i64;
    let (s, t, theta) = match variant {
        1 => (
            T::from_ratio(1 - m, 2),
            T::from_ratio(1 - l, 2),
            T::from_ratio(4 - (m - 1) * (l - 1), 2),
        ),
        2 => (T::from_ratio(l * (1 - m), l - 1), T::one(), T::from_int(1 - m * l)),
        3 => (T::one(), T::from_ratio(m * (1 - l), m - 1), T::from_int(1 - m * l)),
        v => {
            return Err(Error::InvalidParameter(format!(
                "composite variant must be 1, 2 or 3, got {v}"
            )))
        }
    };
    let group = FinAbelianGroup::product(l_group, m_group);
    let split = l_group.order();
    let phi = GroupFunction::from_fn(group, |g| match (g % split != 0, g / split != 0) {
        (true, false) => s.clone(),
        (false, true) => t.clone(),
        (true, true) => T::one(),
        (false, false) => T::zero(),
    });
    Ok((phi, theta))
}

/// [`composite_on`] with cyclic factors `ℤ/ℓ × ℤ/m`.
pub fn composite_solution<T: Scalar>(l: u64, m: u64, variant: u8) -> Result<(GroupFunction<T>, T)> {
    composite_on(&FinAbelianGroup::cyclic(l)?, &FinAbelianGroup::cyclic(m)?, variant)
}

/// Closed form of `θ̂²` for the composite family.
pub fn composite_hat_theta_sq(l: u64, m: u64, variant: u8) -> Result<Rational> {
    let (l, m) = (l as i64, m as i64);
    let r = |a: i64, b: i64| Rational::from_ratio(a, b);
    Ok(match variant {
        1 => {
            let top = 4 - (m - 1) * (l - 1);
            r(top * top, m * l * (l - 1) * (m - 1) * (m + l + 2))
        }
        2 => r((l - 1) * (m * l - 1), l * l * m * (m - 1)),
        3 => r((m - 1) * (m * l - 1), m * m * l * (l - 1)),
        v => {
            return Err(Error::InvalidParameter(format!(
                "composite variant must be 1, 2 or 3, got {v}"
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{formulas, rook, srg_to_solution};
    use crate::matrix::verify_basic;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    fn z(n: u64) -> FinAbelianGroup {
        FinAbelianGroup::cyclic(n).unwrap()
    }

    #[test]
    fn mixed_radix_arithmetic() {
        let g = FinAbelianGroup::new(vec![2, 3]).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.digits(5), vec![1, 2]);
        assert_eq!(g.from_digits(&[1, 2]), 5);
        assert_eq!(g.add(5, 3), g.from_digits(&[0, 0]));
        assert_eq!(g.add(5, 1), g.from_digits(&[0, 2]));
        assert_eq!(g.neg(g.from_digits(&[1, 1])), g.from_digits(&[1, 2]));
        for a in 0..6 {
            assert_eq!(g.sub(a, a), 0);
        }
        assert!(FinAbelianGroup::new(vec![]).is_err());
        assert!(FinAbelianGroup::new(vec![3, 1]).is_err());
    }

    #[test]
    fn convolution_examples() {
        let g = z(4);
        let phi = GroupFunction::<Rational>::from_fn(g.clone(), |h| q(h as i64 * h as i64 - 3, 2));
        let delta = GroupFunction::delta(g.clone(), 0);
        assert_eq!(convolve(&delta, &phi).unwrap(), phi);
        let one = GroupFunction::constant(g.clone(), q(1, 1));
        assert_eq!(
            convolve(&one, &one).unwrap(),
            GroupFunction::constant(g.clone(), q(4, 1))
        );
        let odd = GroupFunction::<Rational>::indicator(g.clone(), |h| h % 2 == 1);
        let c = convolve(&odd, &odd).unwrap();
        assert_eq!(c.values(), &[q(2, 1), q(0, 1), q(2, 1), q(0, 1)]);
        let other = GroupFunction::<Rational>::zeros(z(5));
        assert_eq!(convolve(&odd, &other).unwrap_err(), Error::GroupMismatch);
    }

    #[test]
    fn hopf_basic_cases() {
        let rep = hopf_verify(&GroupFunction::<Rational>::zeros(z(5)), 0.0);
        assert!(rep.is_solution);
        assert_eq!(rep.theta, Some(q(0, 1)));

        let legendre = [0, 1, -1, -1, 1];
        let phi = GroupFunction::from_fn(z(5), |h| q(legendre[h], 1));
        let rep = hopf_verify(&phi, 0.0);
        assert!(rep.is_solution, "{rep:?}");
        assert_eq!(rep.theta, Some(q(0, 1)));

        // χ_{1} + χ_{2} - c is not symmetric on ℤ/5.
        let bad = GroupFunction::from_fn(z(5), |h| match h {
            1 | 2 => q(1, 1),
            0 => q(0, 1),
            _ => q(-2, 3),
        });
        let rep = hopf_verify(&bad, 0.0);
        assert!(!rep.is_solution);
        assert!(matches!(rep.violation, Some(Violation::Symmetry { .. })));
    }

    #[test]
    fn phi_to_matrix_preconditions() {
        let delta = GroupFunction::<Rational>::delta(z(5), 1);
        assert!(matches!(phi_to_matrix(&delta), Err(Error::Precondition(_))));
        let at_e = GroupFunction::<Rational>::delta(z(5), 0);
        assert!(matches!(phi_to_matrix(&at_e), Err(Error::Precondition(_))));
    }

    #[test]
    fn cayley_parameters() {
        let squares = [1usize, 3, 4, 9, 10, 12];
        let alpha = GroupFunction::<Rational>::indicator(z(13), |h| squares.contains(&h));
        assert_eq!(srg_cayley_check(&alpha).unwrap(), Ok(formulas::paley(13)));
        assert_eq!(formulas::paley(13), SrgParams { n: 13, r: 6, lambda: 2, mu: 3 });

        let g = FinAbelianGroup::new(vec![3, 3]).unwrap();
        let d = g.clone();
        let line = GroupFunction::<Rational>::indicator(g, |h| {
            let v = d.digits(h);
            h != 0 && (v[0] == 0 || v[1] == 0)
        });
        assert_eq!(srg_cayley_check(&line).unwrap(), Ok(SrgParams { n: 9, r: 4, lambda: 1, mu: 2 }));

        let single = GroupFunction::<Rational>::delta(z(5), 1);
        assert_eq!(srg_cayley_check(&single).unwrap(), Err(CayleyFailure::NotSymmetric { g: 1 }));
        let half = GroupFunction::constant(z(5), q(1, 2));
        assert!(srg_cayley_check(&half).is_err());
    }

    #[test]
    fn composite_table_examples() {
        let (phi, theta) = composite_solution::<Rational>(2, 3, 1).unwrap();
        assert_eq!(theta, q(1, 1));
        // (1,0) ∈ A carries s, (0,1) ∈ B carries t.
        assert_eq!(phi.get(1), &q(-1, 1));
        assert_eq!(phi.get(2), &q(-1, 2));
        let rep = hopf_verify(&phi, 0.0);
        assert_eq!(rep.theta, Some(q(1, 1)));

        let (phi, theta) = composite_solution::<Rational>(2, 2, 2).unwrap();
        assert_eq!(theta, q(-3, 1));
        assert_eq!(hopf_verify(&phi, 0.0).theta, Some(q(-3, 1)));
        assert!(composite_solution::<Rational>(2, 2, 4).is_err());
    }

    #[test]
    fn composite_three_by_three_is_negated_rook() {
        let (phi, theta) = composite_solution::<Rational>(3, 3, 1).unwrap();
        assert_eq!(theta, q(0, 1));
        let s = phi_to_matrix(&phi).unwrap();
        let (rook_s, rook_theta) = srg_to_solution::<Rational>(&rook(3).unwrap()).unwrap();
        assert_eq!(rook_theta, q(0, 1));
        assert_eq!(s, rook_s.map(|v| v * q(-2, 1)));
    }

    #[test]
    fn composite_family_verifies_with_closed_forms() {
        for l in 2..=5u64 {
            for m in 2..=5u64 {
                for v in 1..=3u8 {
                    let (phi, theta) = composite_solution::<Rational>(l, m, v).unwrap();
                    let rep = hopf_verify(&phi, 0.0);
                    assert!(rep.is_solution, "({l},{m},{v})");
                    assert_eq!(rep.theta.as_ref(), Some(&theta));
                    let s = phi_to_matrix(&phi).unwrap();
                    let rep2 = verify_basic(&s, 0.0).unwrap();
                    assert_eq!(rep2.theta, rep.theta);
                    assert_eq!(rep2.hat_theta_sq(), Some(composite_hat_theta_sq(l, m, v).unwrap()));
                    assert_eq!(s.norm_sq(), q((l * m) as i64, 1) * phi.norm_sq());
                }
            }
        }
    }

    #[test]
    fn composite_on_noncyclic_factor() {
        let klein = FinAbelianGroup::new(vec![2, 2]).unwrap();
        let (phi, theta) = composite_on::<Rational>(&klein, &z(3), 1).unwrap();
        assert_eq!(phi.group().order(), 12);
        assert_eq!(hopf_verify(&phi, 0.0).theta, Some(theta));
    }
}
