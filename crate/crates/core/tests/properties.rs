use proptest::prelude::*;

use ctw_core::catalog::{construct, FamilySpec};
use ctw_core::curvature::{
    einstein_decompose, fixed_point_residual, jordan_sharp, solution_to_tensor, ConstantBranch, DiagCurvature,
};
use ctw_core::finite_field::FieldTable;
use ctw_core::group_ring::{composite_on, convolve, hopf_verify, phi_to_matrix, FinAbelianGroup, GroupFunction};
use ctw_core::io::AnySolution;
use ctw_core::matrix::{block_combine, block_hat_theta_sq, hat_theta_sq, inflate, scale};
use ctw_core::{verify_basic, Rational, RationalSolution, Scalar};

fn q(a: i64, b: i64) -> Rational {
    Rational::from_ratio(a, b)
}

fn known() -> Vec<(RationalSolution, Rational)> {
    let specs = [
        FamilySpec::DisjointComplete { m: 2, l: 2 },
        FamilySpec::DisjointComplete { m: 3, l: 2 },
        FamilySpec::Kneser2 { m: 5 },
        FamilySpec::Rook { m: 3 },
        FamilySpec::Paley { q: 5 },
        FamilySpec::Paley { q: 9 },
        FamilySpec::Pds { q: 3, l: 2 },
        FamilySpec::Composite { l: 2, m: 3, variant: 1 },
        FamilySpec::Composite { l: 3, m: 2, variant: 2 },
        FamilySpec::Composite { l: 2, m: 4, variant: 3 },
        FamilySpec::SphereProduct { k: 2, l: 3 },
    ];
    specs
        .iter()
        .map(|spec| match construct(spec).unwrap() {
            AnySolution::Rational(f) => (f.matrix, f.theta),
            AnySolution::Float(_) => unreachable!("exact families"),
        })
        .collect()
}

fn nonzero_ratio() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_filter("nonzero", |(a, _)| *a != 0).prop_map(|(a, b)| q(a, b))
}

fn ratio() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| q(a, b))
}

/// Products of cyclic groups of order at most 24.
fn group() -> impl Strategy<Value = FinAbelianGroup> {
    prop::collection::vec(2u64..=6, 1..=3)
        .prop_filter("order ≤ 24", |v| v.iter().product::<u64>() <= 24)
        .prop_map(|v| FinAbelianGroup::new(v).unwrap())
}

fn function_on(g: FinAbelianGroup) -> impl Strategy<Value = GroupFunction<Rational>> {
    let n = g.order();
    prop::collection::vec(ratio(), n).prop_map(move |v| GroupFunction::new(g.clone(), v).unwrap())
}

fn symmetric_phi() -> impl Strategy<Value = GroupFunction<Rational>> {
    group().prop_flat_map(function_on).prop_map(|f| {
        let g = f.group().clone();
        GroupFunction::from_fn(g.clone(), |a| {
            if a == 0 {
                Rational::from_int(0)
            } else {
                f.get(a).clone() + f.get(g.neg(a)).clone()
            }
        })
    })
}

/// Symmetric, vanishing at the identity; a mix of random functions, random
/// zero-sum ones, and scaled solutions.
fn candidate_phi() -> impl Strategy<Value = GroupFunction<Rational>> {
    let zero_sum = symmetric_phi().prop_map(|f| {
        let n = f.group().order();
        let mean = f.sum() / Rational::from_int(n as i64 - 1);
        let g = f.group().clone();
        GroupFunction::from_fn(g, |a| if a == 0 { Rational::from_int(0) } else { f.get(a).clone() - mean.clone() })
    });
    let solution = (2u64..=4, 2u64..=6, 1u8..=3, nonzero_ratio())
        .prop_filter("order ≤ 24", |(l, m, _, _)| l * m <= 24)
        .prop_map(|(l, m, variant, t)| {
            let (phi, _) = composite_on::<Rational>(
                &FinAbelianGroup::cyclic(l).unwrap(),
                &FinAbelianGroup::cyclic(m).unwrap(),
                variant,
            )
            .unwrap();
            phi.map(|v| v.clone() * t.clone())
        });
    prop_oneof![symmetric_phi(), zero_sum, solution]
}

fn tensor(n: usize) -> impl Strategy<Value = DiagCurvature<Rational>> {
    prop::collection::vec(ratio(), n * (n - 1) / 2).prop_map(move |v| {
        let mut it = v.into_iter();
        DiagCurvature::from_upper(n, |_, _| it.next().unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scale_preserves_hat_theta(idx in 0usize..11, t in nonzero_ratio()) {
        let sols = known();
        let (s, theta) = &sols[idx];
        let (ts, ttheta) = scale(s, theta, &t);
        let rep = verify_basic(&ts, 0.0).unwrap();
        prop_assert!(rep.is_solution);
        prop_assert_eq!(rep.theta.as_ref(), Some(&ttheta));
        prop_assert_eq!(hat_theta_sq(&ttheta, &ts).unwrap(), hat_theta_sq(theta, s).unwrap());
    }

    #[test]
    fn inflate_preserves_theta(idx in 0usize..11, extra in 1usize..5) {
        let sols = known();
        let (s, theta) = &sols[idx];
        let big = inflate(s, s.n() + extra).unwrap();
        let rep = verify_basic(&big, 0.0).unwrap();
        prop_assert!(rep.is_solution);
        prop_assert_eq!(rep.theta.as_ref(), Some(theta));
        prop_assert_eq!(hat_theta_sq(theta, &big).unwrap(), hat_theta_sq(theta, s).unwrap());
    }

    #[test]
    fn block_combine_hat_theta(i in 0usize..11, j in 0usize..11, t1 in nonzero_ratio(), t2 in nonzero_ratio()) {
        let sols = known();
        let (s1, th1) = scale(&sols[i].0, &sols[i].1, &t1);
        let (s2, th2) = scale(&sols[j].0, &sols[j].1, &t2);
        let combined = block_combine(&s1, &th1, &s2, &th2);
        match (th1 == Rational::from_int(0), th2 == Rational::from_int(0)) {
            (false, false) => {
                let (s, theta) = combined.unwrap();
                let rep = verify_basic(&s, 0.0).unwrap();
                prop_assert!(rep.is_solution);
                prop_assert_eq!(rep.theta.as_ref(), Some(&theta));
                let expected = block_hat_theta_sq(&hat_theta_sq(&th1, &s1).unwrap(), &hat_theta_sq(&th2, &s2).unwrap());
                prop_assert_eq!(hat_theta_sq(&theta, &s).unwrap(), expected);
            }
            (true, true) => {
                let (s, theta) = combined.unwrap();
                prop_assert_eq!(&theta, &Rational::from_int(0));
                let rep = verify_basic(&s, 0.0).unwrap();
                prop_assert!(rep.is_solution);
                prop_assert_eq!(rep.theta, Some(Rational::from_int(0)));
            }
            _ => prop_assert!(combined.is_err()),
        }
    }

    #[test]
    fn convolution_is_commutative_and_associative(
        (a, b, c) in group().prop_flat_map(|g| (function_on(g.clone()), function_on(g.clone()), function_on(g)))
    ) {
        prop_assert_eq!(convolve(&a, &b).unwrap(), convolve(&b, &a).unwrap());
        let left = convolve(&convolve(&a, &b).unwrap(), &c).unwrap();
        let right = convolve(&a, &convolve(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn hopf_matches_matrix_check(phi in candidate_phi()) {
        let h = hopf_verify(&phi, 0.0);
        let m = verify_basic(&phi_to_matrix(&phi).unwrap(), 0.0).unwrap();
        prop_assert_eq!(h.is_solution, m.is_solution);
        if h.is_solution && phi.norm_sq() != Rational::from_int(0) {
            prop_assert_eq!(h.theta, m.theta);
        }
    }

    #[test]
    fn sharp_is_symmetric_and_bilinear(
        (r1, r2, t) in (4usize..=7).prop_flat_map(|n| (tensor(n), tensor(n), tensor(n))),
        a in ratio(),
        b in ratio(),
    ) {
        prop_assert_eq!(jordan_sharp(&r1, &t).unwrap(), jordan_sharp(&t, &r1).unwrap());
        let mix = r1.combine(&a, &r2, &b).unwrap();
        let lhs = jordan_sharp(&mix, &t).unwrap();
        let rhs = jordan_sharp(&r1, &t).unwrap().combine(&a, &jordan_sharp(&r2, &t).unwrap(), &b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn solution_tensors_are_einstein_fixed_points(idx in 0usize..11, t in nonzero_ratio()) {
        let sols = known();
        let (s, theta) = scale(&sols[idx].0, &sols[idx].1, &t);
        let r = solution_to_tensor(&s, &theta, ConstantBranch::Sphere).unwrap();
        prop_assert_eq!(fixed_point_residual(&r, &theta), DiagCurvature::zeros(s.n()));
        prop_assert!(einstein_decompose(&r, 0.0).is_einstein);
    }

    #[test]
    fn field_arithmetic_axioms(qi in 0usize..8, a in 0usize..64, b in 0usize..64, c in 0usize..64) {
        let order = [4u64, 5, 7, 8, 9, 16, 25, 27][qi];
        let f = FieldTable::new(order).unwrap();
        let n = order as usize;
        let (x, y, z) = (f.element((a % n) as u32).unwrap(), f.element((b % n) as u32).unwrap(), f.element((c % n) as u32).unwrap());
        let lhs = f.mul(x, f.add(y, z).unwrap()).unwrap();
        let rhs = f.add(f.mul(x, y).unwrap(), f.mul(x, z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(f.mul(x, y).unwrap(), f.mul(y, x).unwrap());
        if !x.is_zero() {
            prop_assert_eq!(f.mul(x, f.inv(x).unwrap()).unwrap(), f.one());
        }
    }
}
