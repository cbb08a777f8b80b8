use std::sync::Arc;

use drw_core::derham::{parse_polynomial, pd_collapse_check, DifferentialForm, IndexSet};
use drw_core::exactalg::{FrobeniusLiftSpec, LaurentPolynomial, Monomial, Ring, Variable};
use num_bigint::BigInt;
use proptest::prelude::*;

fn ring() -> Arc<Ring> {
    Ring::integers(vec![Variable::polynomial("x"), Variable::polynomial("y")])
}

fn lift(p: u32, custom: bool) -> FrobeniusLiftSpec {
    let r = ring();
    if !custom {
        return FrobeniusLiftSpec::standard(p, &r);
    }
    let images = vec![
        parse_polynomial(&r, &format!("x^{p} + {p}*y")).unwrap(),
        parse_polynomial(&r, &format!("y^{p} + {p}*x^2*y")).unwrap(),
    ];
    FrobeniusLiftSpec::new(p, &r, images).unwrap()
}

type Terms = Vec<(u32, i64, i64, i64)>;

fn form(terms: &Terms) -> DifferentialForm {
    let r = ring();
    let mut w = DifferentialForm::zero(&r);
    for &(mask, a, b, c) in terms {
        w.add_term(IndexSet(mask), Monomial(vec![a, b]), BigInt::from(c));
    }
    w
}

fn terms() -> impl Strategy<Value = Terms> {
    prop::collection::vec((0u32..4, 0i64..4, 0i64..4, -3i64..4), 0..5)
}

fn homogeneous_terms() -> impl Strategy<Value = (usize, Terms)> {
    (0usize..=2).prop_flat_map(|k| {
        let masks: Vec<u32> = IndexSet::subsets(2, k).into_iter().map(|s| s.0).collect();
        (Just(k), prop::collection::vec((prop::sample::select(masks), 0i64..4, 0i64..4, -3i64..4), 0..5))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_and_leibniz(a in homogeneous_terms(), b in terms()) {
        let (k, a) = a;
        let (w, e) = (form(&a), form(&b));
        prop_assert!(w.d().d().is_zero());
        let lhs = w.wedge(&e).unwrap().d();
        let sign = if k % 2 == 0 { BigInt::from(1) } else { BigInt::from(-1) };
        let rhs = &w.d().wedge(&e).unwrap() + &w.wedge(&e.d()).unwrap().scale(&sign);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_commutativity(a in homogeneous_terms(), b in homogeneous_terms()) {
        let ((k, a), (l, b)) = (a, b);
        let (w, e) = (form(&a), form(&b));
        let sign = if (k * l) % 2 == 0 { BigInt::from(1) } else { BigInt::from(-1) };
        prop_assert_eq!(w.wedge(&e).unwrap(), e.wedge(&w).unwrap().scale(&sign));
    }

    #[test]
    fn dieudonne_identities(a in homogeneous_terms(), b in terms(), p in prop_oneof![Just(2u32), Just(3u32)], custom in any::<bool>()) {
        let (k, a) = a;
        let phi = lift(p, custom);
        let w = form(&a);
        let e = form(&b);
        let pb = BigInt::from(p);
        let f = |x: &DifferentialForm| x.divided_frobenius(&phi).unwrap();
        prop_assert_eq!(f(&w).d(), f(&w.d()).scale(&pb));
        prop_assert_eq!(w.undivided_frobenius(&phi).unwrap(), f(&w).scale(&num_traits::pow(pb.clone(), k)));
        prop_assert_eq!(f(&w.wedge(&e).unwrap()), f(&w).wedge(&f(&e)).unwrap());
        if k == 0 {
            let a = w.as_function().unwrap();
            let m = Some(&pb);
            prop_assert_eq!(f(&w).as_function().unwrap().reduce(m), a.pow(p as u64).reduce(m));
        }
    }

    #[test]
    fn weights_scale_by_p(mask in 0u32..4, a in 0i64..4, b in 0i64..4, p in prop_oneof![Just(2u32), Just(3u32)]) {
        let w = form(&vec![(mask, a, b, 1)]);
        let wt = w.weight().unwrap();
        let phi = lift(p, false);
        prop_assert_eq!(w.d().weight().map(|x| x == wt).unwrap_or(true), true);
        let pw: Vec<i64> = wt.iter().map(|x| x * p as i64).collect();
        prop_assert!(w.divided_frobenius(&phi).unwrap().is_weight_homogeneous(&pw));
        prop_assert!(w.undivided_frobenius(&phi).unwrap().is_weight_homogeneous(&pw));
    }

    #[test]
    fn pd_relations_hold(coeffs in prop::collection::vec(-5i64..6, 1..4), p in prop_oneof![Just(2u32), Just(3u32)], r in 1u32..4) {
        let z = Ring::integers(vec![Variable::polynomial("x")]);
        let mut x = LaurentPolynomial::zero(&z);
        for (i, c) in coeffs.iter().enumerate() {
            x.add_term(Monomial(vec![i as i64]), BigInt::from(*c));
        }
        let report = pd_collapse_check(p, r, &[x], p + 1).unwrap();
        prop_assert_eq!(report.checked, (p + 1) as usize);
    }
}
