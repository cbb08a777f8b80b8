use std::sync::Arc;

use drw_core::exactalg::{
    frobenius_substitute, lattice_quotient, pow_big, snf, FrobeniusLiftSpec, IntegerMatrix, Lattice, LaurentPolynomial, Monomial,
    Ring, Variable,
};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = IntegerMatrix> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-6i64..7, r * c).prop_map(move |v| {
            IntegerMatrix::from_rows(v.chunks(c).map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect()).unwrap()
        })
    })
}

fn ring() -> Arc<Ring> {
    Ring::integers(vec![Variable::polynomial("x"), Variable::laurent("y")])
}

fn poly() -> impl Strategy<Value = LaurentPolynomial> {
    prop::collection::vec((0i64..4, -2i64..3, -5i64..6), 0..5).prop_map(|t| {
        let r = ring();
        let mut f = LaurentPolynomial::zero(&r);
        for (a, b, c) in t {
            f.add_term(Monomial(vec![a, b]), BigInt::from(c));
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(m in matrix()) {
        let s = snf(&m);
        let d = s.u.mul(&m).mul(&s.v);
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let expected = if i == j && i < s.diagonal.len() { s.diagonal[i].clone() } else { BigInt::from(0) };
                prop_assert_eq!(&d[(i, j)], &expected);
            }
        }
        prop_assert_eq!(s.u.determinant().abs(), BigInt::from(1));
        prop_assert_eq!(s.v.determinant().abs(), BigInt::from(1));
        for w in s.diagonal.windows(2) {
            if !w[1].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn self_quotient_is_trivial(m in matrix()) {
        let l = Lattice::column_span(&m);
        prop_assert!(lattice_quotient(&l, &l).unwrap().is_trivial());
    }

    #[test]
    fn exact_division_round_trip(f in poly(), k in 0u32..4, p in prop_oneof![Just(2u32), Just(3u32), Just(5u32)]) {
        let g = f.scale(&pow_big(p, k));
        prop_assert_eq!(g.exact_div_p(p, k).unwrap(), f);
    }

    #[test]
    fn frobenius_lift_is_a_ring_homomorphism(f in poly(), g in poly(), p in prop_oneof![Just(2u32), Just(3u32)]) {
        let phi = FrobeniusLiftSpec::standard(p, &ring());
        let phi_ = |h: &LaurentPolynomial| frobenius_substitute(h, &phi).unwrap();
        prop_assert_eq!(phi_(&(&f + &g)), &phi_(&f) + &phi_(&g));
        prop_assert_eq!(phi_(&(&f * &g)), &phi_(&f) * &phi_(&g));
        prop_assert_eq!(phi_(&LaurentPolynomial::one(&ring())), LaurentPolynomial::one(&ring()));
        let m = BigInt::from(p);
        prop_assert_eq!(phi_(&f).reduce(Some(&m)), f.reduce(Some(&m)).pow(p as u64));
    }
}
