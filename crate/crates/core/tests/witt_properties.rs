use std::sync::Arc;

use drw_core::exactalg::{FrobeniusLiftSpec, LaurentPolynomial, Monomial, Ring, Variable};
use drw_core::witt::{delta_lift, WittVector};
use num_bigint::BigInt;
use proptest::prelude::*;

fn fp_ring(p: u32) -> Arc<Ring> {
    Ring::new(vec![Variable::polynomial("t")], Some(BigInt::from(p)))
}

fn poly(ring: &Arc<Ring>, terms: &[(i64, i64)]) -> LaurentPolynomial {
    let mut f = LaurentPolynomial::zero(ring);
    for &(e, c) in terms {
        f.add_term(Monomial(vec![e]), BigInt::from(c));
    }
    f
}

fn witt(p: u32, ring: &Arc<Ring>, coords: &[Vec<(i64, i64)>]) -> WittVector {
    WittVector::new(p, coords.iter().map(|t| poly(ring, t)).collect()).unwrap()
}

fn coords_strategy(r: usize) -> impl Strategy<Value = Vec<Vec<(i64, i64)>>> {
    prop::collection::vec(prop::collection::vec((0i64..4, 0i64..3), 0..=3), r)
}

fn params() -> impl Strategy<Value = (u32, usize)> {
    (prop_oneof![Just(2u32), Just(3u32)], 1usize..=3)
}

#[test]
fn ghost_map_is_a_ring_homomorphism_on_small_integers() {
    let z = Ring::integers(vec![]);
    for p in [2u32, 3] {
        for r in 1..=4usize {
            let values: &[i64] = if r <= 3 { &[-1, 0, 1, 2] } else { &[0, 1] };
            let all: Vec<Vec<i64>> = (0..values.len().pow(r as u32))
                .map(|mut k| {
                    (0..r)
                        .map(|_| {
                            let v = values[k % values.len()];
                            k /= values.len();
                            v
                        })
                        .collect()
                })
                .collect();
            let mk = |c: &[i64]| WittVector::new(p, c.iter().map(|&v| LaurentPolynomial::constant(&z, BigInt::from(v))).collect()).unwrap();
            for a in &all {
                for b in &all {
                    let (u, v) = (mk(a), mk(b));
                    let (gu, gv) = (u.to_ghost().unwrap(), v.to_ghost().unwrap());
                    assert_eq!(u.add(&v).unwrap().to_ghost().unwrap(), gu.add(&gv), "sum p={p} {a:?} {b:?}");
                    assert_eq!(u.mul(&v).unwrap().to_ghost().unwrap(), gu.mul(&gv), "product p={p} {a:?} {b:?}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frobenius_and_verschiebung_compose_to_p(((p, r), a) in params().prop_flat_map(|(p, r)| (Just((p, r)), coords_strategy(r)))) {
        let ring = fp_ring(p);
        let w = witt(p, &ring, &a);
        let pw = w.zmul(&BigInt::from(p));
        prop_assert_eq!(w.verschiebung_truncated().frobenius().unwrap(), pw.clone());
        prop_assert_eq!(pw.len(), r);
        prop_assert_eq!(w.frobenius().unwrap().verschiebung_truncated(), pw);
    }

    #[test]
    fn projection_formula(((p, r), a, b) in params().prop_flat_map(|(p, r)| (Just((p, r)), coords_strategy(r), coords_strategy(r)))) {
        let ring = fp_ring(p);
        let x = witt(p, &ring, &a);
        let y = witt(p, &ring, &b);
        let lhs = x.mul(&y.frobenius().unwrap()).unwrap().verschiebung();
        let ylong = WittVector::new(p, y.coords().iter().cloned().chain([LaurentPolynomial::zero(&ring)]).collect()).unwrap();
        // V(x·Fy) = V(x)·y only depends on the first r coordinates of y
        prop_assert_eq!(lhs.truncate(r), x.verschiebung().mul(&ylong).unwrap().truncate(r));
    }

    #[test]
    fn v_image_is_an_ideal(((p, r), a, b) in (prop_oneof![Just(2u32), Just(3u32)], 2usize..=3).prop_flat_map(|(p, r)| (Just((p, r)), coords_strategy(r), coords_strategy(r)))) {
        let ring = fp_ring(p);
        let u = witt(p, &ring, &a);
        let v = witt(p, &ring, &b);
        for s in 1..r {
            let mut vs = u.clone();
            for _ in 0..s {
                vs = vs.verschiebung_truncated();
            }
            let prod = vs.mul(&v).unwrap();
            prop_assert!(prod.coords()[..s].iter().all(LaurentPolynomial::is_zero));
        }
    }

    #[test]
    fn no_p_torsion_over_polynomial_rings(((p, r), a) in params().prop_flat_map(|(p, r)| (Just((p, r)), coords_strategy(r)))) {
        let ring = fp_ring(p);
        let w = witt(p, &ring, &a);
        let pw = w.zmul(&BigInt::from(p));
        // over a reduced ring, p·w = (0, w_0^p, …, w_{r-2}^p): the p-torsion of W_r is exactly V^{r-1}
        let low_zero = w.coords()[..r - 1].iter().all(LaurentPolynomial::is_zero);
        prop_assert_eq!(pw.is_zero(), low_zero);
    }

    #[test]
    fn divided_power_axioms(((p, r), a, b, n, m, lam) in (prop_oneof![Just(2u32), Just(3u32)], 2usize..=3)
        .prop_flat_map(|(p, r)| (Just((p, r)), coords_strategy(r - 1), coords_strategy(r - 1), 1u32..4, 1u32..3, coords_strategy(r))))
    {
        let ring = fp_ring(p);
        let w = witt(p, &ring, &a).verschiebung();
        let w2 = witt(p, &ring, &b).verschiebung();
        let l = witt(p, &ring, &lam);
        let g = |x: &WittVector, k: u32| x.pd_gamma(k, None).unwrap();
        let binom = drw_core::exactalg::binomial(n + m, n);
        prop_assert_eq!(g(&w, n).mul(&g(&w, m)).unwrap(), g(&w, n + m).zmul(&binom));
        let mut ln = WittVector::one(p, r, &ring);
        for _ in 0..n {
            ln = ln.mul(&l).unwrap();
        }
        prop_assert_eq!(g(&l.mul(&w).unwrap(), n), ln.mul(&g(&w, n)).unwrap());
        let mut sum = WittVector::zero(p, r, &ring);
        for i in 0..=n {
            sum = sum.add(&g(&w, i).mul(&g(&w2, n - i)).unwrap()).unwrap();
        }
        prop_assert_eq!(g(&w.add(&w2).unwrap(), n), sum);
    }

    #[test]
    fn delta_lift_is_a_pd_morphism_and_intertwines_frobenius(
        (p, r, a, custom, n) in (prop_oneof![Just(2u32), Just(3u32)], 2usize..=3, prop::collection::vec((0i64..4, -3i64..4), 1..=3), any::<bool>(), 1u32..5)
    ) {
        let z = Ring::integers(vec![Variable::polynomial("x")]);
        let a = poly(&z, &a);
        let x = LaurentPolynomial::var(&z, 0);
        let phi = if custom {
            FrobeniusLiftSpec::new(p, &z, vec![&x.pow(p as u64) + &x.pow(2).scale(&BigInt::from(p))]).unwrap()
        } else {
            FrobeniusLiftSpec::standard(p, &z)
        };
        let n = n.min(p + 1);
        let pr = drw_core::exactalg::pow_big(p, r as u32);
        let c = drw_core::exactalg::p_local_residue(&drw_core::exactalg::pow_big(p, n), &drw_core::exactalg::factorial(n), &pr).unwrap();
        let bracket = a.pow(n as u64).scale(&c);
        let pa = a.scale(&BigInt::from(p));
        prop_assert_eq!(delta_lift(&bracket, &phi, r).unwrap(), delta_lift(&pa, &phi, r).unwrap().pd_gamma(n, None).unwrap());
        let phi_a = drw_core::exactalg::frobenius_substitute(&a, &phi).unwrap();
        prop_assert_eq!(delta_lift(&phi_a, &phi, r).unwrap(), delta_lift(&a, &phi, r).unwrap().frobenius().unwrap());
    }
}
