use drw_core::crystal::{builtin, UnitRootCrystalData, Window};
use drw_core::drw::{self, DrwParams, DrwTower, Fault};
use proptest::prelude::*;

fn build(data: UnitRootCrystalData, r: u32, lo: i64, hi: i64) -> DrwTower {
    DrwTower::build(&data.validate().unwrap(), DrwParams::new(r, Window::new(lo, hi).unwrap())).unwrap()
}

fn v_p(mut n: i64, p: i64) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Expected nontrivial divisors of H^i of `Kummer(c)` at integral weight `m`:
/// both H^0 and H^1 are `Z/p^min(r, v_p(m))`, with `v_p(0) = ∞`.
fn kummer_oracle(p: u32, r: u32, m: i64) -> Vec<String> {
    let e = if m == 0 { r } else { v_p(m, p as i64).min(r) };
    if e == 0 {
        vec![]
    } else {
        vec![(p as u64).pow(e).to_string()]
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kummer_cohomology(p in prop::sample::select(vec![2u32, 3]), c in -3i64..=3, r in 1u32..=2) {
        let t = build(UnitRootCrystalData::kummer(p, c), r, -(p as i64 * 2), p as i64 * 2);
        for s in 1..=r {
            drw::rho_check(&t, s).unwrap();
            for e in drw::cohomology_table(&t, s).unwrap() {
                let want = if e.weight.is_integral() { kummer_oracle(p, s, e.weight.total(p).0) } else { vec![] };
                prop_assert_eq!(&e.divisors, &want, "H^{} at weight {}", e.degree, e.weight.format(p));
            }
        }
    }
}

#[test]
fn direct_sum_cohomology_is_the_sum() {
    let p = 3;
    let t = build(builtin("gm-kummer-sum", p).unwrap(), 2, -4, 4);
    drw::rho_check(&t, 2).unwrap();
    for e in drw::cohomology_table(&t, 2).unwrap() {
        if !e.weight.is_integral() {
            assert!(e.divisors.is_empty());
            continue;
        }
        // K(1) ⊕ K(2): the block of weight m holds summands of weights m for both
        let m = e.weight.total(p).0;
        let mut want: Vec<String> = kummer_oracle(p, 2, m).into_iter().chain(kummer_oracle(p, 2, m)).collect();
        want.sort_by_key(|d| d.parse::<u64>().unwrap());
        let mut got = e.divisors.clone();
        got.sort_by_key(|d| d.parse::<u64>().unwrap());
        assert_eq!(got, want, "H^{} at weight {m}", e.degree);
    }
}

#[test]
fn level_checks_pass_on_builtins() {
    for (name, lo) in [("a1-trivial", 0), ("gm-kummer:c=-1", -4), ("a1-rank2-sum", 0)] {
        let t = build(builtin(name, 2).unwrap(), 2, lo, 4);
        for (check, rep) in drw::run_level_checks(&t, 2) {
            assert!(rep.passed, "{name}: {check}: {:?}", rep.witness);
        }
    }
}

#[test]
fn faults_hit_their_checks() {
    let c = UnitRootCrystalData::kummer(2, 1).validate().unwrap();
    let params = DrwParams::new(2, Window::new(-4, 4).unwrap());
    let t = DrwTower::build(&c, params).unwrap().with_fault(Some(Fault::FlipFrobenius));
    assert!(matches!(drw::alpha_f_check(&t, 2), Err(drw_core::Error::Mismatch { .. })));
    let t = DrwTower::build(&c, params).unwrap().with_fault(Some(Fault::DropLambda));
    assert!(matches!(drw::rho_check(&t, 1), Err(drw_core::Error::QuasiIsoFailure { .. })));
    assert!(drw::suites::witt_suite(2, 2, 50, 1, Some(Fault::BadWittCarry)).is_err());
    for f in Fault::ALL {
        assert_eq!(f.name().parse::<Fault>().unwrap(), f);
    }
    assert!("nope".parse::<Fault>().is_err());
}

#[test]
fn json_export_shape() {
    let t = build(builtin("a1-trivial", 2).unwrap(), 2, 0, 4);
    let table = drw::cohomology_table(&t, 2).unwrap();
    let v = drw::to_json(&t, Some(&table), &[]);
    assert_eq!(v["schema"], "drw/1");
    assert_eq!(v["p"], 2);
    assert_eq!(v["levels"].as_array().unwrap().len(), 2);
    let block = &v["levels"][0]["blocks"][0];
    for key in ["degree", "weight", "total", "divisors", "stable_from", "clipped_ops"] {
        assert!(block.get(key).is_some(), "missing {key}");
    }
    let csv = drw::to_csv(&t);
    assert!(csv.starts_with("r,degree,weight,total_weight,divisors,stable_from\n"));
}
