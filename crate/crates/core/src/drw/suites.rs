//! Randomized identity suites over Witt vectors, divided powers and de Rham
//! complexes. Every comparison is exact; a failure names its witness.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::checks::CheckStats;
use super::Fault;
use crate::crystal::{CoefficientComplex, Crystal, Window};
use crate::derham::{DifferentialForm, IndexSet};
use crate::error::{Error, Result};
use crate::exactalg::{binomial, factorial, frobenius_substitute, p_local_residue, pow_big, FrobeniusLiftSpec, LaurentPolynomial, Monomial, Ring, Variable};
use crate::witt::{delta_lift, WittVector};

fn fail(check: &str, witness: String) -> Error {
    Error::Mismatch { check: check.into(), witness }
}

fn ensure(ok: bool, check: &str, witness: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(fail(check, witness()))
    }
}

/// A polynomial in `t` with at most `terms` terms, coefficients below `bound`.
fn random_poly(rng: &mut StdRng, ring: &Arc<Ring>, terms: usize, bound: i64) -> LaurentPolynomial {
    let mut f = LaurentPolynomial::zero(ring);
    for _ in 0..rng.gen_range(0..=terms) {
        let e: Vec<i64> = (0..ring.nvars()).map(|_| rng.gen_range(0..4)).collect();
        f.add_term(Monomial(e), BigInt::from(rng.gen_range(1..bound.max(2))));
    }
    f
}

fn random_witt(rng: &mut StdRng, p: u32, r: usize, ring: &Arc<Ring>) -> WittVector {
    WittVector::new(p, (0..r).map(|_| random_poly(rng, ring, 3, p as i64)).collect()).expect("valid parameters")
}

/// Witt addition, or the carry-free coordinatewise sum under [`Fault::BadWittCarry`].
fn witt_add(a: &WittVector, b: &WittVector, fault: Option<Fault>) -> Result<WittVector> {
    if fault == Some(Fault::BadWittCarry) {
        return WittVector::new(a.p(), a.coords().iter().zip(b.coords()).map(|(x, y)| x + y).collect());
    }
    a.add(b)
}

fn lift(w: &WittVector) -> WittVector {
    let z = w.ring().with_modulus(None);
    WittVector::new(w.p(), w.coords().iter().map(|c| c.in_ring(&z)).collect()).expect("same shape")
}

/// Ring axioms, ghost homomorphism, `FV = VF = p`, `V(x·Fy) = V(x)·y` and
/// Teichmüller multiplicativity on `count` random triples in `W_r(F_p[t])`.
pub fn witt_suite(p: u32, r: usize, count: usize, seed: u64, fault: Option<Fault>) -> Result<CheckStats> {
    let ring = Ring::new(vec![Variable::polynomial("t")], Some(BigInt::from(p)));
    let mut rng = StdRng::seed_from_u64(seed);
    let zero = WittVector::zero(p, r, &ring);
    let one = WittVector::one(p, r, &ring);
    let pb = BigInt::from(p);
    let mut stats = CheckStats::default();
    let add = |a: &WittVector, b: &WittVector| witt_add(a, b, fault);
    for _ in 0..count {
        let (a, b, c) = (random_witt(&mut rng, p, r, &ring), random_witt(&mut rng, p, r, &ring), random_witt(&mut rng, p, r, &ring));
        let w = || format!("p={p}, r={r}, a={a}, b={b}, c={c}");

        // ghost components over Z[t] of the integer lifts
        let (la, lb) = (lift(&a), lift(&b));
        let (ga, gb) = (la.to_ghost()?, lb.to_ghost()?);
        let sum = add(&la, &lb)?;
        ensure(sum.to_ghost()? == ga.add(&gb), "ghost(a+b) = ghost(a)+ghost(b)", w)?;
        ensure(la.mul(&lb)?.to_ghost()? == ga.mul(&gb), "ghost(ab) = ghost(a)ghost(b)", w)?;
        ensure(sum.reduce(Some(&pb)) == add(&a, &b)?, "a+b commutes with reduction mod p", w)?;

        ensure(add(&a, &b)? == add(&b, &a)?, "a+b = b+a", w)?;
        ensure(add(&add(&a, &b)?, &c)? == add(&a, &add(&b, &c)?)?, "(a+b)+c = a+(b+c)", w)?;
        ensure(add(&a, &zero)? == a && add(&a, &a.neg())?.is_zero(), "additive identity and inverse", w)?;
        ensure(a.mul(&b)? == b.mul(&a)?, "ab = ba", w)?;
        ensure(a.mul(&b)?.mul(&c)? == a.mul(&b.mul(&c)?)?, "(ab)c = a(bc)", w)?;
        ensure(a.mul(&one)? == a, "a·1 = a", w)?;
        ensure(a.mul(&add(&b, &c)?)? == add(&a.mul(&b)?, &a.mul(&c)?)?, "a(b+c) = ab+ac", w)?;

        let pa = a.zmul(&pb);
        ensure(a.verschiebung_truncated().frobenius()? == pa, "FV = p", w)?;
        ensure(a.frobenius()?.verschiebung_truncated() == pa, "VF = p", w)?;

        let blong = WittVector::new(p, b.coords().iter().cloned().chain([LaurentPolynomial::zero(&ring)]).collect())?;
        let lhs = a.mul(&b.frobenius()?)?.verschiebung();
        ensure(lhs == a.verschiebung().mul(&blong)?, "V(x·Fy) = V(x)·y", w)?;

        let (f, g) = (&a.coords()[0], &b.coords()[0]);
        let tf = WittVector::teichmuller(p, r, f);
        let tg = WittVector::teichmuller(p, r, g);
        ensure(tf.mul(&tg)? == WittVector::teichmuller(p, r, &(f * g)), "[f][g] = [fg]", w)?;
        stats.checked += 1;
    }
    Ok(stats)
}

/// Divided-power axioms on `count` random elements of `V W_{r-1}(F_p[t])`, and
/// `delta_lift` as a PD-morphism intertwining Frobenius on `lifts` random
/// polynomials (default and a custom lift).
pub fn pd_suite(p: u32, r: usize, count: usize, lifts: usize, seed: u64) -> Result<CheckStats> {
    if r < 2 {
        return Err(Error::InvalidJob("the divided-power suite needs r ≥ 2".into()));
    }
    let ring = Ring::new(vec![Variable::polynomial("t")], Some(BigInt::from(p)));
    let mut rng = StdRng::seed_from_u64(seed);
    let mut stats = CheckStats::default();
    let g = |x: &WittVector, k: u32| x.pd_gamma(k, None);
    for _ in 0..count {
        let w = random_witt(&mut rng, p, r - 1, &ring).verschiebung();
        let w2 = random_witt(&mut rng, p, r - 1, &ring).verschiebung();
        let lam = random_witt(&mut rng, p, r, &ring);
        let n = rng.gen_range(1..=3u32);
        let m = rng.gen_range(1..=2u32);
        let wit = || format!("p={p}, r={r}, w={w}, w'={w2}, λ={lam}, n={n}, m={m}");

        ensure(g(&w, 0)? == WittVector::one(p, r, &ring) && g(&w, 1)? == w, "γ_0 = 1, γ_1 = id", wit)?;
        ensure(g(&w, n)?.mul(&g(&w, m)?)? == g(&w, n + m)?.zmul(&binomial(n + m, n)), "γ_n γ_m = C(n+m, n) γ_{n+m}", wit)?;
        let mut ln = WittVector::one(p, r, &ring);
        for _ in 0..n {
            ln = ln.mul(&lam)?;
        }
        ensure(g(&lam.mul(&w)?, n)? == ln.mul(&g(&w, n)?)?, "γ_n(λw) = λ^n γ_n(w)", wit)?;
        let mut sum = WittVector::zero(p, r, &ring);
        for i in 0..=n {
            sum = sum.add(&g(&w, i)?.mul(&g(&w2, n - i)?)?)?;
        }
        ensure(g(&w.add(&w2)?, n)? == sum, "γ_n(w+w') = Σ γ_i(w) γ_{n-i}(w')", wit)?;
        // γ_n(γ_m(w)) = (nm)! / (n! (m!)^n) γ_{nm}(w)
        let c = factorial(n * m) / (factorial(n) * num_traits::pow(factorial(m), n as usize));
        ensure(g(&g(&w, m)?, n)? == g(&w, n * m)?.zmul(&c), "γ_n γ_m = c γ_{nm}", wit)?;
        stats.checked += 1;
    }

    let z = Ring::integers(vec![Variable::polynomial("x")]);
    let x = LaurentPolynomial::var(&z, 0);
    let custom = FrobeniusLiftSpec::new(p, &z, vec![&x.pow(p as u64) + &x.pow(2).scale(&BigInt::from(p))])?;
    let modulus = pow_big(p, r as u32);
    for k in 0..lifts {
        let phi = if k % 2 == 0 { FrobeniusLiftSpec::standard(p, &z) } else { custom.clone() };
        let a = random_poly(&mut rng, &z, 3, 5);
        let n = rng.gen_range(1..=p + 1);
        let wit = || format!("p={p}, r={r}, a={a}, n={n}, lift {}", if k % 2 == 0 { "standard" } else { "custom" });
        // (pa)^{[n]} = (p^n/n!) a^n
        let c = p_local_residue(&pow_big(p, n), &factorial(n), &modulus)?;
        let bracket = a.pow(n as u64).scale(&c);
        let pa = a.scale(&BigInt::from(p));
        ensure(delta_lift(&bracket, &phi, r)? == delta_lift(&pa, &phi, r)?.pd_gamma(n, None)?, "delta_lift preserves divided powers", wit)?;
        let phi_a = frobenius_substitute(&a, &phi)?;
        ensure(delta_lift(&phi_a, &phi, r)? == delta_lift(&a, &phi, r)?.frobenius()?, "delta_lift ∘ φ = F ∘ delta_lift", wit)?;
        stats.checked += 1;
    }
    Ok(stats)
}

fn random_form(rng: &mut StdRng, ring: &Arc<Ring>) -> DifferentialForm {
    let n = ring.nvars();
    let mut f = DifferentialForm::zero(ring);
    for _ in 0..rng.gen_range(1..=3) {
        let k = rng.gen_range(0..=n);
        let sets = IndexSet::subsets(n, k);
        let dx = sets[rng.gen_range(0..sets.len())];
        let e: Vec<i64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let c = rng.gen_range(-4i64..=4);
        f.add_term(dx, Monomial(e), BigInt::from(if c == 0 { 1 } else { c }));
    }
    f
}

/// `dF = pFd` and `p^n F = φ*` in degree `n` on `count` random forms in one
/// and two variables, alternating the standard lift with a custom one.
pub fn dieudonne_suite(p: u32, count: usize, seed: u64) -> Result<CheckStats> {
    let mut rng = StdRng::seed_from_u64(seed);
    let pb = BigInt::from(p);
    let mut stats = CheckStats::default();
    let rings = [
        Ring::integers(vec![Variable::polynomial("x")]),
        Ring::integers(vec![Variable::polynomial("x"), Variable::polynomial("y")]),
    ];
    let lifts: Vec<(Arc<Ring>, FrobeniusLiftSpec, &str)> = rings
        .iter()
        .flat_map(|ring| {
            let vars: Vec<LaurentPolynomial> = (0..ring.nvars()).map(|i| LaurentPolynomial::var(ring, i)).collect();
            // x ↦ x^p + p x^2, y ↦ y^p + p x y
            let images: Vec<LaurentPolynomial> = vars
                .iter()
                .enumerate()
                .map(|(i, v)| &v.pow(p as u64) + &(&vars[0] * &vars[i.min(1)]).scale(&pb))
                .collect();
            let custom = FrobeniusLiftSpec::new(p, ring, images).expect("congruent to Frobenius");
            [(ring.clone(), FrobeniusLiftSpec::standard(p, ring), "standard"), (ring.clone(), custom, "custom")]
        })
        .collect();
    for k in 0..count {
        let (ring, phi, name) = &lifts[k % lifts.len()];
        let f = random_form(&mut rng, ring);
        let wit = || format!("p={p}, {name} lift, ω = {f}");
        let ff = f.divided_frobenius(phi)?;
        ensure(ff.d() == f.d().divided_frobenius(phi)?.scale(&pb), "dF = pFd", wit)?;
        for n in 0..=ring.nvars() {
            let part = f.component(n);
            let lhs = part.divided_frobenius(phi)?.scale(&pow_big(p, n as u32));
            ensure(lhs == part.undivided_frobenius(phi)?, "p^n F = φ* in degree n", wit)?;
        }
        stats.checked += 1;
    }
    Ok(stats)
}

/// `∇F = pF∇` on every basis element of every window block of a crystal's
/// coefficient complex, computed on forms.
pub fn crystal_identities(crystal: &Crystal, window: Window) -> Result<CheckStats> {
    let cx = CoefficientComplex::new(crystal, window, None, false)?;
    let ring = crystal.ring();
    let p = BigInt::from(crystal.p());
    let mut stats = CheckStats::default();
    for (i, w) in cx.blocks() {
        for b in cx.basis(i, &w) {
            let mut parts = vec![DifferentialForm::zero(ring); crystal.rank()];
            parts[b.j] = DifferentialForm::term(ring, b.dx, b.mono.clone(), BigInt::one());
            let lhs = cx.nabla(&cx.divided_frobenius(&parts)?)?;
            let rhs: Vec<DifferentialForm> = cx.divided_frobenius(&cx.nabla(&parts)?)?.iter().map(|f| f.scale(&p)).collect();
            ensure(lhs == rhs, "∇F = pF∇", || format!("basis element e_{} ⊗ {} in degree {i}", b.j, parts[b.j]))?;
            let nn = cx.nabla(&cx.nabla(&parts)?)?;
            ensure(nn.iter().all(DifferentialForm::is_zero), "∇² = 0", || format!("basis element e_{} ⊗ {}", b.j, parts[b.j]))?;
            stats.checked += 1;
        }
    }
    Ok(stats)
}
