use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{DrwTower, Fault};
use crate::derham::DifferentialForm;
use crate::dieudonne::cohomology::{cohomology_mod, first_difference, is_surjective, relations, Homology};
use crate::dieudonne::{Op, Slot, Tower, TrueWeight};
use crate::error::{Error, Result};
use crate::exactalg::{pow_big, IntegerMatrix, LaurentPolynomial, Monomial};
use crate::witt::{delta_lift, WittVector};

/// Counts of compared blocks and of blocks skipped because an operator left
/// the computed weights.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckStats {
    pub checked: usize,
    pub skipped: usize,
}

impl CheckStats {
    fn tick(&mut self, ran: bool) {
        if ran {
            self.checked += 1;
        } else {
            self.skipped += 1;
        }
    }

    fn merge(&mut self, other: CheckStats) {
        self.checked += other.checked;
        self.skipped += other.skipped;
    }
}

/// Outcome of one named check, as exported.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip)]
    pub error: Option<Error>,
}

impl CheckReport {
    pub fn from_result(name: &str, res: Result<CheckStats>) -> Self {
        match res {
            Ok(s) => CheckReport { name: name.into(), passed: true, checked: s.checked, skipped: s.skipped, witness: None, error: None },
            Err(e) => CheckReport {
                name: name.into(),
                passed: false,
                checked: 0,
                skipped: 0,
                witness: Some(e.to_string()),
                error: Some(e),
            },
        }
    }
}

fn mismatch(check: &str, witness: String) -> Error {
    Error::Mismatch { check: check.into(), witness }
}

fn zeros(rows: usize, cols: usize) -> IntegerMatrix {
    IntegerMatrix::zeros(rows, cols)
}

/// Integer weights of the window, i.e. the blocks of the coefficient complex.
fn integer_weights(t: &Tower) -> impl Iterator<Item = &TrueWeight> {
    t.weights().iter().filter(|u| u.is_integral())
}

/// `H^i` of level `r` at `(i, u)`; `None` when a differential leaves the computed weights.
fn tower_homology(t: &Tower, r: u32, i: usize, u: &TrueWeight) -> Result<Option<Homology>> {
    let here = t.slot(r, i, u).divisors().to_vec();
    let d_in = if i == 0 {
        Some(zeros(here.len(), 0))
    } else {
        t.matrix(Op::D, r, i - 1, u)?
    };
    let (Some(d_in), Some(d_out)) = (d_in, t.matrix(Op::D, r, i, u)?) else {
        return Ok(None);
    };
    let next = t.slot(r, i + 1, u).divisors().to_vec();
    Homology::at(&d_in, &d_out, &relations(&here), &relations(&next)).map(Some)
}

/// λ_r induces isomorphisms `H^i(coefficient complex / p^r)_u → H^i(level r)_u`
/// for integer `u`, and fractional-weight blocks of level `r` are acyclic.
pub fn rho_check(t: &DrwTower, r: u32) -> Result<CheckStats> {
    let tower = t.tower();
    let p = t.p();
    let modulus = pow_big(p, r);
    let cx = t.complex();
    let mut stats = CheckStats::default();
    for u in tower.weights() {
        for i in 0..=tower.max_degree() {
            let Some(h) = tower_homology(tower, r, i, u)? else {
                stats.tick(false);
                continue;
            };
            if !u.is_integral() {
                if !h.divisors().is_trivial() {
                    return Err(Error::QuasiIsoFailure {
                        degree: i,
                        weight: u.format(p),
                        detail: format!("fractional weight carries cohomology {}", h.divisors()),
                    });
                }
                stats.tick(true);
                continue;
            }
            let w = &u.num;
            let n = cx.rank(i, w);
            let d_in = if i == 0 { zeros(n, 0) } else { cx.differential(i - 1, w) };
            let src = cohomology_mod(&d_in, &cx.differential(i, w), n, &modulus)?;
            let lam = t.lambda_matrix(r, i, w)?;
            src.induced_iso(&h, &lam).map_err(|detail| Error::QuasiIsoFailure { degree: i, weight: u.format(p), detail })?;
            stats.tick(true);
        }
    }
    Ok(stats)
}

/// The structure-map invariants: `Rλ_r = λ_{r-1}`, `Fλ_r = λ_{r-1}F` and
/// `dλ_r = λ_r∇`, blockwise on every integer weight.
pub fn lambda_check(t: &DrwTower, r: u32) -> Result<CheckStats> {
    let tower = t.tower();
    let p = t.p();
    let cx = t.complex();
    let window = t.params().window;
    let mut stats = CheckStats::default();
    for u in integer_weights(tower) {
        let w = &u.num;
        for i in 0..=tower.max_degree() {
            let lam = t.lambda_matrix(r, i, w)?;
            let at = |what: &str| format!("{what} at level {r}, degree {i}, weight {}", u.format(p));

            let Some(d) = tower.matrix(Op::D, r, i, u)? else {
                stats.tick(false);
                continue;
            };
            let lhs = d.mul(&lam);
            let rhs = t.lambda_matrix(r, i + 1, w)?.mul(&cx.differential(i, w));
            if let Some(j) = first_difference(&lhs, &rhs, tower.slot(r, i + 1, u).divisors()) {
                return Err(mismatch("d λ = λ ∇", at(&format!("basis vector {j}"))));
            }
            stats.tick(true);

            if r >= 2 {
                let rm = tower.matrix(Op::R, r, i, u)?.expect("R preserves weights");
                let lower = t.lambda_matrix(r - 1, i, w)?;
                if let Some(j) = first_difference(&rm.mul(&lam), &lower, tower.slot(r - 1, i, u).divisors()) {
                    return Err(mismatch("R λ_r = λ_{r-1}", at(&format!("basis vector {j}"))));
                }
                stats.tick(true);

                let pw: Vec<i64> = w.iter().map(|c| c * p as i64).collect();
                if !window.contains(&pw) {
                    stats.tick(false);
                    continue;
                }
                let Some(fm) = tower.matrix(Op::F, r, i, u)? else {
                    stats.tick(false);
                    continue;
                };
                let rhs = t.lambda_matrix(r - 1, i, &pw)?.mul(&cx.frobenius(i, w)?);
                if let Some(j) = first_difference(&fm.mul(&lam), &rhs, tower.slot(r - 1, i, &u.times_p(p)).divisors()) {
                    return Err(mismatch("F λ_r = λ_{r-1} F", at(&format!("basis vector {j}"))));
                }
                stats.tick(true);
            }
        }
    }
    Ok(stats)
}

/// `α_F = p^i F` is a chain endomorphism of level `r` and intertwines `λ_r`
/// with the undivided Frobenius `φ_E ⊗ φ*` of the coefficient complex, both
/// at level `r` and after reduction to level `r-1`.
pub fn alpha_f_check(t: &DrwTower, r: u32) -> Result<CheckStats> {
    let tower = t.tower();
    let p = t.p();
    let cx = t.complex();
    let window = t.params().window;
    let mut stats = CheckStats::default();
    for u in tower.weights() {
        for i in 0..=tower.max_degree() {
            let at = || format!("level {r}, degree {i}, weight {}", u.format(p));
            let pu = u.times_p(p);
            // d α = α d
            let da = match (tower.matrix(Op::Alpha, r, i, u)?, tower.matrix(Op::D, r, i, &pu)?) {
                (Some(a), Some(d)) => Some(d.mul(&a)),
                _ => None,
            };
            let ad = match (tower.matrix(Op::D, r, i, u)?, tower.matrix(Op::Alpha, r, i + 1, u)?) {
                (Some(d), Some(a)) => Some(a.mul(&d)),
                _ => None,
            };
            match (da, ad) {
                (Some(a), Some(b)) => {
                    if let Some(j) = first_difference(&a, &b, tower.slot(r, i + 1, &pu).divisors()) {
                        return Err(mismatch("d α_F = α_F d", format!("generator {j} at {}", at())));
                    }
                    stats.tick(true);
                }
                _ => stats.tick(false),
            }

            if !u.is_integral() {
                continue;
            }
            let w = &u.num;
            let pw = &pu.num;
            if !window.contains(pw) {
                stats.tick(false);
                continue;
            }
            let Some(am) = tower.matrix(Op::Alpha, r, i, u)? else {
                stats.tick(false);
                continue;
            };
            let frob = cx.frobenius(i, w)?;
            let coeff = if t.fault() == Some(Fault::FlipFrobenius) { frob } else { frob.scale(&pow_big(p, i as u32)) };
            let lhs = am.mul(&t.lambda_matrix(r, i, w)?);
            let rhs = t.lambda_matrix(r, i, pw)?.mul(&coeff);
            if let Some(j) = first_difference(&lhs, &rhs, tower.slot(r, i, &pu).divisors()) {
                return Err(mismatch("α_F λ_r = λ_r (φ_E ⊗ φ*)", format!("basis vector {j} at {}", at())));
            }
            stats.tick(true);
            if r >= 2 {
                let rm = tower.matrix(Op::R, r, i, &pu)?.expect("R preserves weights");
                let lower = t.lambda_matrix(r - 1, i, pw)?.mul(&coeff);
                if let Some(j) = first_difference(&rm.mul(&lhs), &lower, tower.slot(r - 1, i, &pu).divisors()) {
                    return Err(mismatch("α_F λ_r = λ_{r-1} (φ_E ⊗ φ*)", format!("basis vector {j} at {}", at())));
                }
                stats.tick(true);
            }
        }
    }
    Ok(stats)
}

/// Module axioms of the action of the trivial-coefficient tower, on pairs of
/// Smith generators: unit, Leibniz, `F(a m) = F(a) F(m)`, `R(a m) = R(a) R(m)`.
/// At most `limit` pairs are tried per level, in a fixed order.
pub fn module_check(t: &DrwTower, r: u32, limit: usize) -> Result<CheckStats> {
    let p = t.p();
    let scal = t.trivial_tower();
    let tower = t.tower();
    let n = t.complex().nvars();
    let mut stats = CheckStats::default();
    let level = tower.level(r).ok_or_else(|| Error::InvalidJob(format!("level {r} was not built")))?;
    let slevel = scal.level(r).expect("same levels");

    // unit: λ(1)·m = m
    let zero = vec![0i64; n];
    let one = DifferentialForm::constant(t.scalars().crystal().ring(), BigInt::one());
    let unit = t.scalar_lambda(r, 0, &zero, &one)?;
    let u0 = TrueWeight::integral(&zero);
    for b in &level.blocks {
        for g in basis(b.divisors().len()) {
            let Some(am) = t.module_action(r, (0, &u0, &unit), (b.degree, &b.weight, &g))? else {
                stats.tick(false);
                continue;
            };
            if !same(&am, &g, b.divisors()) {
                return Err(mismatch("1·m = m", format!("level {r}, degree {}, weight {}", b.degree, b.weight.format(p))));
            }
            stats.tick(true);
        }
    }

    let mut pairs = 0;
    'outer: for a in slevel.blocks.iter().filter(|b| !b.is_zero()) {
        for m in level.blocks.iter().filter(|b| !b.is_zero()) {
            if pairs >= limit {
                break 'outer;
            }
            let sum = a.weight.add(&m.weight, p);
            if !matches!(tower.slot(r, a.degree + m.degree, &sum), Slot::Block(_)) {
                continue;
            }
            pairs += 1;
            for ga in basis(a.divisors().len()) {
                for gm in basis(m.divisors().len()) {
                    let ok = module_pair(t, r, (a.degree, &a.weight, &ga), (m.degree, &m.weight, &gm))?;
                    stats.merge(ok);
                }
            }
        }
    }
    Ok(stats)
}

fn module_pair(t: &DrwTower, r: u32, a: (usize, &TrueWeight, &[BigInt]), m: (usize, &TrueWeight, &[BigInt])) -> Result<CheckStats> {
    let p = t.p();
    let scal = t.trivial_tower();
    let tower = t.tower();
    let mut stats = CheckStats::default();
    let (ia, ua, ca) = a;
    let (im, um, cm) = m;
    let u = ua.add(um, p);
    let at = || format!("level {r}, degrees ({ia}, {im}), weights ({}, {})", ua.format(p), um.format(p));
    let Some(prod) = t.module_action(r, a, m)? else {
        stats.tick(false);
        return Ok(stats);
    };

    // Leibniz
    let lhs = tower.apply(Op::D, r, ia + im, &u, &prod)?;
    let da = scal.apply(Op::D, r, ia, ua, ca)?;
    let dm = tower.apply(Op::D, r, im, um, cm)?;
    match (lhs, da, dm) {
        (Some(lhs), Some(da), Some(dm)) => {
            let t1 = t.module_action(r, (ia + 1, ua, &da), m)?;
            let t2 = t.module_action(r, a, (im + 1, um, &dm))?;
            match (t1, t2) {
                (Some(t1), Some(t2)) => {
                    let divs = tower.slot(r, ia + im + 1, &u).divisors().to_vec();
                    let sign = if ia % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                    let rhs: Vec<BigInt> = pad(&t1, divs.len()).iter().zip(pad(&t2, divs.len())).map(|(x, y)| x + &sign * y).collect();
                    if !same(&pad(&lhs, divs.len()), &rhs, &divs) {
                        return Err(mismatch("d(am) = da·m ± a·dm", at()));
                    }
                    stats.tick(true);
                }
                _ => stats.tick(false),
            }
        }
        _ => stats.tick(false),
    }

    if r >= 2 {
        for op in [Op::F, Op::R] {
            let lhs = tower.apply(op, r, ia + im, &u, &prod)?;
            let oa = scal.apply(op, r, ia, ua, ca)?;
            let om = tower.apply(op, r, im, um, cm)?;
            let (Some(lhs), Some(oa), Some(om)) = (lhs, oa, om) else {
                stats.tick(false);
                continue;
            };
            let (_, _, ta) = op.target(r, ia, ua, p);
            let (_, _, tm) = op.target(r, im, um, p);
            let Some(rhs) = t.module_action(r - 1, (ia, &ta, &oa), (im, &tm, &om))? else {
                stats.tick(false);
                continue;
            };
            let (tr, ti, tu) = op.target(r, ia + im, &u, p);
            let divs = tower.slot(tr, ti, &tu).divisors().to_vec();
            if !same(&pad(&lhs, divs.len()), &pad(&rhs, divs.len()), &divs) {
                return Err(mismatch(if op == Op::F { "F(am) = F(a)F(m)" } else { "R(am) = R(a)R(m)" }, at()));
            }
            stats.tick(true);
        }
    }
    Ok(stats)
}

fn basis(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|j| {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            e
        })
        .collect()
}

fn pad(v: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut v = v.to_vec();
    v.resize(n, BigInt::zero());
    v
}

fn same(a: &[BigInt], b: &[BigInt], divisors: &[BigInt]) -> bool {
    a.iter().zip(b).zip(divisors).all(|((x, y), d)| ((x - y) % d).is_zero())
}

/// Compares the tower over a base with the tower over its localization at the
/// variable `var`: blocks with positive `var`-weight agree, and multiplication
/// by `λ_r(x_var)` is an isomorphism between neighbouring Laurent blocks.
pub fn localization_check(base: &DrwTower, laurent: &DrwTower, var: usize, r: u32) -> Result<CheckStats> {
    let p = base.p();
    let bt = base.tower();
    let lt = laurent.tower();
    let mut stats = CheckStats::default();
    for u in lt.weights() {
        for i in 0..=lt.max_degree() {
            let here = lt.slot(r, i, u);
            if u.num[var] > 0 {
                match bt.slot(r, i, u) {
                    Slot::Outside => stats.tick(false),
                    b => {
                        if b.divisors() != here.divisors() {
                            return Err(Error::BaseChangeMismatch {
                                degree: i,
                                weight: u.format(p),
                                detail: format!("base {:?} vs localized {:?}", fmt_divs(b.divisors()), fmt_divs(here.divisors())),
                            });
                        }
                        stats.tick(true);
                    }
                }
            }
        }
    }

    // multiplication by x: block u → u + e_var
    let n = laurent.complex().nvars();
    let mut e = vec![0i64; n];
    e[var] = 1;
    let x = DifferentialForm::function(&LaurentPolynomial::var(laurent.scalars().crystal().ring(), var));
    let lx = laurent.scalar_lambda(r, 0, &e, &x)?;
    let ue = TrueWeight::integral(&e);
    let level = lt.level(r).expect("level built");
    for b in &level.blocks {
        let target = b.weight.add(&ue, p);
        let Slot::Block(tb) = lt.slot(r, b.degree, &target) else {
            stats.tick(false);
            continue;
        };
        let cols = basis(b.divisors().len())
            .iter()
            .map(|g| laurent.module_action(r, (0, &ue, &lx), (b.degree, &b.weight, g)))
            .collect::<Result<Option<Vec<_>>>>()?;
        let Some(cols) = cols else {
            stats.tick(false);
            continue;
        };
        let m = IntegerMatrix::from_columns(tb.divisors().len(), &cols.iter().map(|c| pad(c, tb.divisors().len())).collect::<Vec<_>>());
        if b.order() != tb.order() || !is_surjective(&m, tb.divisors()) {
            return Err(Error::BaseChangeMismatch {
                degree: b.degree,
                weight: b.weight.format(p),
                detail: format!("multiplication by the unit is not an isomorphism onto weight {}", target.format(p)),
            });
        }
        stats.tick(true);
    }
    Ok(stats)
}

fn fmt_divs(d: &[BigInt]) -> Vec<String> {
    d.iter().map(|x| x.to_string()).collect()
}

/// Degree-0 blocks of a trivial-coefficient tower against Witt vectors of the
/// base: the weight-`u` part of `W_r(R)` is cyclic, generated by
/// `V^k[x^m]` for `u = m/p^k`, of order `p^{r-k}`. At integer weights the
/// generator `[x^u] = delta_lift(x^u)` must map to a generator of the block.
pub fn witt_ground_truth(t: &DrwTower, r: u32) -> Result<CheckStats> {
    if !t.crystal().is_trivial() || t.crystal().rank() != 1 {
        return Err(Error::InvalidJob("the Witt-vector comparison needs the trivial rank-one crystal".into()));
    }
    let p = t.p();
    let tower = t.tower();
    let phi = t.crystal().phi();
    let ring = phi.ring();
    let fp = ring.with_modulus(Some(BigInt::from(p)));
    let mut stats = CheckStats::default();
    for u in tower.weights() {
        let k = u.exp;
        let negative = u.num.iter().zip(ring.vars()).any(|(&a, v)| a < 0 && !v.laurent);
        if k >= r || negative {
            // V^k vanishes on W_r, and negative powers of a polynomial variable
            // do not occur; the block must be zero.
            if !tower.slot(r, 0, u).is_empty() {
                return Err(mismatch("W_r(R) in degree 0", format!("weight {} should vanish at level {r}", u.format(p))));
            }
            stats.tick(true);
            continue;
        }
        let mono = LaurentPolynomial::monomial(&fp, Monomial(u.num.clone()), BigInt::one());
        let mut g = WittVector::teichmuller(p, r as usize, &mono);
        for _ in 0..k {
            g = g.verschiebung_truncated();
        }
        let order = witt_order(&g)?;
        let expect = pow_big(p, r - k);
        let divs = tower.slot(r, 0, u).divisors().to_vec();
        if order != expect || divs != [expect.clone()] {
            return Err(mismatch(
                "W_r(R) in degree 0",
                format!("weight {}: Witt order {order}, tower divisors {:?}", u.format(p), fmt_divs(&divs)),
            ));
        }
        if k == 0 {
            let lift = LaurentPolynomial::monomial(ring, Monomial(u.num.clone()), BigInt::one());
            let h = delta_lift(&lift, phi, r as usize)?;
            if h.coords().iter().zip(g.coords()).any(|(a, b)| a.in_ring(&fp) != *b) {
                return Err(mismatch("delta_lift(x^u) = [x^u]", u.format(p)));
            }
            let one = DifferentialForm::function(&lift);
            let c = t.scalar_lambda(r, 0, &u.num, &one)?;
            if !is_surjective(&IntegerMatrix::from_columns(1, &[c]), &divs) {
                return Err(mismatch("λ_r(x^u) generates", format!("weight {} at level {r}", u.format(p))));
            }
        }
        stats.tick(true);
    }
    Ok(stats)
}

/// Additive order of a Witt vector, by repeated multiplication by `p`.
fn witt_order(w: &WittVector) -> Result<BigInt> {
    let p = BigInt::from(w.p());
    let mut order = BigInt::one();
    let mut cur = w.clone();
    for _ in 0..=w.len() {
        if cur.is_zero() {
            return Ok(order);
        }
        cur = cur.zmul(&p);
        order *= &p;
    }
    Err(mismatch("Witt order", format!("{w} is not killed by p^{}", w.len())))
}

/// All drw-level checks for one level, keyed by name.
pub fn run_level_checks(t: &DrwTower, r: u32) -> BTreeMap<String, CheckReport> {
    let mut out = BTreeMap::new();
    for (name, res) in [
        ("rho", rho_check(t, r)),
        ("lambda", lambda_check(t, r)),
        ("alpha_F", alpha_f_check(t, r)),
        ("module", module_check(t, r, 64)),
    ] {
        out.insert(name.to_string(), CheckReport::from_result(name, res));
    }
    out
}
