use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use super::cohomology::{annihilated_by, is_surjective, kernel, maps_equal, relations};
use super::tower::{Op, Tower};
use super::weight::TrueWeight;
use crate::error::{Error, Result};
use crate::exactalg::{pow_big, IntegerMatrix, Lattice};

pub const AXIOMS: [&str; 8] = [
    "R surjective",
    "FV = p",
    "VF = p",
    "FdV = d",
    "RF = FR",
    "RV = VR",
    "p^r kills level r",
    "ker R = im V^r + im dV^r",
];

/// Per-axiom counts of checked blocks and of blocks skipped because some
/// operator left the computed weights.
#[derive(Clone, Debug, Default, Serialize)]
pub struct AxiomReport {
    pub checked: BTreeMap<String, usize>,
    pub skipped: BTreeMap<String, usize>,
}

impl AxiomReport {
    pub fn total_checked(&self) -> usize {
        self.checked.values().sum()
    }

    fn record(&mut self, axiom: &str, outcome: Option<bool>, block: impl FnOnce() -> String) -> Result<()> {
        match outcome {
            Some(true) => *self.checked.entry(axiom.into()).or_default() += 1,
            None => *self.skipped.entry(axiom.into()).or_default() += 1,
            Some(false) => return Err(Error::AxiomViolation { axiom: axiom.into(), block: block() }),
        }
        Ok(())
    }
}

/// Composes matrices along a chain of operators starting at `(r, i, u)`.
fn chain(t: &Tower, ops: &[Op], r: u32, i: usize, u: &TrueWeight) -> Result<Option<(IntegerMatrix, (u32, usize, TrueWeight))>> {
    let p = t.p();
    let mut here = (r, i, u.clone());
    let mut acc: Option<IntegerMatrix> = None;
    for &op in ops {
        let Some(m) = t.matrix(op, here.0, here.1, &here.2)? else {
            return Ok(None);
        };
        acc = Some(match acc {
            None => m,
            Some(a) => m.mul(&a),
        });
        here = op.target(here.0, here.1, &here.2, p);
    }
    Ok(acc.map(|a| (a, here)))
}

fn scalar(n: usize, c: &BigInt) -> IntegerMatrix {
    IntegerMatrix::scalar(n, c)
}

/// Checks the strict Dieudonné tower axioms on every block of every level.
pub fn tower_axioms_check(t: &Tower) -> Result<AxiomReport> {
    let mut rep = AxiomReport::default();
    let p = t.p();
    let pb = BigInt::from(p);
    let r_max = t.r_max();
    for level in t.levels() {
        let r = level.r;
        for b in &level.blocks {
            let (i, u) = (b.degree, &b.weight);
            let divs = b.divisors().to_vec();
            let n = divs.len();
            let name = || format!("level {r}, degree {i}, weight {}", u.format(p));

            rep.record(AXIOMS[6], Some(annihilated_by(&divs, &pow_big(p, r))), name)?;

            if r >= 2 {
                let ok = t.matrix(Op::R, r, i, u)?.map(|m| is_surjective(&m, t.slot(r - 1, i, u).divisors()));
                rep.record(AXIOMS[0], ok, name)?;

                let rf = chain(t, &[Op::F, Op::R], r, i, u)?;
                let fr = chain(t, &[Op::R, Op::F], r, i, u)?;
                let ok = match (rf, fr) {
                    (Some((a, tgt)), Some((b2, _))) => Some(maps_equal(&a, &b2, t.slot(tgt.0, tgt.1, &tgt.2).divisors())),
                    _ => None,
                };
                rep.record(AXIOMS[4], ok, name)?;
            }

            // VF = p on level r
            let ok = chain(t, &[Op::F, Op::V], r, i, u)?.map(|(m, _)| maps_equal(&m, &scalar(n, &pb), &divs));
            rep.record(AXIOMS[2], ok, name)?;

            if r < r_max {
                let ok = chain(t, &[Op::V, Op::F], r, i, u)?.map(|(m, _)| maps_equal(&m, &scalar(n, &pb), &divs));
                rep.record(AXIOMS[1], ok, name)?;

                let fdv = chain(t, &[Op::V, Op::D, Op::F], r, i, u)?;
                let d = t.matrix(Op::D, r, i, u)?;
                let ok = match (fdv, d) {
                    (Some((a, _)), Some(d)) => Some(maps_equal(&a, &d, t.slot(r, i + 1, u).divisors())),
                    _ => None,
                };
                rep.record(AXIOMS[3], ok, name)?;

                let rv = chain(t, &[Op::V, Op::R], r, i, u)?;
                let vr = chain(t, &[Op::R, Op::V], r, i, u)?;
                let ok = match (rv, vr) {
                    (Some((a, tgt)), Some((b2, _))) => Some(maps_equal(&a, &b2, t.slot(tgt.0, tgt.1, &tgt.2).divisors())),
                    _ => None,
                };
                rep.record(AXIOMS[5], ok, name)?;

                let ok = kernel_axiom(t, r + 1, i, u)?;
                rep.record(AXIOMS[7], ok, name)?;
            }
        }
    }
    Ok(rep)
}

/// `ker(R: W_{s+1} → W_s) = V^s W_1 + dV^s W_1` on block `(s+1, i, u)`.
fn kernel_axiom(t: &Tower, top: u32, i: usize, u: &TrueWeight) -> Result<Option<bool>> {
    let p = t.p();
    let s = top - 1;
    let divs = t.slot(top, i, u).divisors().to_vec();
    let n = divs.len();
    let Some(rm) = t.matrix(Op::R, top, i, u)? else {
        return Ok(None);
    };
    let ker = kernel(&rm, t.slot(s, i, u).divisors());
    let source = (0..s).fold(u.clone(), |w, _| w.times_p(p));
    let vs = vec![Op::V; s as usize];
    let Some((v_img, _)) = chain(t, &vs, 1, i, &source)? else {
        return Ok(None);
    };
    let mut img = relations(&divs);
    if v_img.cols() > 0 && n > 0 {
        img = img.sum(&Lattice::column_span(&v_img));
    }
    if i >= 1 {
        let mut ops = vs.clone();
        ops.push(Op::D);
        let Some((dv_img, _)) = chain(t, &ops, 1, i - 1, &source)? else {
            return Ok(None);
        };
        if dv_img.cols() > 0 && n > 0 {
            img = img.sum(&Lattice::column_span(&dv_img));
        }
    }
    Ok(Some(ker == img))
}
