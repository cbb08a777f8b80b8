use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use super::checks::CheckReport;
use super::DrwTower;
use crate::dieudonne::cohomology::relations;
use crate::dieudonne::cohomology::Homology;
use crate::dieudonne::{Op, Slot, Tower, TrueWeight};
use crate::error::Result;
use crate::exactalg::IntegerMatrix;

/// `H^i` of one block of one level.
#[derive(Clone, Debug, Serialize)]
pub struct CohomologyEntry {
    pub r: u32,
    pub degree: usize,
    pub weight: TrueWeight,
    pub divisors: Vec<String>,
}

fn number(b: &BigInt) -> Value {
    match b.to_u64() {
        Some(v) => json!(v),
        None => json!(b.to_string()),
    }
}

fn total(u: &TrueWeight, p: u32) -> String {
    let (num, exp) = u.total(p);
    if exp == 0 {
        num.to_string()
    } else {
        format!("{num}/{}", (p as u64).pow(exp))
    }
}

const OPS: [(Op, &str); 5] = [(Op::D, "d"), (Op::F, "F"), (Op::V, "V"), (Op::R, "R"), (Op::Alpha, "alpha_F")];

fn clipped(t: &Tower, r: u32, i: usize, u: &TrueWeight) -> Vec<&'static str> {
    OPS.iter()
        .filter(|(op, _)| {
            let (tr, ti, tu) = op.target(r, i, u, t.p());
            matches!(t.slot(tr, ti, &tu), Slot::Outside)
        })
        .map(|&(_, name)| name)
        .collect()
}

/// Cohomology of every block of level `r`; blocks whose differentials leave
/// the computed weights are omitted.
pub fn cohomology_table(t: &DrwTower, r: u32) -> Result<Vec<CohomologyEntry>> {
    let tower = t.tower();
    let mut out = Vec::new();
    for u in tower.weights() {
        for i in 0..=tower.max_degree() {
            let here = tower.slot(r, i, u).divisors().to_vec();
            let d_in = if i == 0 { Some(IntegerMatrix::zeros(here.len(), 0)) } else { tower.matrix(Op::D, r, i - 1, u)? };
            let (Some(d_in), Some(d_out)) = (d_in, tower.matrix(Op::D, r, i, u)?) else {
                continue;
            };
            let next = tower.slot(r, i + 1, u).divisors().to_vec();
            let h = Homology::at(&d_in, &d_out, &relations(&here), &relations(&next))?;
            out.push(CohomologyEntry {
                r,
                degree: i,
                weight: u.clone(),
                divisors: h.divisors().nontrivial().iter().map(|d| d.to_string()).collect(),
            });
        }
    }
    Ok(out)
}

/// The versioned JSON export. Fields are emitted in a fixed order.
pub fn to_json(t: &DrwTower, cohomology: Option<&[CohomologyEntry]>, checks: &[CheckReport]) -> Value {
    let p = t.p();
    let tower = t.tower();
    let ring = t.crystal().ring();
    let levels: Vec<Value> = tower
        .levels()
        .iter()
        .map(|level| {
            let blocks: Vec<Value> = level
                .blocks
                .iter()
                .map(|b| {
                    json!({
                        "degree": b.degree,
                        "weight": { "num": b.weight.num, "exp": b.weight.exp },
                        "total": total(&b.weight, p),
                        "divisors": b.divisors().iter().map(number).collect::<Vec<_>>(),
                        "stable_from": b.stable_from,
                        "clipped_ops": clipped(tower, level.r, b.degree, &b.weight),
                    })
                })
                .collect();
            json!({ "r": level.r, "blocks": blocks })
        })
        .collect();
    let mut out = json!({
        "schema": "drw/1",
        "p": p,
        "r_max": t.params().r_max,
        "window": { "min": t.params().window.min, "max": t.params().window.max },
        "variables": ring.vars().iter().map(|v| json!({ "name": v.name, "laurent": v.laurent })).collect::<Vec<_>>(),
        "crystal_rank": t.crystal().rank(),
        "stage": t.stage(),
        "levels": levels,
    });
    if let Some(h) = cohomology {
        out["cohomology"] = json!(h
            .iter()
            .map(|e| json!({
                "r": e.r,
                "degree": e.degree,
                "weight": { "num": e.weight.num, "exp": e.weight.exp },
                "total": total(&e.weight, p),
                "divisors": e.divisors,
            }))
            .collect::<Vec<_>>());
    }
    if !checks.is_empty() {
        out["checks"] = json!(checks);
    }
    out
}

/// Flat rank table: one row per block of every level.
pub fn to_csv(t: &DrwTower) -> String {
    let p = t.p();
    let mut s = String::from("r,degree,weight,total_weight,divisors,stable_from\n");
    for level in t.tower().levels() {
        for b in &level.blocks {
            let divs: Vec<String> = b.divisors().iter().map(|d| d.to_string()).collect();
            s.push_str(&format!(
                "{},{},\"{}\",{},{},{}\n",
                level.r,
                b.degree,
                b.weight.format(p),
                total(&b.weight, p),
                divs.join(" "),
                b.stable_from
            ));
        }
    }
    s
}
