use std::sync::Arc;

use num_bigint::BigInt;

use super::UnitRootCrystalData;
use crate::derham::DifferentialForm;
use crate::error::{Error, Result};
use crate::exactalg::{FrobeniusLiftSpec, LaurentPolynomial, Monomial, Ring, Variable};

pub const BUILTINS: [&str; 6] = ["fp", "a1-trivial", "gm-trivial", "gm-kummer:c=<int>", "a1-rank2-sum", "gm-kummer-sum"];

/// Named example crystals with the standard Frobenius lift.
///
/// `a1-rank2-sum` is the trivial crystal plus the rank-one crystal with
/// `Θ = 0`, `Φ = 1 + p` on `A¹`; `gm-kummer-sum` is `Kummer(1) ⊕ Kummer(2)`.
pub fn builtin(name: &str, p: u32) -> Result<UnitRootCrystalData> {
    let std = |vars: Vec<Variable>| FrobeniusLiftSpec::standard(p, &Ring::integers(vars));
    match name {
        "fp" => Ok(UnitRootCrystalData::trivial(&std(vec![]), 1)),
        "a1-trivial" => Ok(UnitRootCrystalData::trivial(&std(vec![Variable::polynomial("x")]), 1)),
        "gm-trivial" => Ok(UnitRootCrystalData::trivial(&std(vec![Variable::laurent("x")]), 1)),
        "a1-rank2-sum" => {
            let phi = std(vec![Variable::polynomial("x")]);
            let mut twist = UnitRootCrystalData::trivial(&phi, 1);
            twist.frobenius[0][0] = LaurentPolynomial::constant(phi.ring(), BigInt::from(1 + p));
            UnitRootCrystalData::trivial(&phi, 1).direct_sum(&twist)
        }
        "gm-kummer-sum" => UnitRootCrystalData::kummer(p, 1).direct_sum(&UnitRootCrystalData::kummer(p, 2)),
        _ => {
            let c = name
                .strip_prefix("gm-kummer:c=")
                .ok_or_else(|| Error::InvalidJob(format!("unknown builtin `{name}` (known: {})", BUILTINS.join(", "))))?;
            let c: i64 = c.parse().map_err(|_| Error::InvalidJob(format!("bad Kummer parameter `{c}`")))?;
            Ok(UnitRootCrystalData::kummer(p, c))
        }
    }
}

/// Moves crystal data to `ring`, sending each monomial through `embed`.
fn rebase(data: &UnitRootCrystalData, ring: &Arc<Ring>, images: Vec<LaurentPolynomial>, embed: impl Fn(&Monomial) -> Monomial) -> Result<UnitRootCrystalData> {
    let poly = |f: &LaurentPolynomial| {
        let mut g = LaurentPolynomial::zero(ring);
        for (m, c) in f.terms() {
            g.add_term(embed(m), c.clone());
        }
        g
    };
    let form = |w: &DifferentialForm| {
        let mut g = DifferentialForm::zero(ring);
        for (dx, m, c) in w.terms() {
            g.add_term(dx, embed(m), c.clone());
        }
        g
    };
    let phi = FrobeniusLiftSpec::new(data.p(), ring, images)?;
    let pad = |w: &Vec<i64>| embed(&Monomial(w.clone())).0;
    Ok(UnitRootCrystalData {
        phi,
        connection: data.connection.iter().map(|row| row.iter().map(form).collect()).collect(),
        frobenius: data.frobenius.iter().map(|row| row.iter().map(poly).collect()).collect(),
        weights: data.weights.as_ref().map(|ws| ws.iter().map(pad).collect()),
    })
}

/// The same data over the localization at the polynomial variable `var`.
pub fn localize(data: &UnitRootCrystalData, var: usize) -> Result<UnitRootCrystalData> {
    let old = data.ring();
    if old.vars().get(var).is_none_or(|v| v.laurent) {
        return Err(Error::InvalidJob(format!("variable {var} is not a polynomial variable")));
    }
    let mut vars = old.vars().to_vec();
    vars[var].laurent = true;
    let ring = Ring::integers(vars);
    let id = |m: &Monomial| m.clone();
    let images = data.phi.images().iter().map(|f| {
        let mut g = LaurentPolynomial::zero(&ring);
        for (m, c) in f.terms() {
            g.add_term(m.clone(), c.clone());
        }
        g
    });
    rebase(data, &ring, images.collect(), id)
}

/// Pulls the data back along the projection `X × A¹ → X`, adding a
/// polynomial variable `name` with lift `name ↦ name^p`.
pub fn times_affine_line(data: &UnitRootCrystalData, name: &str) -> Result<UnitRootCrystalData> {
    let old = data.ring();
    if old.var_index(name).is_some() {
        return Err(Error::InvalidJob(format!("variable {name} already exists")));
    }
    let mut vars = old.vars().to_vec();
    vars.push(Variable::polynomial(name));
    let ring = Ring::integers(vars);
    let embed = |m: &Monomial| Monomial(m.0.iter().copied().chain([0]).collect());
    let mut images: Vec<LaurentPolynomial> = data
        .phi
        .images()
        .iter()
        .map(|f| {
            let mut g = LaurentPolynomial::zero(&ring);
            for (m, c) in f.terms() {
                g.add_term(embed(m), c.clone());
            }
            g
        })
        .collect();
    images.push(LaurentPolynomial::var(&ring, old.nvars()).pow(data.p() as u64));
    rebase(data, &ring, images, embed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for p in [2, 3] {
            for name in ["fp", "a1-trivial", "gm-trivial", "gm-kummer:c=-2", "a1-rank2-sum", "gm-kummer-sum"] {
                let c = builtin(name, p).unwrap().validate().unwrap();
                assert!(c.rank() >= 1, "{name}");
            }
        }
        assert!(builtin("gm-kummer:c=x", 2).is_err());
        assert!(builtin("nope", 2).is_err());
    }

    #[test]
    fn localization_and_products() {
        let a1 = builtin("a1-trivial", 3).unwrap();
        let gm = localize(&a1, 0).unwrap().validate().unwrap();
        assert!(gm.ring().vars()[0].laurent);
        let k = times_affine_line(&builtin("gm-kummer:c=1", 3).unwrap(), "s").unwrap();
        assert_eq!(k.ring().nvars(), 2);
        let kl = localize(&k, 1).unwrap().validate().unwrap();
        assert_eq!(kl.shifts().unwrap(), &[vec![1, 0]]);
        assert!(localize(&k, 0).is_err());
    }
}
