//! De Rham complexes of (Laurent) polynomial lifts and their truncations.

mod form;
mod parse;

pub use form::{DifferentialForm, IndexSet};
pub use parse::{parse_form, parse_polynomial};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactalg::{factorial, p_local_residue, pow_big, LaurentPolynomial};

/// Outcome of [`pd_collapse_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdCollapseReport {
    pub p: u32,
    pub r: u32,
    pub checked: usize,
}

/// `(px)^{[n]} = (p^n / n!) x^n` as a function mod `p^r`.
fn bracket(x: &LaurentPolynomial, p: u32, r: u32, n: u32) -> Result<LaurentPolynomial> {
    let modulus = pow_big(p, r);
    let c = p_local_residue(&pow_big(p, n), &factorial(n), &modulus)?;
    Ok(x.pow(n as u64).scale(&c).reduce(Some(&modulus)))
}

/// Checks `d((px)^{[n]}) = (px)^{[n-1]} d(px)` in `Ω¹_{A_r}` for every sample
/// `x` and `1 ≤ n ≤ n_max`. Samples must have exact integer coefficients.
pub fn pd_collapse_check(p: u32, r: u32, samples: &[LaurentPolynomial], n_max: u32) -> Result<PdCollapseReport> {
    let modulus = pow_big(p, r);
    let mut checked = 0;
    for x in samples {
        if let Some(m) = x.ring().modulus() {
            return Err(Error::TorsionCoefficients { modulus: m.clone() });
        }
        let dpx = DifferentialForm::function(&x.scale(&BigInt::from(p))).d();
        for n in 1..=n_max {
            let lhs = DifferentialForm::function(&bracket(x, p, r, n)?).d();
            let prev = bracket(x, p, r, n - 1)?;
            let rhs = dpx.mul_function(&prev.in_ring(x.ring())).reduce(Some(&modulus));
            if lhs.reduce(Some(&modulus)) != rhs {
                return Err(Error::RelationViolated { x: x.to_string(), n });
            }
            checked += 1;
        }
    }
    Ok(PdCollapseReport { p, r, checked })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::exactalg::{FrobeniusLiftSpec, Ring, Variable};

    fn xy() -> Arc<Ring> {
        Ring::integers(vec![Variable::polynomial("x"), Variable::polynomial("y")])
    }

    #[test]
    fn exterior_derivative_examples() {
        let r = xy();
        let f = |s| parse_form(&r, s).unwrap();
        assert_eq!(f("x^2").d(), f("2*x*dx"));
        assert_eq!(f("x*dy").d(), f("dx*dy"));
        assert!(f("dx").d().is_zero());
        assert_eq!(f("dx*dy"), -&f("dy*dx"));
        assert_eq!(f("x*dx").wedge(&f("y*dy")).unwrap(), f("x*y*dx*dy"));
    }

    #[test]
    fn frobenius_examples() {
        let r = xy();
        let f = |s| parse_form(&r, s).unwrap();
        let phi2 = FrobeniusLiftSpec::standard(2, &r);
        let phi3 = FrobeniusLiftSpec::standard(3, &r);
        assert_eq!(f("dx").divided_frobenius(&phi3).unwrap(), f("x^2*dx"));
        assert_eq!(f("x").divided_frobenius(&phi3).unwrap(), f("x^3"));
        assert_eq!(f("x*dy").divided_frobenius(&phi2).unwrap(), f("x^2*y*dy"));
        assert_eq!(f("dx").undivided_frobenius(&phi3).unwrap(), f("3*x^2*dx"));
        let w = f("x*dx*dy");
        assert_eq!(w.undivided_frobenius(&phi3).unwrap(), f("9*x^5*y^2*dx*dy"));
        assert_eq!(w.undivided_frobenius(&phi3).unwrap(), w.divided_frobenius(&phi3).unwrap().scale(&BigInt::from(9)));
        let torsion = f("dx").reduce(Some(&BigInt::from(4)));
        assert!(matches!(torsion.divided_frobenius(&phi2), Err(Error::TorsionCoefficients { .. })));
    }

    #[test]
    fn custom_lift_correction_term() {
        let r = Ring::integers(vec![Variable::polynomial("x")]);
        let phi = FrobeniusLiftSpec::new(2, &r, vec![parse_polynomial(&r, "x^2 + 2*x").unwrap()]).unwrap();
        // F(dx) = x dx + d(x)
        assert_eq!(parse_form(&r, "dx").unwrap().divided_frobenius(&phi).unwrap(), parse_form(&r, "x*dx + dx").unwrap());
    }

    #[test]
    fn pd_collapse_examples() {
        let r = Ring::integers(vec![Variable::polynomial("x")]);
        let x = LaurentPolynomial::var(&r, 0);
        let report = pd_collapse_check(2, 2, &[x.clone()], 3).unwrap();
        assert_eq!(report.checked, 3);
        // 2x^2 has differential 4x dx = 0 mod 4, and so does (2x) d(2x)
        assert!(DifferentialForm::function(&bracket(&x, 2, 2, 2).unwrap()).d().is_zero());
        pd_collapse_check(3, 2, &[x.pow(2)], 4).unwrap();
        let lhs = DifferentialForm::function(&bracket(&x.pow(2), 3, 2, 3).unwrap()).d();
        assert!(lhs.is_zero());
    }
}
