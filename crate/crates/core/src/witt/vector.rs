use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::laws::{ghost_polys, universal_laws};
use crate::error::{Error, Result};
use crate::exactalg::{factorial, frobenius_substitute, is_prime, p_local_residue, pow_big, FrobeniusLiftSpec, LaurentPolynomial, Ring};

/// A p-typical Witt vector of length `r` over a (Laurent) polynomial ring.
#[derive(Clone, PartialEq, Eq)]
pub struct WittVector {
    p: u32,
    ring: Arc<Ring>,
    coords: Vec<LaurentPolynomial>,
}

/// Ghost components `w_0, …, w_{r-1}` over a torsion-free ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhostVector {
    pub p: u32,
    pub components: Vec<LaurentPolynomial>,
}

impl GhostVector {
    pub fn add(&self, other: &GhostVector) -> GhostVector {
        let components = self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect();
        GhostVector { p: self.p, components }
    }

    pub fn mul(&self, other: &GhostVector) -> GhostVector {
        let components = self.components.iter().zip(&other.components).map(|(a, b)| a * b).collect();
        GhostVector { p: self.p, components }
    }
}

impl WittVector {
    pub fn new(p: u32, coords: Vec<LaurentPolynomial>) -> Result<Self> {
        let Some(first) = coords.first() else {
            return Err(Error::MismatchedParameters("Witt vectors need length at least 1".into()));
        };
        if !is_prime(p) {
            return Err(Error::MismatchedParameters(format!("{p} is not prime")));
        }
        let ring = first.ring().clone();
        if coords.iter().any(|c| **c.ring() != *ring) {
            return Err(Error::MismatchedParameters("coordinates live in different rings".into()));
        }
        Ok(WittVector { p, ring, coords })
    }

    pub fn zero(p: u32, r: usize, ring: &Arc<Ring>) -> Self {
        WittVector { p, ring: ring.clone(), coords: vec![LaurentPolynomial::zero(ring); r] }
    }

    pub fn one(p: u32, r: usize, ring: &Arc<Ring>) -> Self {
        Self::teichmuller(p, r, &LaurentPolynomial::one(ring))
    }

    /// `[a] = (a, 0, …, 0)`.
    pub fn teichmuller(p: u32, r: usize, a: &LaurentPolynomial) -> Self {
        let mut w = Self::zero(p, r, a.ring());
        w.coords[0] = a.clone();
        w
    }

    /// Image of an integer under `Z → W_r(ring)`.
    pub fn from_integer(p: u32, r: usize, ring: &Arc<Ring>, n: &BigInt) -> Self {
        let exact = ring.with_modulus(None);
        let ghost: Vec<LaurentPolynomial> = vec![LaurentPolynomial::constant(&exact, n.clone()); r];
        let coords = coords_from_ghost(p, &ghost).expect("integers are Witt vectors over Z");
        WittVector { p, ring: ring.clone(), coords: coords.iter().map(|c| c.reduce(ring.modulus()).in_ring(ring)).collect() }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn coords(&self) -> &[LaurentPolynomial] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(LaurentPolynomial::is_zero)
    }

    fn check(&self, other: &WittVector) -> Result<()> {
        if self.p != other.p || self.len() != other.len() || *self.ring != *other.ring {
            return Err(Error::MismatchedParameters(format!(
                "(p={}, r={}) vs (p={}, r={})",
                self.p,
                self.len(),
                other.p,
                other.len()
            )));
        }
        Ok(())
    }

    fn apply_laws(&self, other: &WittVector, product: bool) -> Result<WittVector> {
        self.check(other)?;
        let laws = universal_laws(self.p, self.len());
        let values: Vec<LaurentPolynomial> = self.coords.iter().chain(&other.coords).cloned().collect();
        let coords = (0..self.len())
            .map(|n| if product { laws.product(n).eval(&values) } else { laws.sum(n).eval(&values) })
            .collect();
        Ok(WittVector { p: self.p, ring: self.ring.clone(), coords })
    }

    pub fn add(&self, other: &WittVector) -> Result<WittVector> {
        self.apply_laws(other, false)
    }

    pub fn mul(&self, other: &WittVector) -> Result<WittVector> {
        self.apply_laws(other, true)
    }

    /// Multiplication by an integer, through the image of `Z`.
    pub fn zmul(&self, n: &BigInt) -> WittVector {
        if n.is_zero() {
            return Self::zero(self.p, self.len(), &self.ring);
        }
        if n.is_one() {
            return self.clone();
        }
        self.mul(&Self::from_integer(self.p, self.len(), &self.ring, n)).expect("same parameters")
    }

    pub fn neg(&self) -> WittVector {
        if self.p != 2 {
            let coords = self.coords.iter().map(|c| -c).collect();
            return WittVector { p: self.p, ring: self.ring.clone(), coords };
        }
        self.zmul(&BigInt::from(-1))
    }

    pub fn sub(&self, other: &WittVector) -> Result<WittVector> {
        self.add(&other.neg())
    }

    /// Witt Frobenius over a ring of characteristic p: `(x_i) ↦ (x_i^p)`.
    pub fn frobenius(&self) -> Result<WittVector> {
        if self.ring.modulus() != Some(&BigInt::from(self.p)) {
            return Err(Error::NotCharP { p: self.p });
        }
        let coords = self.coords.iter().map(|c| c.pow(self.p as u64)).collect();
        Ok(WittVector { p: self.p, ring: self.ring.clone(), coords })
    }

    /// `V(x) = (0, x_0, …, x_{r-1})`, of length `r + 1`.
    pub fn verschiebung(&self) -> WittVector {
        let mut coords = Vec::with_capacity(self.len() + 1);
        coords.push(LaurentPolynomial::zero(&self.ring));
        coords.extend(self.coords.iter().cloned());
        WittVector { p: self.p, ring: self.ring.clone(), coords }
    }

    /// `V` followed by restriction back to length `r`.
    pub fn verschiebung_truncated(&self) -> WittVector {
        self.verschiebung().truncate(self.len())
    }

    /// Restriction `R^{r-s}: W_r → W_s`.
    pub fn truncate(&self, s: usize) -> WittVector {
        assert!(s >= 1 && s <= self.len(), "truncation length out of range");
        WittVector { p: self.p, ring: self.ring.clone(), coords: self.coords[..s].to_vec() }
    }

    /// Coordinates reduced into another coefficient modulus (same variables).
    pub fn reduce(&self, modulus: Option<&BigInt>) -> WittVector {
        let ring = self.ring.with_modulus(modulus.cloned());
        let coords = self.coords.iter().map(|c| c.reduce(modulus).in_ring(&ring)).collect();
        WittVector { p: self.p, ring, coords }
    }

    pub fn to_ghost(&self) -> Result<GhostVector> {
        if let Some(m) = self.ring.modulus() {
            return Err(Error::TorsionCoefficients { modulus: m.clone() });
        }
        Ok(GhostVector { p: self.p, components: ghost_polys(self.p, &self.coords) })
    }

    /// Inverse of the ghost map over a torsion-free ring; fails when the
    /// components do not satisfy the Dwork congruences.
    pub fn from_ghost(g: &GhostVector) -> Result<WittVector> {
        let coords = coords_from_ghost(g.p, &g.components)?;
        WittVector::new(g.p, coords)
    }

    /// `γ_n(Vx) = (p^{n-1}/n!) V(x^n)`. The witness `x` (of length `r - 1`) may be
    /// supplied; otherwise it is recovered by shifting coordinates, which needs
    /// the coefficient ring to be a domain.
    pub fn pd_gamma(&self, n: u32, witness: Option<&WittVector>) -> Result<WittVector> {
        if !self.coords[0].is_zero() {
            return Err(Error::NotInVImage);
        }
        let r = self.len();
        if n == 0 {
            return Ok(Self::one(self.p, r, &self.ring));
        }
        if r == 1 {
            return Ok(self.clone());
        }
        let x = match witness {
            Some(x) => {
                if x.len() != r - 1 || x.p != self.p || *x.ring != *self.ring || x.verschiebung() != *self {
                    return Err(Error::MismatchedParameters("witness x does not satisfy V(x) = w".into()));
                }
                x.clone()
            }
            None => {
                let domain = match self.ring.modulus() {
                    None => true,
                    Some(m) => m.to_u32().is_some_and(is_prime),
                };
                if !domain {
                    return Err(Error::MismatchedParameters("coefficient ring is not a domain; supply the V-witness".into()));
                }
                WittVector { p: self.p, ring: self.ring.clone(), coords: self.coords[1..].to_vec() }
            }
        };
        let mut xn = Self::one(self.p, r - 1, &self.ring);
        for _ in 0..n {
            xn = xn.mul(&x)?;
        }
        let c = p_local_residue(&pow_big(self.p, n - 1), &factorial(n), &pow_big(self.p, r as u32))?;
        Ok(xn.verschiebung().zmul(&c))
    }
}

/// Solves the ghost equations for Witt coordinates over a torsion-free ring.
pub(crate) fn coords_from_ghost(p: u32, ghost: &[LaurentPolynomial]) -> Result<Vec<LaurentPolynomial>> {
    let mut a: Vec<LaurentPolynomial> = Vec::with_capacity(ghost.len());
    let mut pw: Vec<LaurentPolynomial> = Vec::with_capacity(ghost.len());
    for (n, target) in ghost.iter().enumerate() {
        for q in pw.iter_mut() {
            *q = q.pow(p as u64);
        }
        let mut rest = target.clone();
        for (i, q) in pw.iter().enumerate() {
            rest = &rest - &q.scale(&pow_big(p, i as u32));
        }
        let an = rest.exact_div_p(p, n as u32).map_err(|_| Error::DworkDivisionFailure { level: n })?;
        pw.push(an.clone());
        a.push(an);
    }
    Ok(a)
}

/// The δ-ring map `h: A → W_r(A/p)` attached to a Frobenius lift: the Witt
/// coordinates with ghost components `a, φ(a), φ²(a), …`, reduced mod p.
pub fn delta_lift(a: &LaurentPolynomial, phi: &FrobeniusLiftSpec, r: usize) -> Result<WittVector> {
    if let Some(m) = a.ring().modulus() {
        return Err(Error::TorsionCoefficients { modulus: m.clone() });
    }
    let mut ghost = Vec::with_capacity(r);
    let mut cur = a.clone();
    for n in 0..r {
        if n > 0 {
            cur = frobenius_substitute(&cur, phi)?;
        }
        ghost.push(cur.clone());
    }
    let coords = coords_from_ghost(phi.p(), &ghost)?;
    WittVector::new(phi.p(), coords).map(|w| w.reduce(Some(&BigInt::from(phi.p()))))
}

impl fmt::Display for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W_{}[p={}]{self}", self.len(), self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Variable;

    fn fp_t(p: u32) -> Arc<Ring> {
        Ring::new(vec![Variable::polynomial("t")], Some(BigInt::from(p)))
    }

    fn ints(ring: &Arc<Ring>, v: &[i64]) -> Vec<LaurentPolynomial> {
        v.iter().map(|&c| LaurentPolynomial::constant(ring, BigInt::from(c))).collect()
    }

    #[test]
    fn one_plus_one_is_v1() {
        let ring = Ring::new(vec![], Some(BigInt::from(2)));
        let one = WittVector::one(2, 2, &ring);
        let two = one.add(&one).unwrap();
        assert_eq!(two.coords(), ints(&ring, &[0, 1]).as_slice());
        assert_eq!(two, WittVector::one(2, 1, &ring).verschiebung());
    }

    #[test]
    fn ghost_examples() {
        let z = Ring::integers(vec![]);
        let w = WittVector::new(2, ints(&z, &[1, 1])).unwrap();
        assert_eq!(w.to_ghost().unwrap().components, ints(&z, &[1, 3]));
        let b = WittVector::new(3, ints(&z, &[0, 2, 0])).unwrap();
        assert_eq!(b.to_ghost().unwrap().components, ints(&z, &[0, 6, 24]));
        let back = WittVector::from_ghost(&b.to_ghost().unwrap()).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn frobenius_and_teichmuller() {
        let ring = fp_t(3);
        let t = LaurentPolynomial::var(&ring, 0);
        let tt = WittVector::teichmuller(3, 3, &t);
        assert_eq!(tt.frobenius().unwrap(), WittVector::teichmuller(3, 3, &t.pow(3)));
        assert_eq!(tt.mul(&tt).unwrap(), WittVector::teichmuller(3, 3, &t.pow(2)));
        let z = Ring::integers(vec![]);
        assert!(matches!(WittVector::one(3, 2, &z).frobenius(), Err(Error::NotCharP { p: 3 })));
    }

    #[test]
    fn gamma_examples() {
        let ring = fp_t(2);
        let t = LaurentPolynomial::var(&ring, 0);
        let vt = WittVector::teichmuller(2, 2, &t).verschiebung();
        assert_eq!(vt.pd_gamma(1, None).unwrap(), vt);
        let expected = WittVector::teichmuller(2, 2, &t.pow(2)).verschiebung();
        assert_eq!(vt.pd_gamma(2, None).unwrap(), expected);
        assert!(WittVector::zero(2, 3, &ring).pd_gamma(3, None).unwrap().is_zero());
        assert!(matches!(WittVector::one(2, 3, &ring).pd_gamma(2, None), Err(Error::NotInVImage)));
    }

    #[test]
    fn delta_lift_examples() {
        let z = Ring::integers(vec![Variable::polynomial("x")]);
        let x = LaurentPolynomial::var(&z, 0);
        let std3 = FrobeniusLiftSpec::standard(3, &z);
        let h = delta_lift(&x, &std3, 3).unwrap();
        assert_eq!(h, WittVector::teichmuller(3, 3, &x.reduce(Some(&BigInt::from(3)))));
        let phi = FrobeniusLiftSpec::new(2, &z, vec![&x.pow(2) + &x.scale(&BigInt::from(2))]).unwrap();
        let h = delta_lift(&x, &phi, 2).unwrap();
        let xb = x.reduce(Some(&BigInt::from(2)));
        assert_eq!(h.coords(), &[xb.clone(), xb]);
        let seven = delta_lift(&LaurentPolynomial::constant(&z, BigInt::from(7)), &std3, 3).unwrap();
        assert_eq!(seven, WittVector::from_integer(3, 3, &z.with_modulus(Some(BigInt::from(3))), &BigInt::from(7)));
    }
}
