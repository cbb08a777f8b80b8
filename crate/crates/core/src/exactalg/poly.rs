use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{p_adic_valuation, pow_big};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    /// Invertible variable (a coordinate on G_m rather than A^1).
    pub laurent: bool,
}

impl Variable {
    pub fn polynomial(name: &str) -> Self {
        Variable { name: name.to_string(), laurent: false }
    }

    pub fn laurent(name: &str) -> Self {
        Variable { name: name.to_string(), laurent: true }
    }
}

/// Coefficient ring `Z` or `Z/N` adjoined with an ordered list of variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Vec<Variable>,
    modulus: Option<BigInt>,
}

impl Ring {
    pub fn new(vars: Vec<Variable>, modulus: Option<BigInt>) -> Arc<Self> {
        let modulus = modulus.map(|m| m.abs());
        Arc::new(Ring { vars, modulus })
    }

    pub fn integers(vars: Vec<Variable>) -> Arc<Self> {
        Self::new(vars, None)
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn modulus(&self) -> Option<&BigInt> {
        self.modulus.as_ref()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Same variables, different coefficient modulus.
    pub fn with_modulus(&self, modulus: Option<BigInt>) -> Arc<Self> {
        Ring::new(self.vars.clone(), modulus)
    }

    pub fn same_variables(&self, other: &Ring) -> bool {
        self.vars == other.vars
    }

    pub(crate) fn normalize(&self, c: BigInt) -> BigInt {
        match &self.modulus {
            Some(m) => c.mod_floor(m),
            None => c,
        }
    }
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<i64>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: i64) -> Monomial {
        Monomial(self.0.iter().map(|a| a * k).collect())
    }

    pub fn format(&self, ring: &Ring) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(ring.vars())
            .filter(|(e, _)| **e != 0)
            .map(|(&e, v)| if e == 1 { v.name.clone() } else { format!("{}^{}", v.name, e) })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate Laurent polynomial with exact or modular integer coefficients.
#[derive(Clone)]
pub struct LaurentPolynomial {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, BigInt>,
}

impl PartialEq for LaurentPolynomial {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring) && self.terms == other.terms
    }
}

impl Eq for LaurentPolynomial {}

impl LaurentPolynomial {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        LaurentPolynomial { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, BigInt::one())
    }

    pub fn constant(ring: &Arc<Ring>, c: BigInt) -> Self {
        Self::monomial(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn monomial(ring: &Arc<Ring>, m: Monomial, c: BigInt) -> Self {
        assert_eq!(m.0.len(), ring.nvars(), "exponent vector length");
        for (e, v) in m.0.iter().zip(ring.vars()) {
            assert!(*e >= 0 || v.laurent, "negative exponent on polynomial variable {}", v.name);
        }
        let mut p = Self::zero(ring);
        p.add_term(m, c);
        p
    }

    pub fn var(ring: &Arc<Ring>, i: usize) -> Self {
        let mut e = vec![0; ring.nvars()];
        e[i] = 1;
        Self::monomial(ring, Monomial(e), BigInt::one())
    }

    /// Builds from `(exponents, coefficient)` pairs; fails on a negative exponent
    /// in a non-Laurent variable.
    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = (Vec<i64>, BigInt)>) -> Result<Self> {
        let mut p = Self::zero(ring);
        for (e, c) in terms {
            if e.len() != ring.nvars() {
                return Err(Error::Dimension(format!("exponent vector of length {} in {} variables", e.len(), ring.nvars())));
            }
            if let Some((_, v)) = e.iter().zip(ring.vars()).find(|(e, v)| **e < 0 && !v.laurent) {
                return Err(Error::MismatchedRing(format!("negative exponent on polynomial variable {}", v.name)));
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Constant term if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.0.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        let c = self.ring.normalize(c);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.ring.normalize(o.get() + c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self += other` without cloning `self`.
    pub fn add_assign(&mut self, other: &Self) {
        self.check_ring(other);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    fn check_ring(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring,
            "polynomials from different rings"
        );
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut p = Self::zero(&self.ring);
        for (m, a) in &self.terms {
            p.add_term(m.clone(), a * c);
        }
        p
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigInt) -> Self {
        let mut p = Self::zero(&self.ring);
        for (n, a) in &self.terms {
            p.add_term(n.mul(m), a * c);
        }
        p
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coefficients reduced modulo `modulus` (`None` lifts back to exact integers
    /// using the stored representatives).
    pub fn reduce(&self, modulus: Option<&BigInt>) -> Self {
        let ring = self.ring.with_modulus(modulus.cloned());
        let mut p = Self::zero(&ring);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    /// Same polynomial viewed in `ring` (which must have the same variables).
    pub fn in_ring(&self, ring: &Arc<Ring>) -> Self {
        assert!(self.ring.same_variables(ring), "variable lists differ");
        let mut p = Self::zero(ring);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    /// Minimum p-adic valuation of the coefficients (`None` for zero).
    pub fn valuation(&self, p: u32) -> Option<u32> {
        self.terms.values().map(|c| p_adic_valuation(c, p)).min()
    }

    /// Exact division by `p^k`.
    pub fn exact_div_p(&self, p: u32, k: u32) -> Result<Self> {
        if let Some(m) = self.ring.modulus() {
            return Err(Error::TorsionCoefficients { modulus: m.clone() });
        }
        let pk = pow_big(p, k);
        let mut out = Self::zero(&self.ring);
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(&pk);
            if !r.is_zero() {
                return Err(Error::NotDivisible { monomial: m.format(&self.ring), valuation: p_adic_valuation(c, p), k });
            }
            out.add_term(m.clone(), q);
        }
        Ok(out)
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut n = m.clone();
            n.0[var] -= 1;
            out.add_term(n, c * BigInt::from(e));
        }
        out
    }

    /// If the polynomial is `±x^a`, its inverse `±x^{-a}` (only legal when every
    /// variable with nonzero exponent is Laurent).
    pub fn unit_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let c = match self.ring.modulus() {
            Some(n) => mod_inverse(c, n)?,
            None if c.abs().is_one() => c.clone(),
            None => return None,
        };
        if m.0.iter().zip(self.ring.vars()).any(|(e, v)| *e != 0 && !v.laurent) {
            return None;
        }
        Some(Self::monomial(&self.ring, m.scale(-1), c))
    }

    /// Ring homomorphism sending variable `i` to `images[i]`. Negative powers
    /// need the image to be a monomial unit.
    pub fn substitute(&self, images: &[LaurentPolynomial]) -> Result<Self> {
        assert_eq!(images.len(), self.ring.nvars(), "one image per variable");
        let target = images.first().map(|p| p.ring.clone()).unwrap_or_else(|| self.ring.clone());
        let mut cache: HashMap<(usize, i64), LaurentPolynomial> = HashMap::new();
        let mut out = Self::zero(&target);
        for (m, c) in &self.terms {
            let mut t = Self::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !cache.contains_key(&(i, e)) {
                    let base = if e > 0 {
                        images[i].clone()
                    } else {
                        images[i].unit_inverse().ok_or_else(|| Error::NotAFrobeniusLift {
                            variable: self.ring.vars()[i].name.clone(),
                            reason: "negative power of an image that is not a monomial unit".into(),
                        })?
                    };
                    cache.insert((i, e), base.pow(e.unsigned_abs()));
                }
                t = &t * &cache[&(i, e)];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Multidegree of every term equals `w` (vacuous for zero).
    pub fn is_homogeneous_of(&self, w: &[i64]) -> bool {
        self.terms.keys().all(|m| m.0 == w)
    }

    pub fn max_abs_coefficient(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }
}

pub(crate) fn mod_inverse(a: &BigInt, n: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(n).extended_gcd(n);
    e.gcd.is_one().then(|| e.x.mod_floor(n))
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = m.format(&self.ring);
            match (a.is_one(), mono.as_str()) {
                (_, "1") => write!(f, "{a}")?,
                (true, s) => write!(f, "{s}")?,
                (false, s) => write!(f, "{a}*{s}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, other: &LaurentPolynomial) -> LaurentPolynomial {
        self.check_ring(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, other: &LaurentPolynomial) -> LaurentPolynomial {
        self.check_ring(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        self.scale(&BigInt::from(-1))
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, other: &LaurentPolynomial) -> LaurentPolynomial {
        self.check_ring(other);
        // accumulate exactly, reduce once per monomial
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                *acc.entry(m.mul(n)).or_default() += a * b;
            }
        }
        let ring = &self.ring;
        let terms = acc
            .into_iter()
            .filter_map(|(m, c)| {
                let c = ring.normalize(c);
                (!c.is_zero()).then_some((m, c))
            })
            .collect();
        LaurentPolynomial { ring: ring.clone(), terms }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $f(self, other: LaurentPolynomial) -> LaurentPolynomial {
                (&self).$f(&other)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
