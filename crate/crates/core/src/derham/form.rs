use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{frobenius_substitute, FrobeniusLiftSpec, LaurentPolynomial, Monomial, Ring};

/// Index set `{i_1 < … < i_k}` of a basis form `dx_{i_1} ∧ … ∧ dx_{i_k}`, as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IndexSet(pub u32);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(0)
    }

    pub fn single(i: usize) -> Self {
        IndexSet(1 << i)
    }

    pub fn from_indices(idx: &[usize]) -> Self {
        IndexSet(idx.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    /// Sign and union of `dx_I ∧ dx_J`, or `None` if they share an index.
    pub fn wedge(self, other: IndexSet) -> Option<(IndexSet, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // count pairs (i ∈ I, j ∈ J) with i > j
        let mut inversions = 0;
        for j in other.indices() {
            inversions += (self.0 >> (j + 1)).count_ones();
        }
        Some((IndexSet(self.0 | other.0), inversions % 2 == 1))
    }

    /// All subsets of `{0, …, n-1}` of size `k`, in increasing bitmask order.
    pub fn subsets(n: usize, k: usize) -> Vec<IndexSet> {
        (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).map(IndexSet).collect()
    }
}

/// A differential form `Σ c · x^a dx_I` over a (Laurent) polynomial ring.
///
/// Terms of different degrees may coexist; most operations are defined termwise.
/// The weight of `x^a dx_I` is the exponent vector `a` plus the indicator of `I`.
#[derive(Clone)]
pub struct DifferentialForm {
    ring: Arc<Ring>,
    terms: BTreeMap<(IndexSet, Monomial), BigInt>,
}

impl PartialEq for DifferentialForm {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring) && self.terms == other.terms
    }
}

impl Eq for DifferentialForm {}

impl DifferentialForm {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        DifferentialForm { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn function(f: &LaurentPolynomial) -> Self {
        let mut w = Self::zero(f.ring());
        for (m, c) in f.terms() {
            w.add_term(IndexSet::empty(), m.clone(), c.clone());
        }
        w
    }

    pub fn constant(ring: &Arc<Ring>, c: BigInt) -> Self {
        Self::function(&LaurentPolynomial::constant(ring, c))
    }

    pub fn dx(ring: &Arc<Ring>, i: usize) -> Self {
        let mut w = Self::zero(ring);
        w.add_term(IndexSet::single(i), Monomial::one(ring.nvars()), BigInt::one());
        w
    }

    /// `f · dx_I` for a polynomial coefficient.
    pub fn with_coefficient(f: &LaurentPolynomial, dx: IndexSet) -> Self {
        let mut w = Self::zero(f.ring());
        for (m, c) in f.terms() {
            w.add_term(dx, m.clone(), c.clone());
        }
        w
    }

    pub fn term(ring: &Arc<Ring>, dx: IndexSet, m: Monomial, c: BigInt) -> Self {
        let mut w = Self::zero(ring);
        w.add_term(dx, m, c);
        w
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (IndexSet, &Monomial, &BigInt)> {
        self.terms.iter().map(|((i, m), c)| (*i, m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, dx: IndexSet, m: &Monomial) -> BigInt {
        self.terms.get(&(dx, m.clone())).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, dx: IndexSet, m: Monomial, c: BigInt) {
        let c = self.ring.normalize(c);
        if c.is_zero() {
            return;
        }
        match self.terms.entry((dx, m)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = self.ring.normalize(o.get() + c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Degree if every term has the same degree (`None` for zero or mixed forms).
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|(i, _)| i.len());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Terms of degree `k`.
    pub fn component(&self, k: usize) -> Self {
        let mut w = Self::zero(&self.ring);
        for ((i, m), c) in &self.terms {
            if i.len() == k {
                w.terms.insert((*i, m.clone()), c.clone());
            }
        }
        w
    }

    /// Degree-0 part as a polynomial, if the form is a function.
    pub fn as_function(&self) -> Option<LaurentPolynomial> {
        if self.terms.keys().any(|(i, _)| !i.is_empty()) {
            return None;
        }
        let mut f = LaurentPolynomial::zero(&self.ring);
        for ((_, m), c) in &self.terms {
            f.add_term(m.clone(), c.clone());
        }
        Some(f)
    }

    /// Coefficient polynomial of `dx_I`.
    pub fn coefficient_of(&self, dx: IndexSet) -> LaurentPolynomial {
        let mut f = LaurentPolynomial::zero(&self.ring);
        for ((i, m), c) in &self.terms {
            if *i == dx {
                f.add_term(m.clone(), c.clone());
            }
        }
        f
    }

    /// Multiweight of a term `x^a dx_I`.
    pub fn term_weight(dx: IndexSet, m: &Monomial) -> Vec<i64> {
        m.0.iter().enumerate().map(|(k, e)| e + i64::from(dx.contains(k))).collect()
    }

    /// Every term has multiweight `w`.
    pub fn is_weight_homogeneous(&self, w: &[i64]) -> bool {
        self.terms.keys().all(|(i, m)| Self::term_weight(*i, m) == w)
    }

    /// Weight of a weight-homogeneous nonzero form.
    pub fn weight(&self) -> Option<Vec<i64>> {
        let mut it = self.terms.keys().map(|(i, m)| Self::term_weight(*i, m));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut w = Self::zero(&self.ring);
        for ((i, m), a) in &self.terms {
            w.add_term(*i, m.clone(), a * c);
        }
        w
    }

    pub fn mul_function(&self, f: &LaurentPolynomial) -> Self {
        self.wedge(&Self::function(f)).expect("same ring")
    }

    pub fn reduce(&self, modulus: Option<&BigInt>) -> Self {
        let ring = self.ring.with_modulus(modulus.cloned());
        let mut w = Self::zero(&ring);
        for ((i, m), c) in &self.terms {
            w.add_term(*i, m.clone(), c.clone());
        }
        w
    }

    pub fn in_ring(&self, ring: &Arc<Ring>) -> Self {
        assert!(self.ring.same_variables(ring), "variable lists differ");
        let mut w = Self::zero(ring);
        for ((i, m), c) in &self.terms {
            w.add_term(*i, m.clone(), c.clone());
        }
        w
    }

    pub fn exact_div_p(&self, p: u32, k: u32) -> Result<Self> {
        let mut w = Self::zero(&self.ring);
        for dx in self.terms.keys().map(|(i, _)| *i).collect::<BTreeSet<_>>() {
            let f = self.coefficient_of(dx).exact_div_p(p, k)?;
            w = &w + &Self::with_coefficient(&f, dx);
        }
        Ok(w)
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::MismatchedRing(format!("{:?} vs {:?}", self.ring, other.ring)))
        }
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut w = Self::zero(&self.ring);
        for ((i, m), a) in &self.terms {
            for ((j, n), b) in &other.terms {
                if let Some((k, neg)) = i.wedge(*j) {
                    let c = a * b;
                    w.add_term(k, m.mul(n), if neg { -c } else { c });
                }
            }
        }
        Ok(w)
    }

    /// Exterior derivative: `d(f dx_I) = Σ_k ∂_k f dx_k ∧ dx_I`.
    pub fn d(&self) -> Self {
        let mut w = Self::zero(&self.ring);
        for ((i, m), c) in &self.terms {
            for k in 0..self.ring.nvars() {
                let e = m.0[k];
                if e == 0 || i.contains(k) {
                    continue;
                }
                let (set, neg) = IndexSet::single(k).wedge(*i).expect("k not in I");
                let mut n = m.clone();
                n.0[k] -= 1;
                let coeff = c * BigInt::from(e);
                w.add_term(set, n, if neg { -coeff } else { coeff });
            }
        }
        w
    }

    fn require_exact(&self) -> Result<()> {
        match self.ring.modulus() {
            Some(m) => Err(Error::TorsionCoefficients { modulus: m.clone() }),
            None => Ok(()),
        }
    }

    /// The divided Frobenius: `φ` on functions, `F(dx_i) = x_i^{p-1} dx_i + dδ(x_i)`,
    /// extended multiplicatively.
    pub fn divided_frobenius(&self, phi: &FrobeniusLiftSpec) -> Result<Self> {
        self.require_exact()?;
        self.frobenius_with(phi, |i| {
            let ring = phi.ring();
            let x = LaurentPolynomial::var(ring, i);
            let lead = Self::with_coefficient(&x.pow(phi.p() as u64 - 1), IndexSet::single(i));
            &lead + &Self::function(phi.delta(i)).d()
        })
    }

    /// The pullback `φ*`: `φ` on functions and `dx_i ↦ d(φ(x_i))`.
    pub fn undivided_frobenius(&self, phi: &FrobeniusLiftSpec) -> Result<Self> {
        self.require_exact()?;
        self.frobenius_with(phi, |i| Self::function(phi.image(i)).d())
    }

    fn frobenius_with(&self, phi: &FrobeniusLiftSpec, dx_image: impl Fn(usize) -> Self) -> Result<Self> {
        if !self.ring.same_variables(phi.ring()) {
            return Err(Error::MismatchedRing("form and Frobenius lift use different variables".into()));
        }
        let images: Vec<Self> = (0..self.ring.nvars()).map(|i| dx_image(i).in_ring(&self.ring)).collect();
        let mut cache: BTreeMap<IndexSet, Self> = BTreeMap::new();
        let mut out = Self::zero(&self.ring);
        for dx in self.terms.keys().map(|(i, _)| *i).collect::<BTreeSet<_>>() {
            let f = self.coefficient_of(dx);
            let phi_f = frobenius_substitute(&f, phi)?;
            let basis = match cache.get(&dx) {
                Some(b) => b.clone(),
                None => {
                    let mut b = Self::constant(&self.ring, BigInt::one());
                    for i in dx.indices() {
                        b = b.wedge(&images[i])?;
                    }
                    cache.insert(dx, b.clone());
                    b
                }
            };
            out = &out + &basis.mul_function(&phi_f);
        }
        Ok(out)
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((i, m), c) in &self.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut parts = Vec::new();
            let a = c.abs();
            let mono = m.format(&self.ring);
            if !a.is_one() || (mono == "1" && i.is_empty()) {
                parts.push(a.to_string());
            }
            if mono != "1" {
                parts.push(mono);
            }
            for k in i.indices() {
                parts.push(format!("d{}", self.ring.vars()[k].name));
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &DifferentialForm {
    type Output = DifferentialForm;
    fn add(self, other: &DifferentialForm) -> DifferentialForm {
        self.check_ring(other).expect("same ring");
        let mut w = self.clone();
        for ((i, m), c) in &other.terms {
            w.add_term(*i, m.clone(), c.clone());
        }
        w
    }
}

impl Sub for &DifferentialForm {
    type Output = DifferentialForm;
    fn sub(self, other: &DifferentialForm) -> DifferentialForm {
        self.check_ring(other).expect("same ring");
        let mut w = self.clone();
        for ((i, m), c) in &other.terms {
            w.add_term(*i, m.clone(), -c);
        }
        w
    }
}

impl Neg for &DifferentialForm {
    type Output = DifferentialForm;
    fn neg(self) -> DifferentialForm {
        self.scale(&BigInt::from(-1))
    }
}
