use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::matrix::IntegerMatrix;
use super::snf::{kernel, row_hnf, snf};
use crate::error::{Error, Result};

/// Invariant factors `d_1 | d_2 | …`; a zero entry is a free summand.
///
/// Unit entries are kept so that positions line up with a presentation's
/// coordinates; [`ElementaryDivisors::nontrivial`] drops them for reporting.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ElementaryDivisors(Vec<BigInt>);

impl ElementaryDivisors {
    pub fn new(mut entries: Vec<BigInt>) -> Self {
        for e in &mut entries {
            *e = e.abs();
        }
        debug_assert!(entries.windows(2).all(|w| w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0]))));
        ElementaryDivisors(entries)
    }

    pub fn from_u64(entries: &[u64]) -> Self {
        Self::new(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn all(&self) -> &[BigInt] {
        &self.0
    }

    /// Entries other than 1, in order.
    pub fn nontrivial(&self) -> Vec<BigInt> {
        self.0.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(One::is_one)
    }

    /// Number of nontrivial cyclic summands.
    pub fn rank(&self) -> usize {
        self.0.iter().filter(|d| !d.is_one()).count()
    }

    /// Group order, `None` when there is a free summand.
    pub fn order(&self) -> Option<BigInt> {
        if self.0.iter().any(Zero::is_zero) {
            return None;
        }
        Some(self.0.iter().product())
    }

    pub fn is_free(&self) -> bool {
        self.0.iter().any(Zero::is_zero)
    }

    /// Annihilator of the group (last invariant factor); `None` if free.
    pub fn exponent(&self) -> Option<BigInt> {
        if self.is_free() {
            return None;
        }
        Some(self.0.last().cloned().unwrap_or_else(BigInt::one))
    }

    pub fn same_group(&self, other: &ElementaryDivisors) -> bool {
        self.nontrivial() == other.nontrivial()
    }
}

impl fmt::Display for ElementaryDivisors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.nontrivial().iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for ElementaryDivisors {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.nontrivial().iter().map(ToString::to_string).collect();
        v.serialize(s)
    }
}

/// A subgroup of `Z^n` stored by an echelon (Hermite) basis.
///
/// Basis rows have strictly increasing pivot columns, positive pivots, and
/// entries above a pivot reduced into `[0, pivot)`; this form is unique, so
/// lattices compare by basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    ambient: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl Lattice {
    pub fn from_generators(ambient: usize, generators: &[Vec<BigInt>]) -> Self {
        if generators.is_empty() || ambient == 0 {
            return Lattice { ambient, rows: Vec::new(), pivots: Vec::new() };
        }
        let mut m = IntegerMatrix::zeros(generators.len(), ambient);
        for (i, g) in generators.iter().enumerate() {
            assert_eq!(g.len(), ambient, "generator length");
            for (j, x) in g.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        let (h, _, pivots) = row_hnf(&m);
        let rows = (0..pivots.len()).map(|i| h.row(i).to_vec()).collect();
        Lattice { ambient, rows, pivots }
    }

    /// Lattice spanned by the columns of `m`.
    pub fn column_span(m: &IntegerMatrix) -> Self {
        Self::from_generators(m.rows(), &m.columns())
    }

    pub fn full(n: usize) -> Self {
        Self::scalar(n, &BigInt::one())
    }

    pub fn zero(n: usize) -> Self {
        Lattice { ambient: n, rows: Vec::new(), pivots: Vec::new() }
    }

    /// `c · Z^n`.
    pub fn scalar(n: usize, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(n);
        }
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![BigInt::zero(); n];
                r[i] = c.abs();
                r
            })
            .collect();
        Lattice { ambient: n, rows, pivots: (0..n).collect() }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rows.len() == self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn basis_vectors(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    /// Basis as the columns of an `ambient × rank` matrix (column Hermite form).
    pub fn basis(&self) -> IntegerMatrix {
        IntegerMatrix::from_columns(self.ambient, &self.rows)
    }

    /// Index in `Z^n` when full rank.
    pub fn determinant(&self) -> Option<BigInt> {
        if !self.is_full_rank() {
            return None;
        }
        Some(self.rows.iter().enumerate().map(|(i, r)| r[self.pivots[i]].clone()).product())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.ambient);
        }
        let gens: Vec<Vec<BigInt>> = self.rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect();
        Self::from_generators(self.ambient, &gens)
    }

    pub fn sum(&self, other: &Lattice) -> Self {
        assert_eq!(self.ambient, other.ambient, "lattice sum ambient");
        let gens: Vec<Vec<BigInt>> = self.rows.iter().chain(&other.rows).cloned().collect();
        Self::from_generators(self.ambient, &gens)
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` is not in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient, "vector length");
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rows.len());
        let mut col = 0;
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            if rest[col..piv].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (q, r) = rest[piv].div_rem(&row[piv]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (x, b) in rest.iter_mut().zip(row).skip(piv) {
                    *x -= &q * b;
                }
            }
            coords.push(q);
            col = piv + 1;
        }
        if rest[col..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(coords)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    pub fn combination(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.ambient];
        for (c, row) in coords.iter().zip(&self.rows) {
            if c.is_zero() {
                continue;
            }
            for (x, b) in v.iter_mut().zip(row) {
                *x += c * b;
            }
        }
        v
    }

    pub fn intersect(&self, other: &Lattice) -> Self {
        assert_eq!(self.ambient, other.ambient, "lattice intersection ambient");
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ambient);
        }
        // kernel of [A | -B] gives pairs (a, b) with A a = B b
        let a = self.basis();
        let b = other.basis().scale(&BigInt::from(-1));
        let ker = kernel(&a.hcat(&b));
        let gens: Vec<Vec<BigInt>> = ker.iter().map(|k| self.combination(&k[..self.rank()])).collect();
        Self::from_generators(self.ambient, &gens)
    }

    /// Image under a linear map `Z^ambient → Z^{map.rows()}`.
    pub fn image(&self, map: &IntegerMatrix) -> Self {
        assert_eq!(map.cols(), self.ambient, "image map dimensions");
        let gens: Vec<Vec<BigInt>> = self.rows.iter().map(|r| map.mul_vec(r)).collect();
        Self::from_generators(map.rows(), &gens)
    }

    /// `{x ∈ self : map·x ∈ target}`.
    pub fn preimage(&self, map: &IntegerMatrix, target: &Lattice) -> Self {
        assert_eq!(map.cols(), self.ambient, "preimage map dimensions");
        assert_eq!(map.rows(), target.ambient, "preimage target dimensions");
        if self.is_zero() {
            return self.clone();
        }
        if map.rows() == 0 {
            return self.clone();
        }
        let k = self.rank();
        let ab = map.mul(&self.basis());
        let system = if target.is_zero() { ab } else { ab.hcat(&target.basis().scale(&BigInt::from(-1))) };
        let ker = kernel(&system);
        let gens: Vec<Vec<BigInt>> = ker.iter().map(|v| self.combination(&v[..k])).collect();
        Self::from_generators(self.ambient, &gens)
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(n={}, {:?})", self.ambient, self.basis())
    }
}

/// Invariant factors of `sup / sub`; errors if `sub ⊄ sup`.
pub fn lattice_quotient(sup: &Lattice, sub: &Lattice) -> Result<ElementaryDivisors> {
    Ok(Quotient::new(sup, sub)?.divisors().clone())
}

/// A presentation of `sup / sub` adapted to its Smith form.
///
/// Writing `C` for the coordinates of `sub` in the basis of `sup` and
/// `U·C·V = D`, the class of `x ∈ sup` has coordinates `U·coords(x)` reduced
/// modulo the diagonal of `D`.
#[derive(Clone, Debug)]
pub struct Quotient {
    sup: Lattice,
    sub: Lattice,
    divisors: ElementaryDivisors,
    u: IntegerMatrix,
    u_inv: IntegerMatrix,
}

impl Quotient {
    pub fn new(sup: &Lattice, sub: &Lattice) -> Result<Self> {
        if sup.ambient() != sub.ambient() {
            return Err(Error::Dimension("quotient of lattices in different ambients".into()));
        }
        let k = sup.rank();
        let mut coords = Vec::with_capacity(sub.rank());
        for (j, g) in sub.basis_vectors().iter().enumerate() {
            coords.push(sup.coordinates(g).ok_or(Error::NotSublattice { column: j })?);
        }
        let c = IntegerMatrix::from_columns(k, &coords);
        let (diag, u) = if c.cols() == 0 {
            (vec![BigInt::zero(); k], IntegerMatrix::identity(k))
        } else {
            let s = snf(&c);
            let mut d = s.diagonal.clone();
            d.resize(k, BigInt::zero());
            (d, s.u)
        };
        let (h, u_inv_t, _) = row_hnf(&u);
        debug_assert_eq!(h, IntegerMatrix::identity(k));
        Ok(Quotient { sup: sup.clone(), sub: sub.clone(), divisors: ElementaryDivisors::new(diag), u, u_inv: u_inv_t })
    }

    pub fn sup(&self) -> &Lattice {
        &self.sup
    }

    pub fn sub(&self) -> &Lattice {
        &self.sub
    }

    pub fn divisors(&self) -> &ElementaryDivisors {
        &self.divisors
    }

    pub fn is_finite(&self) -> bool {
        !self.divisors.is_free()
    }

    /// Positions of the nontrivial summands.
    pub fn support(&self) -> Vec<usize> {
        self.divisors.all().iter().enumerate().filter(|(_, d)| !d.is_one()).map(|(i, _)| i).collect()
    }

    /// Full Smith coordinates of the class of `x`, reduced into `[0, d_j)`.
    pub fn class_of(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.sup.coordinates(x)?;
        let mut out = self.u.mul_vec(&c);
        for (o, d) in out.iter_mut().zip(self.divisors.all()) {
            if !d.is_zero() {
                *o = o.mod_floor(d);
            }
        }
        Some(out)
    }

    /// Ambient representative of the `j`-th Smith generator.
    pub fn generator(&self, j: usize) -> Vec<BigInt> {
        let col = self.u_inv.column(j);
        self.sup.combination(&col)
    }

    /// Order of the quotient, `None` if infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.divisors.order()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn quotient_examples() {
        let full = Lattice::full(2);
        let two = Lattice::scalar(2, &BigInt::from(2));
        assert_eq!(lattice_quotient(&full, &two).unwrap().nontrivial(), v(&[2, 2]));
        let split = Lattice::from_generators(2, &[v(&[1, 0]), v(&[0, 9])]);
        assert_eq!(lattice_quotient(&full, &split).unwrap().nontrivial(), v(&[9]));
        let skew = Lattice::from_generators(2, &[v(&[2, 0]), v(&[1, 3])]);
        assert_eq!(lattice_quotient(&full, &skew).unwrap().nontrivial(), v(&[6]));
        assert!(lattice_quotient(&skew, &skew).unwrap().nontrivial().is_empty());
        assert_eq!(lattice_quotient(&two, &full).unwrap_err(), Error::NotSublattice { column: 0 });
    }

    #[test]
    fn intersection_and_preimage() {
        let a = Lattice::from_generators(2, &[v(&[2, 0]), v(&[0, 1])]);
        let b = Lattice::from_generators(2, &[v(&[1, 0]), v(&[0, 3])]);
        let i = a.intersect(&b);
        assert_eq!(i, Lattice::from_generators(2, &[v(&[2, 0]), v(&[0, 3])]));
        // {x : 4x ∈ 6Z} = 3Z
        let m = IntegerMatrix::from_i64(&[&[4]]);
        let pre = Lattice::full(1).preimage(&m, &Lattice::scalar(1, &BigInt::from(6)));
        assert_eq!(pre, Lattice::scalar(1, &BigInt::from(3)));
    }

    #[test]
    fn quotient_classes() {
        let sup = Lattice::full(2);
        let sub = Lattice::from_generators(2, &[v(&[2, 0]), v(&[1, 3])]);
        let q = Quotient::new(&sup, &sub).unwrap();
        assert_eq!(q.order(), Some(BigInt::from(6)));
        for g in sub.basis_vectors() {
            assert!(q.class_of(g).unwrap().iter().all(Zero::is_zero));
        }
        let j = q.support()[0];
        let gen = q.generator(j);
        let c = q.class_of(&gen).unwrap();
        assert!(c[j].is_one());
    }
}
