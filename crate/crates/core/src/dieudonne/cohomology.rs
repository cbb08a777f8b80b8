//! Finite abelian groups presented as `Z^n / diag(d)` and subquotients of them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::exactalg::{ElementaryDivisors, IntegerMatrix, Lattice, Quotient};

/// Relation lattice `diag(divisors) · Z^n`.
pub fn relations(divisors: &[BigInt]) -> Lattice {
    let n = divisors.len();
    let gens: Vec<Vec<BigInt>> = divisors
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut v = vec![BigInt::zero(); n];
            v[i] = d.clone();
            v
        })
        .collect();
    Lattice::from_generators(n, &gens)
}

/// Reduces each coordinate modulo its divisor.
pub fn reduce(v: &mut [BigInt], divisors: &[BigInt]) {
    for (x, d) in v.iter_mut().zip(divisors) {
        if !d.is_zero() {
            *x = x.mod_floor(d);
        }
    }
}

/// `a = b` as maps into `Z^n / diag(divisors)`.
pub fn maps_equal(a: &IntegerMatrix, b: &IntegerMatrix, divisors: &[BigInt]) -> bool {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return false;
    }
    let diff = a.sub(b);
    (0..diff.cols()).all(|j| {
        let mut c = diff.column(j);
        reduce(&mut c, divisors);
        c.iter().all(Zero::is_zero)
    })
}

/// First column where `a` and `b` differ modulo the target relations.
pub fn first_difference(a: &IntegerMatrix, b: &IntegerMatrix, divisors: &[BigInt]) -> Option<usize> {
    let diff = a.sub(b);
    (0..diff.cols()).find(|&j| {
        let mut c = diff.column(j);
        reduce(&mut c, divisors);
        c.iter().any(|x| !x.is_zero())
    })
}

pub fn is_surjective(m: &IntegerMatrix, target: &[BigInt]) -> bool {
    let n = target.len();
    if n == 0 {
        return true;
    }
    let span = if m.cols() == 0 { Lattice::zero(n) } else { Lattice::column_span(m) };
    span.sum(&relations(target)) == Lattice::full(n)
}

/// Elements of the source killed by `m`, as a lattice containing the source relations.
pub fn kernel(m: &IntegerMatrix, target: &[BigInt]) -> Lattice {
    let n = m.cols();
    if m.rows() == 0 {
        return Lattice::full(n);
    }
    Lattice::full(n).preimage(m, &relations(target))
}

/// A subquotient `cycles / boundaries` of some `Z^n`.
#[derive(Clone, Debug)]
pub struct Homology {
    pub cycles: Lattice,
    pub boundaries: Lattice,
    pub quotient: Quotient,
}

impl Homology {
    /// Homology at the middle of `A --d_in--> B --d_out--> C`, where `B` and `C`
    /// carry relation lattices `rel_mid`, `rel_out`.
    pub fn at(d_in: &IntegerMatrix, d_out: &IntegerMatrix, rel_mid: &Lattice, rel_out: &Lattice) -> Result<Self> {
        let n = rel_mid.ambient();
        let cycles = if d_out.rows() == 0 || n == 0 { Lattice::full(n) } else { Lattice::full(n).preimage(d_out, rel_out) };
        let mut boundaries = rel_mid.clone();
        if d_in.cols() > 0 && n > 0 {
            boundaries = boundaries.sum(&Lattice::column_span(d_in));
        }
        let quotient = Quotient::new(&cycles, &boundaries)?;
        Ok(Homology { cycles, boundaries, quotient })
    }

    pub fn divisors(&self) -> &ElementaryDivisors {
        self.quotient.divisors()
    }

    /// Whether `f` (on the ambient lattices) induces an isomorphism `self → other`.
    pub fn induced_iso(&self, other: &Homology, f: &IntegerMatrix) -> std::result::Result<(), String> {
        let n = self.cycles.ambient();
        if f.cols() != n || f.rows() != other.cycles.ambient() {
            return Err("map has the wrong shape".into());
        }
        let image_of = |l: &Lattice| {
            if l.is_zero() || f.rows() == 0 {
                Lattice::zero(f.rows())
            } else {
                l.image(f)
            }
        };
        if !other.cycles.contains_lattice(&image_of(&self.cycles)) {
            return Err("a cycle maps outside the cycles".into());
        }
        if !other.boundaries.contains_lattice(&image_of(&self.boundaries)) {
            return Err("a boundary maps outside the boundaries".into());
        }
        if !self.divisors().same_group(other.divisors()) {
            return Err(format!("groups differ: {} vs {}", self.divisors(), other.divisors()));
        }
        if image_of(&self.cycles).sum(&other.boundaries) != other.cycles {
            return Err("induced map is not surjective".into());
        }
        Ok(())
    }
}

/// `H^i` of a complex of free modules reduced modulo `modulus`, at the block
/// with differentials `d_in: (i-1) → i` and `d_out: i → (i+1)`.
pub fn cohomology_mod(d_in: &IntegerMatrix, d_out: &IntegerMatrix, n: usize, modulus: &BigInt) -> Result<Homology> {
    let rel_mid = Lattice::scalar(n, modulus);
    let rel_out = Lattice::scalar(d_out.rows(), modulus);
    Homology::at(d_in, d_out, &rel_mid, &rel_out)
}

/// Every entry divides `p^s`.
pub fn annihilated_by(divisors: &[BigInt], bound: &BigInt) -> bool {
    divisors.iter().all(|d| !d.is_zero() && bound.is_multiple_of(d))
}

pub fn is_unit_divisors(divisors: &[BigInt]) -> bool {
    divisors.iter().all(One::is_one)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn de_rham_mod_four() {
        // d(x^n) = n x^{n-1} dx on Z/4[x]; the block of x^{n-1}dx has H^1 = coker(n)
        let four = BigInt::from(4);
        for (n, expect) in [(2i64, vec![2u64]), (4, vec![4]), (3, vec![])] {
            let d = IntegerMatrix::from_i64(&[&[n]]);
            let h = cohomology_mod(&d, &IntegerMatrix::zeros(0, 1), 1, &four).unwrap();
            assert_eq!(h.divisors().nontrivial(), ElementaryDivisors::from_u64(&expect).nontrivial());
        }
        let h0 = cohomology_mod(&IntegerMatrix::zeros(1, 0), &IntegerMatrix::zeros(0, 1), 1, &four).unwrap();
        assert_eq!(h0.divisors().nontrivial(), vec![four]);
    }

    #[test]
    fn acyclic_identity() {
        let id = IntegerMatrix::identity(2);
        let m = BigInt::from(9);
        let h0 = cohomology_mod(&IntegerMatrix::zeros(2, 0), &id, 2, &m).unwrap();
        let h1 = cohomology_mod(&id, &IntegerMatrix::zeros(0, 2), 2, &m).unwrap();
        assert!(h0.divisors().is_trivial() && h1.divisors().is_trivial());
    }
}
