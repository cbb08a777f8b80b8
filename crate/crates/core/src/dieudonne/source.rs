use std::collections::HashMap;

use num_bigint::BigInt;

use crate::crystal::CoefficientComplex;
use crate::error::{Error, Result};
use crate::exactalg::{snf, IntegerMatrix, Lattice};

/// A torsion-free weight-graded complex with a Frobenius `F` satisfying
/// `dF = pFd`, exposed one block at a time.
pub trait GradedSource: Send + Sync {
    fn p(&self) -> u32;
    /// Number of weight components.
    fn nvars(&self) -> usize;
    fn max_degree(&self) -> usize;
    fn rank(&self, i: usize, w: &[i64]) -> usize;
    /// `d`: block `(i, w)` → block `(i+1, w)`.
    fn differential(&self, i: usize, w: &[i64]) -> Result<IntegerMatrix>;
    /// `F`: block `(i, w)` → block `(i, p·w)`.
    fn frobenius(&self, i: usize, w: &[i64]) -> Result<IntegerMatrix>;
}

impl GradedSource for CoefficientComplex {
    fn p(&self) -> u32 {
        CoefficientComplex::p(self)
    }

    fn nvars(&self) -> usize {
        CoefficientComplex::nvars(self)
    }

    fn max_degree(&self) -> usize {
        CoefficientComplex::max_degree(self)
    }

    fn rank(&self, i: usize, w: &[i64]) -> usize {
        CoefficientComplex::rank(self, i, w)
    }

    fn differential(&self, i: usize, w: &[i64]) -> Result<IntegerMatrix> {
        Ok(CoefficientComplex::differential(self, i, w))
    }

    fn frobenius(&self, i: usize, w: &[i64]) -> Result<IntegerMatrix> {
        CoefficientComplex::frobenius(self, i, w)
    }
}

/// A complex given by explicit block matrices. Blocks not listed have rank 0.
#[derive(Clone, Debug, Default)]
pub struct WeightGradedComplex {
    p: u32,
    nvars: usize,
    max_degree: usize,
    ranks: HashMap<(usize, Vec<i64>), usize>,
    d: HashMap<(usize, Vec<i64>), IntegerMatrix>,
    f: HashMap<(usize, Vec<i64>), IntegerMatrix>,
}

impl WeightGradedComplex {
    pub fn new(p: u32, nvars: usize) -> Self {
        WeightGradedComplex { p, nvars, ..Default::default() }
    }

    pub fn set_block(&mut self, i: usize, w: &[i64], rank: usize) -> &mut Self {
        self.max_degree = self.max_degree.max(i);
        self.ranks.insert((i, w.to_vec()), rank);
        self
    }

    pub fn set_differential(&mut self, i: usize, w: &[i64], m: IntegerMatrix) -> &mut Self {
        self.d.insert((i, w.to_vec()), m);
        self
    }

    pub fn set_frobenius(&mut self, i: usize, w: &[i64], m: IntegerMatrix) -> &mut Self {
        self.f.insert((i, w.to_vec()), m);
        self
    }

    /// Checks shapes, `d² = 0`, `dF = pFd` and injectivity of `F` on every listed block.
    pub fn validate(&self) -> Result<()> {
        let p = BigInt::from(self.p);
        let pw = |w: &[i64]| w.iter().map(|x| x * self.p as i64).collect::<Vec<_>>();
        for (i, w) in self.ranks.keys() {
            let (i, w) = (*i, w.as_slice());
            if w.len() != self.nvars {
                return Err(Error::NotDieudonne(format!("weight {w:?} has the wrong length")));
            }
            let d = self.differential(i, w)?;
            let f = self.frobenius(i, w)?;
            if (d.rows(), d.cols()) != (self.rank(i + 1, w), self.rank(i, w))
                || (f.rows(), f.cols()) != (self.rank(i, &pw(w)), self.rank(i, w))
            {
                return Err(Error::NotDieudonne(format!("block ({i}, {w:?}) has mismatched matrix shapes")));
            }
            if !self.differential(i + 1, w)?.mul(&d).is_zero() {
                return Err(Error::NotDieudonne(format!("d² ≠ 0 at ({i}, {w:?})")));
            }
            if self.differential(i, &pw(w))?.mul(&f) != self.frobenius(i + 1, w)?.mul(&d).scale(&p) {
                return Err(Error::NotDieudonne(format!("dF ≠ pFd at ({i}, {w:?})")));
            }
            if f.cols() > 0 && snf(&f).rank() < f.cols() {
                return Err(Error::NotDieudonne(format!("F is not injective at ({i}, {w:?})")));
            }
        }
        Ok(())
    }
}

impl GradedSource for WeightGradedComplex {
    fn p(&self) -> u32 {
        self.p
    }

    fn nvars(&self) -> usize {
        self.nvars
    }

    fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn rank(&self, i: usize, w: &[i64]) -> usize {
        self.ranks.get(&(i, w.to_vec())).copied().unwrap_or(0)
    }

    fn differential(&self, i: usize, w: &[i64]) -> Result<IntegerMatrix> {
        Ok(self.d.get(&(i, w.to_vec())).cloned().unwrap_or_else(|| IntegerMatrix::zeros(self.rank(i + 1, w), self.rank(i, w))))
    }

    fn frobenius(&self, i: usize, w: &[i64]) -> Result<IntegerMatrix> {
        let pw: Vec<i64> = w.iter().map(|x| x * self.p as i64).collect();
        Ok(self.f.get(&(i, w.to_vec())).cloned().unwrap_or_else(|| IntegerMatrix::zeros(self.rank(i, &pw), self.rank(i, w))))
    }
}

/// One step of the décalage: `η(L)^i = {x ∈ p^i L^i : dx ∈ p^{i+1} L^{i+1}}`,
/// where `d[i]` maps degree `i` to degree `i+1` and `lattices` is indexed by degree.
pub fn eta_p(p: u32, lattices: &[Lattice], d: &[IntegerMatrix]) -> Vec<Lattice> {
    let pb = BigInt::from(p);
    let mut out = Vec::with_capacity(lattices.len());
    for (i, l) in lattices.iter().enumerate() {
        let pi = num_traits::pow(pb.clone(), i);
        let scaled = l.scale(&pi);
        let next = match (lattices.get(i + 1), d.get(i)) {
            (Some(l1), Some(di)) if di.rows() > 0 => scaled.preimage(di, &l1.scale(&(&pi * &pb))),
            _ => scaled,
        };
        debug_assert!(next.contains_lattice(&l.scale(&(&pi * &pb))));
        out.push(next);
    }
    out
}

/// `α_F = p^i F` on block `(i, w)`, checked to land in `η_p` of the target
/// weight's full lattices.
pub fn alpha_f(source: &dyn GradedSource, i: usize, w: &[i64]) -> Result<IntegerMatrix> {
    let p = source.p();
    let pw: Vec<i64> = w.iter().map(|x| x * p as i64).collect();
    let alpha = source.frobenius(i, w)?.scale(&num_traits::pow(BigInt::from(p), i));
    let lattices = [Lattice::full(source.rank(i, &pw)), Lattice::full(source.rank(i + 1, &pw))];
    let target = eta_slice(p, i, &lattices, &source.differential(i, &pw)?);
    let img = Lattice::column_span(&alpha);
    if !target.contains_lattice(&img) {
        return Err(Error::ImageOutsideEta { degree: i, weight: format!("{w:?}") });
    }
    Ok(alpha)
}

/// Degree-`i` part of `η_p`, from the degree `i` and `i+1` lattices.
fn eta_slice(p: u32, i: usize, lattices: &[Lattice], d: &IntegerMatrix) -> Lattice {
    let pb = BigInt::from(p);
    let pi = num_traits::pow(pb.clone(), i);
    let scaled = lattices[0].scale(&pi);
    if d.rows() == 0 {
        return scaled;
    }
    scaled.preimage(d, &lattices[1].scale(&(&pi * &pb)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_term(d: i64) -> WeightGradedComplex {
        let mut c = WeightGradedComplex::new(3, 0);
        c.set_block(0, &[], 1).set_block(1, &[], 1).set_differential(0, &[], IntegerMatrix::from_i64(&[&[d]]));
        c
    }

    #[test]
    fn eta_examples() {
        let l = vec![Lattice::full(1), Lattice::full(1)];
        let c = two_term(3);
        let eta = eta_p(3, &l, &[c.differential(0, &[]).unwrap()]);
        assert_eq!(eta[0], Lattice::full(1));
        assert_eq!(eta[1], Lattice::scalar(1, &BigInt::from(3)));
        let c = two_term(0);
        let eta = eta_p(3, &l, &[c.differential(0, &[]).unwrap()]);
        assert_eq!(eta[0], Lattice::full(1));
        assert_eq!(eta[1], Lattice::scalar(1, &BigInt::from(3)));
        assert!(eta_p(3, &[], &[]).is_empty());
    }

    #[test]
    fn validation() {
        let mut c = WeightGradedComplex::new(2, 0);
        c.set_block(0, &[], 1).set_frobenius(0, &[], IntegerMatrix::from_i64(&[&[1]]));
        c.validate().unwrap();
        c.set_frobenius(0, &[], IntegerMatrix::from_i64(&[&[0]]));
        assert!(matches!(c.validate(), Err(Error::NotDieudonne(_))));
    }
}
