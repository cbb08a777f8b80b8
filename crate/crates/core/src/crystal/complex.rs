use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::Crystal;
use crate::derham::{DifferentialForm, IndexSet};
use crate::error::{Error, Result};
use crate::exactalg::{pow_big, IntegerMatrix, Monomial};

/// Closed weight interval, applied to every component of a multiweight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub min: i64,
    pub max: i64,
}

impl Window {
    pub fn new(min: i64, max: i64) -> Result<Self> {
        if min > max {
            return Err(Error::InvalidJob(format!("empty weight window [{min}, {max}]")));
        }
        Ok(Window { min, max })
    }

    pub fn contains(&self, w: &[i64]) -> bool {
        w.iter().all(|x| (self.min..=self.max).contains(x))
    }

    /// All integer multiweights of length `n` inside the window, lexicographically.
    pub fn points(&self, n: usize) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out.into_iter().flat_map(|w: Vec<i64>| (self.min..=self.max).map(move |x| [w.clone(), vec![x]].concat())).collect();
        }
        out
    }
}

/// Basis element `e_j ⊗ x^a dx_I` of a block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub j: usize,
    pub dx: IndexSet,
    pub mono: Monomial,
}

/// `E(A) ⊗ Ω*_A` split into blocks by degree and multiweight, with `∇` and the
/// divided Frobenius as integer matrices. Blocks are built on demand for any
/// weight; the window only decides which Frobenius images count as clipped.
#[derive(Clone, Debug)]
pub struct CoefficientComplex {
    crystal: Crystal,
    shifts: Vec<Vec<i64>>,
    window: Window,
    level: Option<u32>,
    strict: bool,
}

impl CoefficientComplex {
    /// `level = Some(r)` marks the complex as `dR(E(A_r))`; matrices stay integral
    /// and cohomology is taken modulo `p^r`.
    pub fn new(crystal: &Crystal, window: Window, level: Option<u32>, strict: bool) -> Result<Self> {
        let shifts = crystal.shifts()?.to_vec();
        if level == Some(0) {
            return Err(Error::InvalidJob("level must be at least 1".into()));
        }
        Ok(CoefficientComplex { crystal: crystal.clone(), shifts, window, level, strict })
    }

    pub fn crystal(&self) -> &Crystal {
        &self.crystal
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn level(&self) -> Option<u32> {
        self.level
    }

    pub fn modulus(&self) -> Option<BigInt> {
        self.level.map(|r| pow_big(self.p(), r))
    }

    pub fn p(&self) -> u32 {
        self.crystal.p()
    }

    pub fn nvars(&self) -> usize {
        self.crystal.ring().nvars()
    }

    pub fn max_degree(&self) -> usize {
        self.nvars()
    }

    pub fn shifts(&self) -> &[Vec<i64>] {
        &self.shifts
    }

    pub fn basis(&self, i: usize, w: &[i64]) -> Vec<BasisLabel> {
        let ring = self.crystal.ring();
        let n = self.nvars();
        if i > n {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (j, s) in self.shifts.iter().enumerate() {
            for dx in IndexSet::subsets(n, i) {
                let a: Vec<i64> = (0..n).map(|t| w[t] - s[t] - i64::from(dx.contains(t))).collect();
                if a.iter().zip(ring.vars()).all(|(e, v)| v.laurent || *e >= 0) {
                    out.push(BasisLabel { j, dx, mono: Monomial(a) });
                }
            }
        }
        out
    }

    pub fn rank(&self, i: usize, w: &[i64]) -> usize {
        self.basis(i, w).len()
    }

    fn index(&self, i: usize, w: &[i64]) -> HashMap<(usize, IndexSet), usize> {
        self.basis(i, w).into_iter().enumerate().map(|(k, b)| ((b.j, b.dx), k)).collect()
    }

    /// Coordinates of `Σ_j e_j ⊗ parts[j]` in block `(i, w)`.
    pub fn vector_of(&self, i: usize, w: &[i64], parts: &[DifferentialForm]) -> Result<Vec<BigInt>> {
        if parts.len() != self.crystal.rank() {
            return Err(Error::Dimension(format!("expected {} components", self.crystal.rank())));
        }
        let basis = self.basis(i, w);
        let idx = self.index(i, w);
        let mut v = vec![BigInt::zero(); basis.len()];
        for (j, form) in parts.iter().enumerate() {
            for (dx, mono, c) in form.terms() {
                let k = idx
                    .get(&(j, dx))
                    .filter(|&&k| basis[k].mono == *mono)
                    .ok_or_else(|| Error::Dimension(format!("term of component {j} is not in block ({i}, {w:?})")))?;
                v[*k] += c;
            }
        }
        Ok(v)
    }

    /// Inverse of [`vector_of`](Self::vector_of).
    pub fn element_of(&self, i: usize, w: &[i64], v: &[BigInt]) -> Vec<DifferentialForm> {
        let ring = self.crystal.ring();
        let mut parts = vec![DifferentialForm::zero(ring); self.crystal.rank()];
        for (b, c) in self.basis(i, w).into_iter().zip(v) {
            if !c.is_zero() {
                parts[b.j].add_term(b.dx, b.mono, c.clone());
            }
        }
        parts
    }

    fn to_column(&self, i: usize, w: &[i64], parts: &[DifferentialForm]) -> Vec<BigInt> {
        self.vector_of(i, w, parts).expect("operators preserve homogeneity")
    }

    /// `∇` applied to `Σ e_j ⊗ parts[j]`.
    pub fn nabla(&self, parts: &[DifferentialForm]) -> Result<Vec<DifferentialForm>> {
        let m = self.crystal.rank();
        let ring = self.crystal.ring();
        let mut out: Vec<DifferentialForm> = parts.iter().map(DifferentialForm::d).collect();
        for (j, w) in parts.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate().take(m) {
                let th = self.crystal.connection(k, j);
                if !th.is_zero() {
                    *o = &*o + &th.wedge(w)?;
                }
            }
        }
        debug_assert!(out.iter().all(|f| **f.ring() == **ring));
        Ok(out)
    }

    /// Divided Frobenius `F(e_j ⊗ ω) = Σ_k e_k ⊗ Φ_kj F(ω)`.
    pub fn divided_frobenius(&self, parts: &[DifferentialForm]) -> Result<Vec<DifferentialForm>> {
        let ring = self.crystal.ring();
        let phi = self.crystal.phi();
        let mut out = vec![DifferentialForm::zero(ring); self.crystal.rank()];
        for (j, w) in parts.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let fw = w.divided_frobenius(phi)?;
            for (k, o) in out.iter_mut().enumerate() {
                let f = self.crystal.frobenius(k, j);
                if !f.is_zero() {
                    *o = &*o + &fw.mul_function(f);
                }
            }
        }
        Ok(out)
    }

    /// Undivided Frobenius `φ_E ⊗ φ*`, equal to `p^i F` in degree `i`.
    pub fn undivided_frobenius(&self, parts: &[DifferentialForm]) -> Result<Vec<DifferentialForm>> {
        let ring = self.crystal.ring();
        let phi = self.crystal.phi();
        let mut out = vec![DifferentialForm::zero(ring); self.crystal.rank()];
        for (j, w) in parts.iter().enumerate() {
            let fw = w.undivided_frobenius(phi)?;
            for (k, o) in out.iter_mut().enumerate() {
                *o = &*o + &fw.mul_function(self.crystal.frobenius(k, j));
            }
        }
        Ok(out)
    }

    /// `∇`: block `(i, w)` → block `(i+1, w)`.
    pub fn differential(&self, i: usize, w: &[i64]) -> IntegerMatrix {
        let ring = self.crystal.ring();
        let src = self.basis(i, w);
        let rows = self.rank(i + 1, w);
        let cols: Vec<Vec<BigInt>> = src
            .iter()
            .map(|b| {
                let mut parts = vec![DifferentialForm::zero(ring); self.crystal.rank()];
                parts[b.j] = DifferentialForm::term(ring, b.dx, b.mono.clone(), BigInt::from(1));
                let img = self.nabla(&parts).expect("wedge within ring");
                self.to_column(i + 1, w, &img)
            })
            .collect();
        IntegerMatrix::from_columns(rows, &cols)
    }

    /// Divided Frobenius: block `(i, w)` → block `(i, p·w)`. Needs a graded lift.
    pub fn frobenius(&self, i: usize, w: &[i64]) -> Result<IntegerMatrix> {
        if !self.crystal.phi().is_graded() {
            return Err(Error::NonGradedLift("the Frobenius lift does not preserve the weight grading".into()));
        }
        let ring = self.crystal.ring();
        let p = self.p() as i64;
        let target: Vec<i64> = w.iter().map(|x| x * p).collect();
        let src = self.basis(i, w);
        let rows = self.rank(i, &target);
        let mut cols = Vec::with_capacity(src.len());
        for b in &src {
            let mut parts = vec![DifferentialForm::zero(ring); self.crystal.rank()];
            parts[b.j] = DifferentialForm::term(ring, b.dx, b.mono.clone(), BigInt::from(1));
            let img = self.divided_frobenius(&parts)?;
            cols.push(self.to_column(i, &target, &img));
        }
        Ok(IntegerMatrix::from_columns(rows, &cols))
    }

    /// Frobenius of a window block, flagging (or in strict mode rejecting)
    /// images whose weight leaves the window.
    pub fn frobenius_in_window(&self, i: usize, w: &[i64]) -> Result<(IntegerMatrix, bool)> {
        let p = self.p() as i64;
        let target: Vec<i64> = w.iter().map(|x| x * p).collect();
        let clipped = !self.window.contains(&target) && self.rank(i, w) > 0;
        if clipped && self.strict {
            return Err(Error::WindowOverflow { degree: i, weight: format!("{target:?}") });
        }
        Ok((self.frobenius(i, w)?, clipped))
    }

    /// Window blocks with nonzero rank, ordered by weight then degree.
    pub fn blocks(&self) -> Vec<(usize, Vec<i64>)> {
        let mut out = Vec::new();
        for w in self.window.points(self.nvars()) {
            for i in 0..=self.max_degree() {
                if self.rank(i, &w) > 0 {
                    out.push((i, w.clone()));
                }
            }
        }
        out
    }

    /// Checks `∇² = 0` and `∇F = pF∇` on every window block.
    pub fn check_invariants(&self) -> Result<()> {
        let p = BigInt::from(self.p());
        for (i, w) in self.blocks() {
            let d0 = self.differential(i, &w);
            let d1 = self.differential(i + 1, &w);
            if !d1.mul(&d0).is_zero() {
                return Err(Error::NotDieudonne(format!("∇² ≠ 0 on block ({i}, {w:?})")));
            }
            let pw: Vec<i64> = w.iter().map(|x| x * self.p() as i64).collect();
            let f0 = self.frobenius(i, &w)?;
            let f1 = self.frobenius(i + 1, &w)?;
            let lhs = self.differential(i, &pw).mul(&f0);
            let rhs = f1.mul(&d0).scale(&p);
            if lhs != rhs {
                return Err(Error::NotDieudonne(format!("∇F ≠ pF∇ on block ({i}, {w:?})")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crystal::UnitRootCrystalData;
    use crate::derham::parse_form;
    use crate::exactalg::{FrobeniusLiftSpec, Ring, Variable};

    #[test]
    fn trivial_crystal_is_plain_de_rham() {
        let ring = Ring::integers(vec![Variable::polynomial("x")]);
        let phi = FrobeniusLiftSpec::standard(3, &ring);
        let c = UnitRootCrystalData::trivial(&phi, 1).validate().unwrap();
        let cc = CoefficientComplex::new(&c, Window::new(0, 3).unwrap(), None, false).unwrap();
        assert_eq!(cc.rank(0, &[0]), 1);
        assert_eq!(cc.rank(1, &[0]), 0);
        assert_eq!(cc.rank(1, &[2]), 1);
        // d(x^2) = 2 x dx
        assert_eq!(cc.differential(0, &[2]), IntegerMatrix::from_i64(&[&[2]]));
        // F(dx) = x^2 dx
        let v = cc.vector_of(1, &[1], &[parse_form(&ring, "dx").unwrap()]).unwrap();
        let f = cc.frobenius(1, &[1]).unwrap();
        let img = cc.element_of(1, &[3], &f.mul_vec(&v));
        assert_eq!(img[0], parse_form(&ring, "x^2*dx").unwrap());
        cc.check_invariants().unwrap();
        assert_eq!(cc.blocks().len(), 7);
    }

    #[test]
    fn kummer_differential() {
        for c in [-2i64, -1, 1, 2] {
            let k = UnitRootCrystalData::kummer(3, c).validate().unwrap();
            let cc = CoefficientComplex::new(&k, Window::new(-4, 4).unwrap(), Some(2), false).unwrap();
            for n in -4i64..=4 {
                // e ⊗ x^n lives in weight n + c, and ∇ multiplies by (n + c)
                let d = cc.differential(0, &[n + c]);
                assert_eq!(d, IntegerMatrix::from_i64(&[&[n + c]]));
            }
            cc.check_invariants().unwrap();
        }
    }

    #[test]
    fn strict_window_overflow() {
        let k = UnitRootCrystalData::kummer(2, 1).validate().unwrap();
        let cc = CoefficientComplex::new(&k, Window::new(-2, 2).unwrap(), None, true).unwrap();
        assert!(cc.frobenius_in_window(0, &[1]).is_ok());
        assert!(matches!(cc.frobenius_in_window(0, &[2]), Err(Error::WindowOverflow { .. })));
        let tolerant = CoefficientComplex::new(&k, Window::new(-2, 2).unwrap(), None, false).unwrap();
        assert!(tolerant.frobenius_in_window(0, &[2]).unwrap().1);
    }
}
