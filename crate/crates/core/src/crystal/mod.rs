//! Unit-root F-crystals given by explicit (connection, Frobenius) matrices
//! over a (Laurent) polynomial lift, and their de Rham complexes.
//!
//! Conventions: `∇e_j = Σ_i e_i ⊗ Θ_ij` and `φ_E(e_j) = Σ_i Φ_ij e_i`, so both
//! matrices act on column vectors of coefficients.

mod builtin;
mod complex;
mod spec;

pub use builtin::{builtin, localize, times_affine_line, BUILTINS};
pub use complex::{BasisLabel, CoefficientComplex, Window};
pub use spec::{CrystalFile, VariableSpec};

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::derham::DifferentialForm;
use crate::error::{Error, Result};
use crate::exactalg::{solve, FrobeniusLiftSpec, IntegerMatrix, LaurentPolynomial, Monomial, Ring, Variable};

/// Raw crystal data, not yet validated.
#[derive(Clone, Debug)]
pub struct UnitRootCrystalData {
    pub phi: FrobeniusLiftSpec,
    pub connection: Vec<Vec<DifferentialForm>>,
    pub frobenius: Vec<Vec<LaurentPolynomial>>,
    /// Optional weight shift of each basis vector; inferred when absent.
    pub weights: Option<Vec<Vec<i64>>>,
}

impl UnitRootCrystalData {
    pub fn rank(&self) -> usize {
        self.frobenius.len()
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.phi.ring()
    }

    pub fn p(&self) -> u32 {
        self.phi.p()
    }

    /// `Θ = 0`, `Φ = 1` of rank `m`.
    pub fn trivial(phi: &FrobeniusLiftSpec, m: usize) -> Self {
        let ring = phi.ring();
        let connection = vec![vec![DifferentialForm::zero(ring); m]; m];
        let frobenius = (0..m)
            .map(|i| (0..m).map(|j| if i == j { LaurentPolynomial::one(ring) } else { LaurentPolynomial::zero(ring) }).collect())
            .collect();
        UnitRootCrystalData { phi: phi.clone(), connection, frobenius, weights: Some(vec![vec![0; ring.nvars()]; m]) }
    }

    /// Kummer crystal on `Z[x, 1/x]` with the standard lift: `Θ = c dx/x`, `Φ = x^{c(p-1)}`.
    pub fn kummer(p: u32, c: i64) -> Self {
        let ring = Ring::integers(vec![Variable::laurent("x")]);
        Self::kummer_on(&FrobeniusLiftSpec::standard(p, &ring), 0, c).expect("x is invertible")
    }

    /// Kummer crystal in the invertible variable `var` of a larger base.
    pub fn kummer_on(phi: &FrobeniusLiftSpec, var: usize, c: i64) -> Result<Self> {
        let ring = phi.ring();
        if !ring.vars().get(var).is_some_and(|v| v.laurent) {
            return Err(Error::InvalidCrystal(format!("Kummer crystal needs an invertible variable, got index {var}")));
        }
        let n = ring.nvars();
        let mut inv = vec![0; n];
        inv[var] = -1;
        let mut theta = DifferentialForm::zero(ring);
        theta.add_term(crate::derham::IndexSet::single(var), Monomial(inv), BigInt::from(c));
        let mut e = vec![0; n];
        e[var] = c * (phi.p() as i64 - 1);
        let frob = LaurentPolynomial::monomial(ring, Monomial(e), BigInt::one());
        let mut shift = vec![0; n];
        shift[var] = c;
        Ok(UnitRootCrystalData { phi: phi.clone(), connection: vec![vec![theta]], frobenius: vec![vec![frob]], weights: Some(vec![shift]) })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.phi != other.phi {
            return Err(Error::MismatchedBase("direct summands need the same ring and Frobenius lift".into()));
        }
        let (m, n) = (self.rank(), other.rank());
        let ring = self.ring();
        let mut connection = vec![vec![DifferentialForm::zero(ring); m + n]; m + n];
        let mut frobenius = vec![vec![LaurentPolynomial::zero(ring); m + n]; m + n];
        for i in 0..m {
            for j in 0..m {
                connection[i][j] = self.connection[i][j].clone();
                frobenius[i][j] = self.frobenius[i][j].clone();
            }
        }
        for i in 0..n {
            for j in 0..n {
                connection[m + i][m + j] = other.connection[i][j].clone();
                frobenius[m + i][m + j] = other.frobenius[i][j].clone();
            }
        }
        let weights = match (&self.weights, &other.weights) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        Ok(UnitRootCrystalData { phi: self.phi.clone(), connection, frobenius, weights })
    }

    fn check_shapes(&self) -> Result<()> {
        let m = self.rank();
        let ring = self.ring();
        if m == 0 {
            return Err(Error::InvalidCrystal("rank must be positive".into()));
        }
        if ring.modulus().is_some() {
            return Err(Error::InvalidCrystal("crystal data must live over the integral lift".into()));
        }
        if self.connection.len() != m || self.connection.iter().any(|r| r.len() != m) || self.frobenius.iter().any(|r| r.len() != m)
        {
            return Err(Error::InvalidCrystal(format!("connection and Frobenius must both be {m}×{m}")));
        }
        for row in &self.connection {
            for w in row {
                if **w.ring() != **ring {
                    return Err(Error::MismatchedBase("connection entry over a different ring".into()));
                }
                if !w.is_zero() && w.degree() != Some(1) {
                    return Err(Error::InvalidCrystal(format!("connection entry {w} is not a 1-form")));
                }
            }
        }
        for row in &self.frobenius {
            for f in row {
                if **f.ring() != **ring {
                    return Err(Error::MismatchedBase("Frobenius entry over a different ring".into()));
                }
            }
        }
        if let Some(ws) = &self.weights {
            if ws.len() != m || ws.iter().any(|w| w.len() != ring.nvars()) {
                return Err(Error::InvalidCrystal("weights need one entry per basis vector and variable".into()));
            }
        }
        Ok(())
    }

    /// Checks integrability, horizontality and the unit-root condition, and
    /// determines the weight shifts.
    pub fn validate(self) -> Result<Crystal> {
        self.check_shapes()?;
        let m = self.rank();
        let ring = self.ring().clone();
        let th = &self.connection;
        let fr = &self.frobenius;
        for i in 0..m {
            for j in 0..m {
                let mut v = th[i][j].d();
                for k in 0..m {
                    v = &v + &th[i][k].wedge(&th[k][j])?;
                }
                if !v.is_zero() {
                    return Err(Error::NotIntegrable { row: i, col: j, value: v.to_string() });
                }
            }
        }
        let pulled: Vec<Vec<DifferentialForm>> =
            th.iter().map(|row| row.iter().map(|w| w.undivided_frobenius(&self.phi)).collect::<Result<_>>()).collect::<Result<_>>()?;
        for i in 0..m {
            for j in 0..m {
                let mut lhs = DifferentialForm::function(&fr[i][j]).d();
                let mut rhs = DifferentialForm::zero(&ring);
                for k in 0..m {
                    lhs = &lhs + &th[i][k].mul_function(&fr[k][j]);
                    rhs = &rhs + &pulled[k][j].mul_function(&fr[i][k]);
                }
                let diff = &lhs - &rhs;
                if !diff.is_zero() {
                    return Err(Error::NotHorizontal { row: i, col: j, value: diff.to_string() });
                }
            }
        }
        let det = determinant(fr, &ring).reduce(Some(&BigInt::from(self.p())));
        let unit = det.num_terms() == 1
            && det.terms().all(|(mono, _)| mono.0.iter().zip(ring.vars()).all(|(e, v)| *e == 0 || v.laurent));
        if !unit {
            return Err(Error::NotUnitRoot { det: det.to_string() });
        }
        let shifts = match &self.weights {
            Some(ws) => {
                check_shifts(&self, ws)?;
                Some(ws.clone())
            }
            None => infer_shifts(&self).ok(),
        };
        Ok(Crystal(Arc::new(CrystalInner { data: self, shifts })))
    }
}

struct CrystalInner {
    data: UnitRootCrystalData,
    shifts: Option<Vec<Vec<i64>>>,
}

/// A validated unit-root crystal. Cheap to clone.
#[derive(Clone)]
pub struct Crystal(Arc<CrystalInner>);

impl std::fmt::Debug for Crystal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Crystal(rank {}, p = {})", self.rank(), self.p())
    }
}

impl Crystal {
    pub fn data(&self) -> &UnitRootCrystalData {
        &self.0.data
    }

    pub fn rank(&self) -> usize {
        self.0.data.rank()
    }

    pub fn p(&self) -> u32 {
        self.0.data.p()
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.0.data.ring()
    }

    pub fn phi(&self) -> &FrobeniusLiftSpec {
        &self.0.data.phi
    }

    pub fn connection(&self, i: usize, j: usize) -> &DifferentialForm {
        &self.0.data.connection[i][j]
    }

    pub fn frobenius(&self, i: usize, j: usize) -> &LaurentPolynomial {
        &self.0.data.frobenius[i][j]
    }

    /// Weight shifts `s_j`, when the data is homogeneous.
    pub fn shifts(&self) -> Result<&[Vec<i64>]> {
        self.0.shifts.as_deref().ok_or_else(|| Error::NonHomogeneousCrystal("no weight shifts make Θ and Φ homogeneous".into()))
    }

    pub fn is_trivial(&self) -> bool {
        let d = &self.0.data;
        d.connection.iter().flatten().all(DifferentialForm::is_zero)
            && d.frobenius.iter().enumerate().all(|(i, row)| {
                row.iter().enumerate().all(|(j, f)| if i == j { f.as_constant() == Some(BigInt::one()) } else { f.is_zero() })
            })
    }
}

fn determinant(m: &[Vec<LaurentPolynomial>], ring: &Arc<Ring>) -> LaurentPolynomial {
    let n = m.len();
    if n == 0 {
        return LaurentPolynomial::one(ring);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = LaurentPolynomial::zero(ring);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<LaurentPolynomial>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, f)| f.clone()).collect()).collect();
        let term = &m[0][j] * &determinant(&minor, ring);
        det = if j % 2 == 0 { &det + &term } else { &det - &term };
    }
    det
}

/// Homogeneity equations: each term of `Θ_ij` has weight `s_j - s_i`, each
/// term of `Φ_ij` has weight `p s_j - s_i`. Returns `(coefficients of s, weight)` rows.
fn shift_equations(data: &UnitRootCrystalData) -> Vec<(Vec<i64>, Vec<i64>)> {
    let m = data.rank();
    let p = data.p() as i64;
    let mut eqs = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for (dx, mono, _) in data.connection[i][j].terms() {
                let mut row = vec![0; m];
                row[j] += 1;
                row[i] -= 1;
                eqs.push((row, DifferentialForm::term_weight(dx, mono)));
            }
            for (mono, _) in data.frobenius[i][j].terms() {
                let mut row = vec![0; m];
                row[j] += p;
                row[i] -= 1;
                eqs.push((row, mono.0.clone()));
            }
        }
    }
    eqs
}

fn check_shifts(data: &UnitRootCrystalData, shifts: &[Vec<i64>]) -> Result<()> {
    for (row, w) in shift_equations(data) {
        for (t, &wt) in w.iter().enumerate() {
            let lhs: i64 = row.iter().zip(shifts).map(|(c, s)| c * s[t]).sum();
            if lhs != wt {
                return Err(Error::NonHomogeneousCrystal(format!("declared weights are inconsistent in variable {t}")));
            }
        }
    }
    Ok(())
}

fn infer_shifts(data: &UnitRootCrystalData) -> Result<Vec<Vec<i64>>> {
    let m = data.rank();
    let n = data.ring().nvars();
    let eqs = shift_equations(data);
    let a = IntegerMatrix::from_rows(eqs.iter().map(|(r, _)| r.iter().map(|&c| BigInt::from(c)).collect()).collect())
        .map_err(|_| Error::NonHomogeneousCrystal("no equations".into()))?;
    let mut shifts = vec![vec![0; n]; m];
    for t in 0..n {
        let b: Vec<BigInt> = eqs.iter().map(|(_, w)| BigInt::from(w[t])).collect();
        let sol = solve(&a, &b).map_err(|_| Error::NonHomogeneousCrystal(format!("no integral shift in variable {t}")))?;
        for (j, s) in sol.iter().enumerate() {
            shifts[j][t] = i64::try_from(s).map_err(|_| Error::NonHomogeneousCrystal("shift too large".into()))?;
        }
    }
    // unique: p s_j = s_i along the permutation picked out by det Φ has only the zero solution
    check_shifts(data, &shifts)?;
    Ok(shifts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derham::parse_form;

    fn a1(p: u32) -> FrobeniusLiftSpec {
        FrobeniusLiftSpec::standard(p, &Ring::integers(vec![Variable::polynomial("x")]))
    }

    #[test]
    fn trivial_and_kummer_validate() {
        let t = UnitRootCrystalData::trivial(&a1(3), 2).validate().unwrap();
        assert!(t.is_trivial());
        for c in [-2, -1, 0, 1, 2] {
            for p in [2, 3] {
                let k = UnitRootCrystalData::kummer(p, c);
                let crystal = k.clone().validate().unwrap();
                assert_eq!(crystal.shifts().unwrap(), &[vec![c]]);
                let mut inferred = k;
                inferred.weights = None;
                assert_eq!(inferred.validate().unwrap().shifts().unwrap(), &[vec![c]]);
            }
        }
        let k = UnitRootCrystalData::kummer(3, 1);
        assert_eq!(k.frobenius[0][0].to_string(), "x^2");
        let k = UnitRootCrystalData::kummer(2, -1);
        assert_eq!(k.frobenius[0][0].to_string(), "x^-1");
        assert!(UnitRootCrystalData::kummer(5, 0).validate().unwrap().is_trivial());
    }

    #[test]
    fn non_horizontal_rejected() {
        let phi = a1(3);
        let mut d = UnitRootCrystalData::trivial(&phi, 1);
        d.connection[0][0] = parse_form(phi.ring(), "dx").unwrap();
        assert!(matches!(d.validate(), Err(Error::NotHorizontal { row: 0, col: 0, .. })));
    }

    #[test]
    fn non_unit_and_non_integrable_rejected() {
        let phi = a1(3);
        let mut d = UnitRootCrystalData::trivial(&phi, 1);
        d.frobenius[0][0] = LaurentPolynomial::constant(phi.ring(), BigInt::from(3));
        assert!(matches!(d.validate(), Err(Error::NotUnitRoot { .. })));
        let ring = Ring::integers(vec![Variable::polynomial("x"), Variable::polynomial("y")]);
        let phi = FrobeniusLiftSpec::standard(2, &ring);
        let mut d = UnitRootCrystalData::trivial(&phi, 1);
        d.connection[0][0] = parse_form(&ring, "x*dy").unwrap();
        assert!(matches!(d.validate(), Err(Error::NotIntegrable { .. })));
    }

    #[test]
    fn direct_sums() {
        let s = UnitRootCrystalData::kummer(3, 1).direct_sum(&UnitRootCrystalData::kummer(3, 2)).unwrap();
        assert_eq!(s.frobenius[0][0].to_string(), "x^2");
        assert_eq!(s.frobenius[1][1].to_string(), "x^4");
        assert!(s.frobenius[0][1].is_zero());
        let c = s.validate().unwrap();
        assert_eq!(c.shifts().unwrap(), &[vec![1], vec![2]]);
        let other = UnitRootCrystalData::trivial(&a1(3), 1);
        assert!(matches!(UnitRootCrystalData::kummer(3, 1).direct_sum(&other), Err(Error::MismatchedBase(_))));
    }
}
