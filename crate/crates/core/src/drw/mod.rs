//! The tower `W_r Ω*_{R,E}` with its structure maps `λ_r` and the action of
//! the trivial-coefficient tower, plus the comparison checks.

mod checks;
mod export;
mod fault;
pub mod suites;

pub use checks::{
    alpha_f_check, lambda_check, localization_check, module_check, rho_check, run_level_checks, witt_ground_truth, CheckReport, CheckStats,
};
pub use export::{cohomology_table, to_csv, to_json, CohomologyEntry};
pub use fault::Fault;

use std::sync::Arc;

use num_bigint::BigInt;

use crate::crystal::{CoefficientComplex, Crystal, UnitRootCrystalData, Window};
use crate::derham::DifferentialForm;
use crate::dieudonne::{GradedSource, Op, Saturation, SaturationParams, Slot, Tower, TrueWeight};
use crate::error::{Error, Result};
use crate::exactalg::IntegerMatrix;

/// Build parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DrwParams {
    pub r_max: u32,
    pub window: Window,
    pub k_max: usize,
    pub confirm: usize,
    /// Largest denominator exponent of fractional weights; defaults to `r_max`.
    pub max_exp: u32,
    pub strict: bool,
}

impl DrwParams {
    pub fn new(r_max: u32, window: Window) -> Self {
        let s = SaturationParams::for_level(r_max);
        DrwParams { r_max, window, k_max: s.k_max, confirm: s.confirm, max_exp: s.max_exp, strict: false }
    }

    fn saturation(&self) -> SaturationParams {
        SaturationParams { k_max: self.k_max, confirm: self.confirm, max_exp: self.max_exp }
    }
}

/// Saturated de Rham-Witt tower with coefficients, built alongside the
/// trivial-coefficient tower of the same base at the same stage.
pub struct DrwTower {
    params: DrwParams,
    crystal: Crystal,
    complex: Arc<CoefficientComplex>,
    tower: Arc<Tower>,
    scalars: Arc<CoefficientComplex>,
    trivial: Arc<Tower>,
    fault: Option<Fault>,
}

impl std::fmt::Debug for DrwTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DrwTower").field("params", &self.params).field("crystal", &self.crystal).field("stage", &self.stage()).finish()
    }
}

impl DrwTower {
    pub fn build(crystal: &Crystal, params: DrwParams) -> Result<Self> {
        let complex = Arc::new(CoefficientComplex::new(crystal, params.window, None, params.strict)?);
        let sat = Arc::new(Saturation::new(complex.clone() as Arc<dyn GradedSource>, params.window, params.saturation())?);
        if crystal.rank() == 1 && crystal.is_trivial() {
            let tower = Arc::new(Tower::build(sat, params.r_max)?);
            return Ok(DrwTower {
                params,
                crystal: crystal.clone(),
                complex: complex.clone(),
                tower: tower.clone(),
                scalars: complex,
                trivial: tower,
                fault: None,
            });
        }
        let unit = UnitRootCrystalData::trivial(crystal.phi(), 1).validate()?;
        let scalars = Arc::new(CoefficientComplex::new(&unit, params.window, None, params.strict)?);
        let tsat = Arc::new(Saturation::new(scalars.clone() as Arc<dyn GradedSource>, params.window, params.saturation())?);
        let (s1, _) = sat.common_stage(params.r_max, 0)?;
        let (s2, _) = tsat.common_stage(params.r_max, 0)?;
        let stage = s1.max(s2);
        let tower = Arc::new(Tower::build_at(sat, params.r_max, stage)?);
        let trivial = Arc::new(Tower::build_at(tsat, params.r_max, tower.stage())?);
        if trivial.stage() != tower.stage() {
            return Err(Error::NotStabilized { degree: 0, weight: "common stage".into(), k_max: params.k_max });
        }
        Ok(DrwTower { params, crystal: crystal.clone(), complex, tower, scalars, trivial, fault: None })
    }

    pub fn with_fault(mut self, fault: Option<Fault>) -> Self {
        self.fault = fault;
        self
    }

    pub fn fault(&self) -> Option<Fault> {
        self.fault
    }

    pub fn params(&self) -> &DrwParams {
        &self.params
    }

    pub fn p(&self) -> u32 {
        self.crystal.p()
    }

    pub fn crystal(&self) -> &Crystal {
        &self.crystal
    }

    pub fn complex(&self) -> &CoefficientComplex {
        &self.complex
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn scalars(&self) -> &CoefficientComplex {
        &self.scalars
    }

    pub fn trivial_tower(&self) -> &Tower {
        &self.trivial
    }

    pub fn stage(&self) -> usize {
        self.tower.stage()
    }

    /// `α_F^S x`: the stage-`S` representative of `(0, x)`.
    fn lift_to_stage(&self, tower: &Tower, i: usize, w: &[i64], x: &[BigInt]) -> Result<Vec<BigInt>> {
        let sat = tower.saturation();
        let mut x = x.to_vec();
        let mut w = w.to_vec();
        for _ in 0..tower.stage() {
            x = sat.alpha(i, &w)?.mul_vec(&x);
            w.iter_mut().for_each(|c| *c *= self.p() as i64);
        }
        Ok(x)
    }

    /// `λ_r` on a vector of the coefficient complex block `(i, w)`.
    pub fn lambda_vector(&self, r: u32, i: usize, w: &[i64], x: &[BigInt]) -> Result<Vec<BigInt>> {
        if !self.params.window.contains(w) {
            return Err(Error::WindowOverflow { degree: i, weight: format!("{w:?}") });
        }
        let u = TrueWeight::integral(w);
        if self.fault == Some(Fault::DropLambda) {
            return Ok(vec![BigInt::from(0); self.tower.slot(r, i, &u).len()]);
        }
        let y = self.lift_to_stage(&self.tower, i, w, x)?;
        self.tower.class(r, i, &u, &y)
    }

    /// `λ_r(Σ e_j ⊗ parts[j])` for a homogeneous element of weight `w`.
    pub fn lambda_apply(&self, r: u32, i: usize, w: &[i64], parts: &[DifferentialForm]) -> Result<Vec<BigInt>> {
        let x = self.complex.vector_of(i, w, parts)?;
        self.lambda_vector(r, i, w, &x)
    }

    /// `λ_r` for the trivial coefficients.
    pub fn scalar_lambda(&self, r: u32, i: usize, w: &[i64], f: &DifferentialForm) -> Result<Vec<BigInt>> {
        if !self.params.window.contains(w) {
            return Err(Error::WindowOverflow { degree: i, weight: format!("{w:?}") });
        }
        let x = self.scalars.vector_of(i, w, std::slice::from_ref(f))?;
        let y = self.lift_to_stage(&self.trivial, i, w, &x)?;
        self.trivial.class(r, i, &TrueWeight::integral(w), &y)
    }

    /// Matrix of `λ_r` on block `(i, w)`: columns are images of the basis.
    pub fn lambda_matrix(&self, r: u32, i: usize, w: &[i64]) -> Result<IntegerMatrix> {
        let n = self.complex.rank(i, w);
        let rows = self.tower.slot(r, i, &TrueWeight::integral(w)).len();
        let cols = (0..n)
            .map(|j| {
                let mut e = vec![BigInt::from(0); n];
                e[j] = BigInt::from(1);
                self.lambda_vector(r, i, w, &e)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntegerMatrix::from_columns(rows, &cols))
    }

    /// `a · m` for `a` in the trivial tower block `(r, ia, ua)` and `m` in the
    /// tower block `(r, im, um)`. `None` when the product weight is outside the
    /// computed set (an error in strict mode).
    #[allow(clippy::too_many_arguments)]
    pub fn module_action(
        &self,
        r: u32,
        (ia, ua, a): (usize, &TrueWeight, &[BigInt]),
        (im, um, m): (usize, &TrueWeight, &[BigInt]),
    ) -> Result<Option<Vec<BigInt>>> {
        let p = self.p();
        let (i, u) = (ia + im, ua.add(um, p));
        match self.tower.slot(r, i, &u) {
            Slot::Zero => return Ok(Some(Vec::new())),
            Slot::Outside if self.params.strict => return Err(Error::ActionOverflow { degree: i, weight: u.format(p) }),
            Slot::Outside => return Ok(None),
            Slot::Block(_) => {}
        }
        let s = self.stage();
        let xa = self.trivial.representative(r, ia, ua, a)?;
        let xm = self.tower.representative(r, im, um, m)?;
        let wa = ua.ambient(s, p).expect("stage covers denominators");
        let wm = um.ambient(s, p).expect("stage covers denominators");
        let fa = self.scalars.element_of(ia, &wa, &xa).remove(0);
        let parts: Vec<DifferentialForm> =
            self.complex.element_of(im, &wm, &xm).iter().map(|f| fa.wedge(f)).collect::<Result<_>>()?;
        let w = u.ambient(s, p).expect("stage covers denominators");
        let x = self.complex.vector_of(i, &w, &parts)?;
        self.tower.class(r, i, &u, &x).map(Some)
    }

    /// Applies a tower operator; shorthand for [`Tower::apply`].
    pub fn apply(&self, op: Op, r: u32, i: usize, u: &TrueWeight, c: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        self.tower.apply(op, r, i, u, c)
    }
}
