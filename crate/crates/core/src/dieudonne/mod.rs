//! Saturation of torsion-free Dieudonné complexes and their `W_r` towers.
//!
//! `Sat(M)` is the colimit of `M → η_p M → η_p² M → …` along `α_F = p^i F`.
//! An element is a pair `(k, x)` with `x` in the stage-`k` lattice, and
//! `(k, x) ≡ (k+1, α_F x)`. A representative at ambient weight `w` and stage
//! `k` has true weight `w / p^k`. On representatives `F(k, x) = (k, Fx)`,
//! `d(k, x) = (k, dx)` and `V(k, x) = (k+1, p^{i+1} x)`.

mod axioms;
pub mod cohomology;
mod saturation;
mod source;
mod tower;
mod weight;

pub use axioms::{tower_axioms_check, AxiomReport, AXIOMS};
pub use saturation::{Saturation, SaturationParams};
pub use source::{alpha_f, eta_p, GradedSource, WeightGradedComplex};
pub use tower::{LevelBlock, Op, Slot, Tower, TowerLevel};
pub use weight::TrueWeight;

use std::sync::Arc;

use crate::crystal::Window;
use crate::error::Result;

/// Saturates `source` on `window` and extracts levels `1..=r_max`.
pub fn build_tower(source: Arc<dyn GradedSource>, window: Window, r_max: u32, params: SaturationParams) -> Result<Tower> {
    let sat = Arc::new(Saturation::new(source, window, params)?);
    Tower::build(sat, r_max)
}
