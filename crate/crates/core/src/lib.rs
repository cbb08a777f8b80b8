//! Exact construction of saturated de Rham–Witt complexes with coefficients in
//! unit-root F-crystals, for F_p-algebras with a (Laurent) polynomial lift.

pub mod error;
pub mod crystal;
pub mod derham;
pub mod dieudonne;
pub mod drw;
pub mod exactalg;
pub mod witt;

pub use error::{Error, Result};
