//! p-typical Witt vectors, their divided powers on the V-ideal, and the
//! δ-ring lift map.

mod expr;
mod laws;
mod vector;

pub use expr::{eval_witt_expr, eval_witt_expr_in, expression_variables};
pub use laws::{cache_dir, universal_laws, LawPolynomial, UniversalWittLaws};
pub use vector::{delta_lift, GhostVector, WittVector};
