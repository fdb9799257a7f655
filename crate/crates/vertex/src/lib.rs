//! Symbolic free-field vertex algebra engine and the algebraic checks built
//! on it.

pub mod coeff;
pub mod field;
pub mod ope;

pub use coeff::CoeffFn;
pub use field::{Factor, Field, Gen, Momentum};
pub use ope::{expand, normal_product, ope, residue_action, Laurent, OpeError};
pub mod checks;
