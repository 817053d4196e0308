//! Cohomological support varieties of DG modules over exterior algebras and
//! Koszul complexes, with exact Gröbner-basis machinery underneath.

pub mod bgg;
pub mod extdg;
pub mod koszul;
pub mod linalg;
pub mod modengine;
pub mod polyring;
pub mod random;
pub mod scalars;
pub mod varieties;

pub use scalars::{Field, Scalar, ScalarError};
