//! Matrix discrepancy for rank-one and Hermitian families: exact solvers,
//! expected characteristic polynomials, barrier certificates and frame families.

pub mod disc;
pub mod error;
pub mod frames;
pub mod gen;
pub mod linalg;
pub mod model;
pub mod rpoly;
pub mod schatten;
pub mod suite;
pub mod witness;

pub use error::{Error, Result};
