//! Exact classical solutions of the sourced quartic scalar field and of SU(2)
//! Yang-Mills, checked against brute-force oracles.

pub mod cumulants;
pub mod dyson;
pub mod elliptic;
pub mod error;
pub mod hierarchy;
pub mod lattice;
pub mod par;
pub mod quadrature;
pub mod scalar;
pub mod verify;
pub mod yangmills;

pub use error::{Error, Result};
