//! Numerical analysis of EP and hypo-EP operators through their finite
//! sections: Moore–Penrose pseudoinverses, range/null-space relations,
//! Douglas factorization, perturbation stability and a zoo of example
//! operators.

pub mod classify;
pub mod douglas;
pub mod error;
pub mod numlin;
pub mod opzoo;
pub mod perturb;
pub mod pinv;
pub mod random;

pub use error::{Error, Result};
pub use numlin::{DenseMatrix, TolerancePolicy};
