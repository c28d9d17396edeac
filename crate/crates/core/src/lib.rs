pub mod error;
pub mod geometry;
pub mod harness;
pub mod kernels;
pub mod linear_solvers;
pub mod material;
pub mod operators;
pub mod quadrature;
pub mod scattering;
pub mod special;

pub use error::{Error, Result};
