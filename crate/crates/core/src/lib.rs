//! Exact Frobenius-semilinear invariants of hyperelliptic curves in odd
//! characteristic: Cartier operators, Hasse-Witt matrices, Čech cohomology of
//! bundles given by cocycles, Frobenius-invariant towers and
//! stratified-cohomology dimensions.

pub mod algebra;
pub mod cartier;
pub mod cech;
pub mod cli;
pub mod curve;
pub mod error;
pub mod semilinear;
pub mod stratcoh;
pub mod tower;

pub use error::{Error, Result};
