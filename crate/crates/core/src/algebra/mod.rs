//! Exact arithmetic: finite fields, polynomials, Laurent polynomials and
//! matrices.

pub mod field;
pub mod laurent;
pub mod matrix;
pub mod poly;

pub use field::{pth_root, Field, Fq};
pub use laurent::{frobenius_twist, laurent_mul, LaurentPoly};
pub use matrix::Matrix;
pub use poly::{Embedding, Poly};
