//! Čech cohomology on the cover `{U0, U1}`: scalar `H^1(X, O)` in closed
//! form, and bundle cohomology by exact finite windows.

pub mod bundle;
pub mod fnmatrix;
pub mod h1o;

pub use bundle::{
    coordinates_in, h0_bundle, h0_omega_bundle, h1_bundle_basis, is_omega_section, BundleCocycle, CohClassE, Gauge,
    H1Bundle, Monomial,
};
pub use fnmatrix::{as_unit, FnMatrix, FnVector};
pub use h1o::{
    frobenius_matrix_h1_o, frobenius_on_h1_o, global_forms, h1_normal_form, is_coboundary, serre_pairing,
    serre_pairing_matrix, CohClassO,
};
