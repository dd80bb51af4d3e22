//! The two-chart hyperelliptic model, its function ring and differentials.

pub mod function;
pub mod model;
pub mod residue;

pub use function::{chart_membership, fn_mul, Chart, ChartFunction, DifferentialCoeff};
pub use model::{curve_validate, genus2_char3_delta, CurveModel, CurveSpec};
pub use residue::{residue_at_infinity, residue_at_o};
