//! Dense complex linear algebra and quadrature primitives.

mod expm;
mod lu;
mod matrix;
mod norm;
mod quadrature;

pub use expm::mat_exp;
pub use lu::{checked_inverse, solve_linear, solve_linear_capped, Lu, DEFAULT_CONDITION_CAP};
pub use matrix::{Matrix, Vector, C64};
pub use norm::{hermitian_eigenvalues, log_norm, op_norm};
pub use quadrature::{quadrature_weights, Topology};
