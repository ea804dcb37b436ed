//! Contraction iterations, the connection `D`, the conjugation `Q` and the
//! resulting star product.

mod fedosov;
mod fixed_point;

pub use fedosov::{
    apply_d, apply_q, apply_q_inverse, product_of_lifts, quantize, quantize_series, solve_r, star,
    FedosovConnection, StarExpansion,
};
pub use fixed_point::{fixed_point_solve, neumann_solve, Filtered, FixedPoint};

use thiserror::Error;

use crate::diagnostics::Check;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("iteration is not contracting; first differing degrees per step: {trace:?}")]
    NonContracting { trace: Vec<u32> },
    #[error("Weyl degree {dmax} cannot carry ħ^{n_hbar}; need at least max(2, 2·N)")]
    Truncation { n_hbar: u32, dmax: u32 },
    #[error("{}: {}", .0.name, .0.detail)]
    Identity(Check),
}
