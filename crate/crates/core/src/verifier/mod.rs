//! Independent oracles and deformation-theory checks for computed star products.

mod checks;
mod oracle;
mod sample;
mod star;

pub use checks::{
    agreement_check, associativity_check, first_order_check, gauge_equivalence_check,
    hochschild_cocycle_check, jacobi_order2_check, transpose_cocycle_check, unit_check,
    AssocReport, OrderResidual,
};
pub use oracle::moyal_oracle;
pub use sample::{all_monomials, Sampler};
pub use star::{FaultyStar, FedosovStar, MoyalStar, Series, StarProduct};

use thiserror::Error;

use crate::solver::SolverError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifierError {
    #[error("Moyal oracle needs a constant Poisson matrix; entry ({row},{col}) is not constant")]
    NonConstant { row: usize, col: usize },
    #[error(transparent)]
    Solver(#[from] SolverError),
}
