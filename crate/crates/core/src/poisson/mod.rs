//! Poisson structures, their Hamiltonian frame, the connection `∇` and its
//! torsion and curvature potentials.

mod connection;
mod structure;

pub use connection::{curvature, inner_potential, nabla, torsion, CurvatureData};
pub use structure::{
    bracket, build_structure, jacobi_check, JacobiReport, JacobiResidual, PoissonStructure,
    StructureInput, StructureMode,
};

use thiserror::Error;

use crate::diagnostics::Check;
use crate::exactring::RingError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PoissonError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("Poisson matrix is not skew-symmetric at {0:?}")]
    NotSkew(Vec<(usize, usize)>),
    #[error("Jacobi identity fails: {0}")]
    Jacobi(String),
    #[error("Poisson matrix is not invertible: {0}")]
    Singular(RingError),
    #[error("invalid fiber form: {0}")]
    Form(String),
    #[error("bracket-consistency violated: {0}")]
    BracketConsistency(String),
    #[error("explicit data does not induce the Poisson matrix: {0}")]
    InducedBracket(String),
    #[error("{}: {}", .0.name, .0.detail)]
    Identity(Check),
}

impl PoissonError {
    /// True for failures of internal identities (as opposed to invalid input).
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, PoissonError::Identity(_))
    }
}
