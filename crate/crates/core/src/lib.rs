//! Exact deformation quantization of Poisson structures by Fedosov's method.

pub mod cli;
pub mod diagnostics;
pub mod exactring;
pub mod poisson;
pub mod solver;
pub mod verifier;
pub mod weyl;
