//! The truncated Weyl algebra `W(E) ⊗ ∧E*` with its product, grading and the
//! operators `d`, `∂` and `δ`.

mod element;
mod ops;

pub use element::{
    s_decompose, wedge_left_sign, wedge_sign, SComponent, WeylElement, WeylKey, WeylSpace,
};
pub use ops::{
    ad_over_hbar, checked_weyl_product, commutator, op_d, op_delta, op_partial, weyl_product,
    FormMatrix, WeylError,
};
