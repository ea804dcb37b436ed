//! Browser bindings for the Fedosov star-product pipeline.
//!
//! Every function takes a job config as JSON text and returns the report as JSON text.

use fedosov_core::cli::{quantize_job, star_job, validate, JobConfig, Options, Report};
use wasm_bindgen::prelude::*;

fn run(config: &str, job: impl FnOnce(&JobConfig) -> Report) -> String {
    match JobConfig::from_json(config) {
        Ok(c) => job(&c).to_json(),
        Err(e) => Report::new("parse").finish(Err(e)).to_json(),
    }
}

/// Jacobi identity and nondegeneracy of the configured bracket.
#[wasm_bindgen]
pub fn validate_config(config: &str) -> String {
    run(config, |c| validate(c, &Options::default()))
}

/// Coefficients of `a ∗ b` through the configured ħ order.
#[wasm_bindgen]
pub fn star_expand(config: &str, a: &str, b: &str) -> String {
    run(config, |c| star_job(c, a, b, &Options::default()))
}

/// The flat section lifting `expr` into the Weyl bundle.
#[wasm_bindgen]
pub fn lift(config: &str, expr: &str) -> String {
    let opts = Options {
        dump: vec![format!("tau:{expr}")],
        ..Options::default()
    };
    run(config, |c| quantize_job(c, None, &opts))
}
