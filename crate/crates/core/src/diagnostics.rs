//! Named pass/fail outcomes shared by the pipeline stages and the reports.

use serde::Serialize;

use crate::exactring::ZeroCheck;
use crate::weyl::WeylElement;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: true,
            detail: String::new(),
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: false,
            detail: detail.into(),
        }
    }

    /// Turns a vanishing test into a check; `residual` renders the offending value.
    pub fn from_zero(
        name: impl Into<String>,
        verdict: &ZeroCheck,
        residual: impl FnOnce() -> String,
    ) -> Self {
        match verdict {
            ZeroCheck::Zero => Check::pass(name),
            ZeroCheck::NonZero => Check::fail(name, format!("residual {}", residual())),
            ZeroCheck::Undetermined { known_below } => Check::fail(
                name,
                format!("undetermined: coefficients known only below degree {known_below}; increase jet_guard"),
            ),
        }
    }

    /// Vanishing of a Weyl element through filtration `max_filtration`.
    pub fn weyl_zero(
        name: impl Into<String>,
        e: &WeylElement,
        horizon: Option<u32>,
        max_filtration: u32,
    ) -> Self {
        let verdict = e.check_zero(horizon, max_filtration);
        Check::from_zero(name, &verdict, || {
            let names: Vec<String> = (1..=e.space().ring.nvars)
                .map(|i| format!("x{i}"))
                .collect();
            e.filter(|k| k.filtration() <= max_filtration)
                .render(&names)
        })
    }
}
