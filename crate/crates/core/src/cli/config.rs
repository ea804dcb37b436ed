use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::exactring::{poly_parse, BaseElement, BaseRing, Matrix};
use crate::poisson::StructureInput;

use super::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    Polynomial,
    Jet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    #[serde(rename = "type")]
    pub kind: BaseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    SymplecticCoordinates,
    ExplicitBasis,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonSpec {
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    #[serde(rename = "V")]
    pub v: Vec<Vec<String>>,
    pub phi: Vec<Vec<String>>,
    pub omega: Vec<Vec<String>>,
    /// `C[a][b][k]` with `[D_a, D_b] = Σ_k C[a][b][k] D_k`.
    #[serde(rename = "C")]
    pub c: Vec<Vec<Vec<String>>>,
}

/// One job description, read from a single JSON document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub variables: Vec<String>,
    pub base: BaseSpec,
    pub hbar_order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weyl_degree: Option<u32>,
    pub mode: ModeName,
    pub poisson: PoissonSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<ExplicitSpec>,
    #[serde(default)]
    pub seed: u64,
    /// Extra jet degrees carried beyond `max_degree`; chosen automatically when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jet_guard: Option<u32>,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: JobConfig =
            serde_json::from_str(text).map_err(|e| CliError::Parse(format!("config: {e}")))?;
        config.validate_shape()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn validate_shape(&self) -> Result<(), CliError> {
        let m = self.variables.len();
        if m == 0 {
            return Err(CliError::Parse("no variables declared".into()));
        }
        for (i, v) in self.variables.iter().enumerate() {
            let ok = v
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(CliError::Parse(format!("invalid variable name '{v}'")));
            }
            if self.variables[..i].contains(v) {
                return Err(CliError::Parse(format!("duplicate variable '{v}'")));
            }
        }
        match (self.base.kind, self.base.max_degree) {
            (BaseKind::Jet, None) => {
                return Err(CliError::Parse("jet base requires max_degree".into()))
            }
            (BaseKind::Jet, Some(0)) => {
                return Err(CliError::Parse("jet max_degree must be at least 1".into()))
            }
            _ => {}
        }
        let rows = &self.poisson.matrix;
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(CliError::Parse(format!("poisson.matrix must be {m}x{m}")));
        }
        match (self.mode, &self.explicit) {
            (ModeName::ExplicitBasis, None) => Err(CliError::Parse(
                "explicit_basis mode requires the explicit section".into(),
            )),
            (ModeName::SymplecticCoordinates, Some(_)) => Err(CliError::Parse(
                "explicit data given in symplectic_coordinates mode".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn m(&self) -> usize {
        self.variables.len()
    }

    /// Degree through which jet results are meaningful.
    pub fn horizon(&self) -> Option<u32> {
        match self.base.kind {
            BaseKind::Polynomial => None,
            BaseKind::Jet => self.base.max_degree,
        }
    }

    pub fn default_weyl_degree(&self, n_hbar: u32) -> u32 {
        self.weyl_degree.unwrap_or((2 * n_hbar).max(2))
    }

    /// The working ring for a given guard.
    pub fn ring(&self, guard: u32) -> BaseRing {
        match self.horizon() {
            None => BaseRing::polynomial(self.m()),
            Some(h) => BaseRing::jet(self.m(), h + guard),
        }
    }

    pub fn parse(&self, text: &str, ring: BaseRing) -> Result<BaseElement, CliError> {
        poly_parse(text, &self.variables, ring)
            .map_err(|e| CliError::Parse(format!("'{text}': {e}")))
    }

    fn matrix(&self, name: &str, rows: &[Vec<String>], ring: BaseRing) -> Result<Matrix, CliError> {
        let parsed = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| self.parse(s, ring))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(parsed).map_err(|e| CliError::Parse(format!("{name}: {e}")))
    }

    pub fn poisson_matrix(&self, ring: BaseRing) -> Result<Matrix, CliError> {
        self.matrix("poisson.matrix", &self.poisson.matrix, ring)
    }

    pub fn structure_input(&self, ring: BaseRing) -> Result<StructureInput, CliError> {
        let pi = self.poisson_matrix(ring)?;
        match &self.explicit {
            None => Ok(StructureInput::Symplectic { pi }),
            Some(e) => {
                let c =
                    e.c.iter()
                        .map(|row| {
                            row.iter()
                                .map(|ks| {
                                    ks.iter()
                                        .map(|s| self.parse(s, ring))
                                        .collect::<Result<Vec<_>, _>>()
                                })
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                Ok(StructureInput::Explicit {
                    pi,
                    v: self.matrix("V", &e.v, ring)?,
                    phi: self.matrix("phi", &e.phi, ring)?,
                    omega: self.matrix("omega", &e.omega, ring)?,
                    c,
                })
            }
        }
    }
}
