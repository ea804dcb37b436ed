use crate::exactring::{BaseElement, BaseRing, Matrix, ZeroCheck};
use crate::weyl::FormMatrix;

use super::PoissonError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureMode {
    SymplecticCoordinates,
    ExplicitBasis,
}

/// Raw data a structure is built from.
#[derive(Clone, Debug)]
pub enum StructureInput {
    /// Nondegenerate `π`; the frame is `D_a = f(x_a, ·)`.
    Symplectic { pi: Matrix },
    /// A user-supplied frame `D_a = Σ_j V_aj ∂_j` with its form and
    /// structure functions `c[a][b][k]`.
    Explicit {
        pi: Matrix,
        v: Matrix,
        phi: Matrix,
        omega: Matrix,
        c: Vec<Vec<Vec<BaseElement>>>,
    },
}

/// A validated Poisson structure together with its Hamiltonian frame.
#[derive(Clone, Debug)]
pub struct PoissonStructure {
    pub m: usize,
    pub n: usize,
    pub mode: StructureMode,
    pub pi: Matrix,
    pub v: Matrix,
    pub fm: FormMatrix,
    /// `c[a][b][k]` with `[D_a, D_b] = Σ_k c_ab^k D_k`.
    pub c: Vec<Vec<Vec<BaseElement>>>,
    /// Degree through which jet identities are checked; `None` for polynomials.
    pub horizon: Option<u32>,
}

impl PoissonStructure {
    pub fn ring(&self) -> BaseRing {
        self.pi.ring().expect("nonempty Poisson matrix")
    }

    /// `D_a f = Σ_j V_aj ∂_j f`.
    pub fn derive(&self, a: usize, f: &BaseElement) -> BaseElement {
        let mut out = self.ring().zero();
        for j in 0..self.m {
            let v = self.v.get(a, j);
            if v.is_zero() && v.precision().is_none() {
                continue;
            }
            out += &(v * &f.partial(j));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiResidual {
    /// One-based variable indices `i < j < k`.
    pub indices: [usize; 3],
    pub value: BaseElement,
    pub verdict: ZeroCheck,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiReport {
    pub pass: bool,
    /// Triples whose cyclic sum does not vanish.
    pub residuals: Vec<JacobiResidual>,
}

/// `f(a, b) = Σ π^{ij} ∂_i a ∂_j b`.
pub fn bracket(pi: &Matrix, a: &BaseElement, b: &BaseElement) -> BaseElement {
    let m = pi.rows();
    let ring = a.ring();
    let da: Vec<_> = (0..m).map(|i| a.partial(i)).collect();
    let db: Vec<_> = (0..m).map(|j| b.partial(j)).collect();
    let mut out = ring.zero();
    for i in 0..m {
        if da[i].is_zero() && da[i].precision().is_none() {
            continue;
        }
        for j in 0..m {
            let p = pi.get(i, j);
            if p.is_zero() && p.precision().is_none() {
                continue;
            }
            out += &(&(p * &da[i]) * &db[j]);
        }
    }
    out
}

/// Cyclic sums `Σ_l (π^{il}∂_l π^{jk} + π^{jl}∂_l π^{ki} + π^{kl}∂_l π^{ij})`.
pub fn jacobi_check(pi: &Matrix, horizon: Option<u32>) -> Result<JacobiReport, PoissonError> {
    if !pi.is_square() {
        return Err(PoissonError::Shape(format!(
            "Poisson matrix is {}x{}",
            pi.rows(),
            pi.cols()
        )));
    }
    let defects = pi.skew_defects();
    if !defects.is_empty() {
        return Err(PoissonError::NotSkew(
            defects.into_iter().map(|(i, j)| (i + 1, j + 1)).collect(),
        ));
    }
    let m = pi.rows();
    let term = |i: usize, j: usize, k: usize| {
        let mut acc = pi.get(0, 0).ring().zero();
        for l in 0..m {
            acc += &(pi.get(i, l) * &pi.get(j, k).partial(l));
        }
        acc
    };
    let mut residuals = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let value = &(&term(i, j, k) + &term(j, k, i)) + &term(k, i, j);
                let verdict = value.check_zero(horizon);
                if !verdict.is_zero() {
                    residuals.push(JacobiResidual {
                        indices: [i + 1, j + 1, k + 1],
                        value,
                        verdict,
                    });
                }
            }
        }
    }
    Ok(JacobiReport {
        pass: residuals.is_empty(),
        residuals,
    })
}

fn render_jacobi(report: &JacobiReport, horizon: Option<u32>) -> String {
    report
        .residuals
        .iter()
        .map(|r| {
            let names: Vec<String> = (1..=r.value.ring().nvars)
                .map(|i| format!("x{i}"))
                .collect();
            let v = match horizon {
                Some(h) => r.value.truncate(h),
                None => r.value.clone(),
            };
            format!(
                "({},{},{}): {}",
                r.indices[0],
                r.indices[1],
                r.indices[2],
                v.render(&names)
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn check_shape(name: &str, mat: &Matrix, rows: usize, cols: usize) -> Result<(), PoissonError> {
    if mat.rows() != rows || mat.cols() != cols {
        return Err(PoissonError::Shape(format!(
            "{name} must be {rows}x{cols}, got {}x{}",
            mat.rows(),
            mat.cols()
        )));
    }
    Ok(())
}

/// Triples `(a, b, j)` (one-based) where the commutator `[D_a, D_b]`
/// disagrees with `Σ_k c_ab^k D_k` on `x_j`.
fn bracket_defects(
    v: &Matrix,
    c: &[Vec<Vec<BaseElement>>],
    horizon: Option<u32>,
) -> Vec<(usize, usize, usize)> {
    let (n, m) = (v.rows(), v.cols());
    let ring = v.get(0, 0).ring();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for j in 0..m {
                let mut acc = ring.zero();
                for l in 0..m {
                    acc += &(v.get(a, l) * &v.get(b, j).partial(l));
                    acc += &(v.get(b, l) * &v.get(a, j).partial(l)).neg();
                }
                for (k, ck) in c[a][b].iter().enumerate() {
                    acc += &(ck * v.get(k, j)).neg();
                }
                if !acc.check_zero(horizon).is_zero() {
                    out.push((a + 1, b + 1, j + 1));
                }
            }
        }
    }
    out
}

/// Validates the input and assembles the frame data.
pub fn build_structure(
    input: StructureInput,
    horizon: Option<u32>,
) -> Result<PoissonStructure, PoissonError> {
    let pi = match &input {
        StructureInput::Symplectic { pi } | StructureInput::Explicit { pi, .. } => pi.clone(),
    };
    if pi.rows() == 0 {
        return Err(PoissonError::Shape("no base variables".into()));
    }
    let m = pi.rows();
    let report = jacobi_check(&pi, horizon)?;
    if !report.pass {
        return Err(PoissonError::Jacobi(render_jacobi(&report, horizon)));
    }
    let structure = match input {
        StructureInput::Symplectic { pi } => {
            let omega = pi.invert().map_err(PoissonError::Singular)?;
            let fm = FormMatrix::new(pi.clone(), omega, horizon)
                .map_err(|e| PoissonError::Form(e.to_string()))?;
            let c = (0..m)
                .map(|a| {
                    (0..m)
                        .map(|b| (0..m).map(|k| pi.get(a, b).partial(k)).collect())
                        .collect()
                })
                .collect();
            PoissonStructure {
                m,
                n: m,
                mode: StructureMode::SymplecticCoordinates,
                v: pi.clone(),
                pi,
                fm,
                c,
                horizon,
            }
        }
        StructureInput::Explicit {
            pi,
            v,
            phi,
            omega,
            c,
        } => {
            let n = phi.rows();
            if n == 0 {
                return Err(PoissonError::Shape("empty frame".into()));
            }
            check_shape("V", &v, n, m)?;
            check_shape("phi", &phi, n, n)?;
            check_shape("omega", &omega, n, n)?;
            if c.len() != n
                || c.iter()
                    .any(|row| row.len() != n || row.iter().any(|ks| ks.len() != n))
            {
                return Err(PoissonError::Shape(format!("C must be {n}x{n}x{n}")));
            }
            let fm = FormMatrix::new(phi, omega, horizon)
                .map_err(|e| PoissonError::Form(e.to_string()))?;
            // f(a, b) = -Σ ω_ce D_c a D_e b, so π = -Vᵀ ω V
            let induced = v
                .transpose()
                .mul(fm.omega())
                .and_then(|t| t.mul(&v))
                .map_err(PoissonError::Singular)?;
            let mut bad = Vec::new();
            for i in 0..m {
                for j in 0..m {
                    if !(pi.get(i, j) + induced.get(i, j))
                        .check_zero(horizon)
                        .is_zero()
                    {
                        bad.push(format!("({},{})", i + 1, j + 1));
                    }
                }
            }
            if !bad.is_empty() {
                return Err(PoissonError::InducedBracket(format!(
                    "entries {}",
                    bad.join(", ")
                )));
            }
            PoissonStructure {
                m,
                n,
                mode: StructureMode::ExplicitBasis,
                pi,
                v,
                fm,
                c,
                horizon,
            }
        }
    };
    let defects = bracket_defects(&structure.v, &structure.c, horizon);
    if !defects.is_empty() {
        let list: Vec<String> = defects
            .iter()
            .map(|(a, b, j)| format!("(a={a},b={b},x{j})"))
            .collect();
        return Err(PoissonError::BracketConsistency(list.join(", ")));
    }
    Ok(structure)
}
