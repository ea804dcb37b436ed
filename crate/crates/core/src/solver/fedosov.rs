use crate::diagnostics::Check;
use crate::exactring::{rat, BaseElement};
use crate::poisson::{nabla, CurvatureData, PoissonStructure};
use crate::weyl::{ad_over_hbar, op_d, op_delta, weyl_product, WeylElement, WeylSpace};

use super::fixed_point::{fixed_point_solve, neumann_solve};
use super::SolverError;

/// The abelian connection `D = d + ∇ + (1/ħ) ad r` and the data it was built from.
#[derive(Clone, Debug)]
pub struct FedosovConnection {
    pub structure: PoissonStructure,
    pub curv: CurvatureData,
    pub r: WeylElement,
    pub n_hbar: u32,
    pub space: WeylSpace,
    pub iterations: usize,
    pub checks: Vec<Check>,
}

impl FedosovConnection {
    pub fn dmax(&self) -> u32 {
        self.space.dmax
    }

    pub fn horizon(&self) -> Option<u32> {
        self.structure.horizon
    }
}

fn require(check: Check) -> Result<Check, SolverError> {
    if check.pass {
        Ok(check)
    } else {
        Err(SolverError::Identity(check))
    }
}

fn max_iterations(space: WeylSpace) -> usize {
    space.dmax as usize + 2
}

/// Solves `r = −δb − δ(∇r + (1/2ħ)[r, r])` and verifies flatness of `D`.
pub fn solve_r(
    p: &PoissonStructure,
    curv: &CurvatureData,
    space: WeylSpace,
    n_hbar: u32,
) -> Result<FedosovConnection, SolverError> {
    if 2 * n_hbar > space.dmax || space.dmax < 2 {
        return Err(SolverError::Truncation {
            n_hbar,
            dmax: space.dmax,
        });
    }
    let fm = &p.fm;
    let rhs = op_delta(&curv.b, fm).neg();
    let phi = |r: &WeylElement| {
        let half_bracket = ad_over_hbar(r, r, fm).scale(&rat(1, 2));
        op_delta(&nabla(r, p).add(&half_bracket), fm)
    };
    let solved = fixed_point_solve(phi, &rhs, max_iterations(space))?;
    let r = solved.value;
    let mut fc = FedosovConnection {
        structure: p.clone(),
        curv: curv.clone(),
        r,
        n_hbar,
        space,
        iterations: solved.iterations,
        checks: Vec::new(),
    };
    let horizon = p.horizon;
    let dmax = space.dmax;
    let mut checks = vec![require(Check::weyl_zero(
        "δr=0",
        &op_delta(&fc.r, fm),
        horizon,
        dmax,
    ))?];
    let r = &fc.r;
    let residual = curv
        .b
        .add(&op_d(r, fm))
        .add(&nabla(r, p))
        .add(&ad_over_hbar(r, r, fm).scale(&rat(1, 2)));
    checks.push(require(Check::weyl_zero(
        "flatness b+dr+∇r+(1/2ħ)[r,r]=0",
        &residual,
        horizon,
        dmax.saturating_sub(1),
    ))?);
    let mut fails = Vec::new();
    for (name, g) in generators(space, p.m) {
        let dd = apply_d(&apply_d(&g, &fc), &fc);
        let c = Check::weyl_zero(name, &dd, horizon, dmax.saturating_sub(2));
        if !c.pass {
            fails.push(format!("{}: {}", c.name, c.detail));
        }
    }
    checks.push(require(if fails.is_empty() {
        Check::pass("D²=0 on generators")
    } else {
        Check::fail("D²=0 on generators", fails.join("; "))
    })?);
    fc.checks = checks;
    Ok(fc)
}

fn generators(space: WeylSpace, m: usize) -> Vec<(String, WeylElement)> {
    let mut out = Vec::new();
    for j in 0..m {
        out.push((format!("x{}", j + 1), space.base(&space.ring.var(j))));
    }
    for b in 0..space.n {
        out.push((format!("y{}", b + 1), space.y(b)));
    }
    for c in 0..space.n {
        out.push((format!("e{}", c + 1), space.form(c)));
    }
    out
}

/// `D(a) = d(a) + ∇(a) + (1/ħ)[r, a]`.
pub fn apply_d(a: &WeylElement, fc: &FedosovConnection) -> WeylElement {
    let fm = &fc.structure.fm;
    op_d(a, fm)
        .add(&nabla(a, &fc.structure))
        .add(&ad_over_hbar(&fc.r, a, fm))
}

fn correction(a: &WeylElement, fc: &FedosovConnection) -> WeylElement {
    let fm = &fc.structure.fm;
    op_delta(
        &nabla(a, &fc.structure).add(&ad_over_hbar(&fc.r, a, fm)),
        fm,
    )
}

/// `Q = Id + δ(∇ + (1/ħ) ad r)`.
pub fn apply_q(a: &WeylElement, fc: &FedosovConnection) -> WeylElement {
    a.add(&correction(a, fc))
}

/// Inverse of `Q` by contraction iteration.
pub fn apply_q_inverse(
    a: &WeylElement,
    fc: &FedosovConnection,
) -> Result<WeylElement, SolverError> {
    Ok(neumann_solve(|x| correction(x, fc), a, max_iterations(fc.space))?.value)
}

/// The flat section `τ(a) = Q⁻¹(a)`, checked to satisfy `D τ(a) = 0`.
pub fn quantize(a: &BaseElement, fc: &FedosovConnection) -> Result<WeylElement, SolverError> {
    quantize_series(std::slice::from_ref(a), fc)
}

/// Flat section of `Σ_k ħ^k a_k`.
pub fn quantize_series(
    series: &[BaseElement],
    fc: &FedosovConnection,
) -> Result<WeylElement, SolverError> {
    let tau = apply_q_inverse(&fc.space.hbar_series(series), fc)?;
    let flat = apply_d(&tau, fc);
    require(Check::weyl_zero(
        "flat section Dτ=0",
        &flat,
        fc.horizon(),
        fc.dmax().saturating_sub(1),
    ))?;
    Ok(tau)
}

/// Coefficients `F_0..F_N` of `a ∗ b = Σ ħ^k F_k(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarExpansion {
    pub a: BaseElement,
    pub b: BaseElement,
    pub coeffs: Vec<BaseElement>,
}

impl StarExpansion {
    /// Coefficients with everything above `horizon` dropped.
    pub fn truncated(&self, horizon: Option<u32>) -> Vec<BaseElement> {
        match horizon {
            None => self.coeffs.clone(),
            Some(h) => self.coeffs.iter().map(|c| c.truncate(h)).collect(),
        }
    }
}

/// Checks that `w` has no y- or form-terms through `max_filtration`.
fn scalar_check(w: &WeylElement, horizon: Option<u32>, max_filtration: u32) -> Check {
    let rest = w.filter(|k| k.y_degree() > 0 || k.form_degree() > 0);
    Check::weyl_zero(
        "star product lies in A[[ħ]]",
        &rest,
        horizon,
        max_filtration,
    )
}

/// `Q(ta ∘ tb)` for flat sections, as its scalar coefficients through `ħ^N`.
pub fn product_of_lifts(
    ta: &WeylElement,
    tb: &WeylElement,
    fc: &FedosovConnection,
) -> Result<Vec<BaseElement>, SolverError> {
    let w = apply_q(&weyl_product(ta, tb, &fc.structure.fm), fc);
    require(scalar_check(&w, fc.horizon(), fc.dmax()))?;
    let coeffs = w.scalar_series(fc.n_hbar);
    if let Some(h) = fc.horizon() {
        for (k, c) in coeffs.iter().enumerate() {
            if let Some(p) = c.precision().filter(|&p| p <= h) {
                return Err(SolverError::Identity(Check::fail(
                    format!("F_{k} determined"),
                    format!("coefficients known only below degree {p}; increase jet_guard"),
                )));
            }
        }
    }
    Ok(coeffs)
}

/// `a ∗ b = Q(τ(a) ∘ τ(b))` through `ħ^N`.
pub fn star(
    a: &BaseElement,
    b: &BaseElement,
    fc: &FedosovConnection,
) -> Result<StarExpansion, SolverError> {
    let ta = quantize(a, fc)?;
    let tb = quantize(b, fc)?;
    let coeffs = product_of_lifts(&ta, &tb, fc)?;
    Ok(StarExpansion {
        a: a.clone(),
        b: b.clone(),
        coeffs,
    })
}
