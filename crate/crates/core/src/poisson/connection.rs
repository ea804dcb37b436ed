use crate::diagnostics::Check;
use crate::exactring::{rat, BaseElement};
use crate::weyl::{
    ad_over_hbar, op_d, wedge_left_sign, wedge_sign, WeylElement, WeylKey, WeylSpace,
};

use super::{PoissonError, PoissonStructure};

/// Torsion and curvature potentials of `∇`, with the identities verified on them.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    /// s-degree (2,2): `(1/ħ) ad α = ∇²`.
    pub alpha: WeylElement,
    /// s-degree (1,2): `(1/ħ) ad β = d∇ + ∇d`.
    pub beta: WeylElement,
    pub b: WeylElement,
    pub psi: WeylElement,
    pub checks: Vec<Check>,
}

fn is_exact_zero(f: &BaseElement) -> bool {
    f.is_zero() && f.precision().is_none()
}

/// `∇e^c = Σ_{a<b} coefficient · e^a∧e^b`, from the antisymmetrized structure functions.
fn form_table(p: &PoissonStructure) -> Vec<Vec<(u32, BaseElement)>> {
    let n = p.n;
    (0..n)
        .map(|c| {
            let mut out = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    let coeff = (&p.c[a][b][c] - &p.c[b][a][c]).scale(&rat(-1, 2));
                    if !is_exact_zero(&coeff) {
                        out.push(((1u32 << a) | (1 << b), coeff));
                    }
                }
            }
            out
        })
        .collect()
}

/// The connection extended as an odd derivation of bidegree (0,1):
/// `∇f = Σ_a (D_a f) e^a`, `∇y_b = Σ_{a,k} c_ab^k y_k e^a` and
/// `∇e^c(D_a, D_b) = −c_ab^c`.
pub fn nabla(x: &WeylElement, p: &PoissonStructure) -> WeylElement {
    let space = x.space();
    let n = p.n;
    let forms_of = form_table(p);
    let mut out = space.zero();
    for (key, f) in x.terms() {
        for a in 0..n {
            let sign = match wedge_left_sign(a, key.forms) {
                Some(s) => s,
                None => continue,
            };
            let forms = key.forms | (1 << a);
            let df = p.derive(a, f);
            if !is_exact_zero(&df) {
                out.add_term(
                    WeylKey::new(key.y, forms, key.hbar),
                    if sign < 0 { df.neg() } else { df },
                );
            }
            for b in 0..n {
                let lowered = match key.y.lower(b) {
                    Some(l) => l,
                    None => continue,
                };
                let mult = rat(sign * key.y.exponent(b) as i64, 1);
                for k in 0..n {
                    let cabk = &p.c[a][b][k];
                    if is_exact_zero(cabk) {
                        continue;
                    }
                    out.add_term(
                        WeylKey::new(lowered.raise(k), forms, key.hbar),
                        (f * cabk).scale(&mult),
                    );
                }
            }
        }
        let mut position = 0;
        for c in 0..n {
            if key.forms & (1 << c) == 0 {
                continue;
            }
            let outer = if position % 2 == 0 { 1 } else { -1 };
            position += 1;
            let rest = key.forms & !(1 << c);
            for (pair, coeff) in &forms_of[c] {
                let sign = match wedge_sign(*pair, rest) {
                    Some(s) => s * outer,
                    None => continue,
                };
                let v = f * coeff;
                out.add_term(
                    WeylKey::new(key.y, pair | rest, key.hbar),
                    if sign < 0 { v.neg() } else { v },
                );
            }
        }
    }
    out
}

fn require(check: Check) -> Result<Check, PoissonError> {
    if check.pass {
        Ok(check)
    } else {
        Err(PoissonError::Identity(check))
    }
}

/// `ψ = ∇d̄ = Σ_{a<b} Σ_k c_ab^k y_k e^a∧e^b`, verified to be `d`-closed.
pub fn torsion(p: &PoissonStructure, space: WeylSpace) -> Result<WeylElement, PoissonError> {
    let psi = nabla(&space.d_bar(), p);
    require(Check::weyl_zero(
        "dψ=0",
        &op_d(&psi, &p.fm),
        p.horizon,
        space.dmax,
    ))?;
    Ok(psi)
}

/// Solves `(1/ħ)[v, y_b] = images[b]` for `v` without s-degree (0,·) part.
pub fn inner_potential(
    images: &[WeylElement],
    p: &PoissonStructure,
) -> Result<WeylElement, PoissonError> {
    let n = p.n;
    assert_eq!(images.len(), n, "one image per fiber generator");
    let space = images[0].space();
    let omega = p.fm.omega();
    // ∂v/∂y_c = G_c = Σ_b images[b] ω_bc
    let grads: Vec<WeylElement> = (0..n)
        .map(|c| {
            let mut g = space.zero();
            for (b, img) in images.iter().enumerate() {
                let w = omega.get(b, c);
                if !is_exact_zero(w) {
                    g = g.add(&img.mul_base(w));
                }
            }
            g
        })
        .collect();
    for c in 0..n {
        for d in c + 1..n {
            let defect = grads[c].y_partial(d).sub(&grads[d].y_partial(c));
            require(Check::weyl_zero(
                format!("inner derivation integrability (y{}, y{})", c + 1, d + 1),
                &defect,
                p.horizon,
                space.dmax,
            ))?;
        }
    }
    // Euler: Σ_c y_c ∂_c v = p·v on y-degree p
    let mut raw = space.zero();
    for (c, g) in grads.iter().enumerate() {
        raw = raw.add(&g.y_raise(c));
    }
    let mut v = space.zero();
    for (k, coeff) in raw.terms() {
        v.add_term(*k, coeff.scale(&rat(1, k.y_degree() as i64)));
    }
    for (b, img) in images.iter().enumerate() {
        let back = ad_over_hbar(&v, &space.y(b), &p.fm).sub(img);
        require(Check::weyl_zero(
            format!("inner potential reproduces y{}", b + 1),
            &back,
            p.horizon,
            space.dmax,
        ))?;
    }
    Ok(v)
}

/// `D_a φ_bc = Σ_k (c_ab^k φ_kc + c_ac^k φ_bk)` for all index triples.
fn phi_invariance(p: &PoissonStructure) -> Check {
    let n = p.n;
    let phi = p.fm.phi();
    let mut bad = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut acc = p.derive(a, phi.get(b, c));
                for k in 0..n {
                    acc += &(&p.c[a][b][k] * phi.get(k, c)).neg();
                    acc += &(&p.c[a][c][k] * phi.get(b, k)).neg();
                }
                if !acc.check_zero(p.horizon).is_zero() {
                    bad.push(format!("(a={},b={},c={})", a + 1, b + 1, c + 1));
                }
            }
        }
    }
    if bad.is_empty() {
        Check::pass("φ-invariance")
    } else {
        Check::fail("φ-invariance", bad.join(", "))
    }
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

/// Computes `ψ`, `α`, `β` and verifies every relation between them.
pub fn curvature(p: &PoissonStructure, space: WeylSpace) -> Result<CurvatureData, PoissonError> {
    let horizon = p.horizon;
    let top = space.dmax;
    let psi = torsion(p, space)?;
    let mut checks = vec![Check::pass("dψ=0")];
    checks.push(require(phi_invariance(p))?);
    let fm = &p.fm;
    let images: Vec<WeylElement> = (0..p.n).map(|b| nabla(&nabla(&space.y(b), p), p)).collect();
    let alpha = inner_potential(&images, p)?;
    let beta = psi.clone();
    let gens = generators(space, p.m);

    let mut fails = Vec::new();
    for (name, g) in &gens {
        let lhs = ad_over_hbar(&alpha, g, fm);
        let rhs = nabla(&nabla(g, p), p);
        let c = Check::weyl_zero(name.clone(), &lhs.sub(&rhs), horizon, top);
        if !c.pass {
            fails.push(format!("{}: {}", c.name, c.detail));
        }
    }
    checks.push(require(summary("ad(α)/ħ=∇² on generators", fails))?);

    let mut fails = Vec::new();
    for (name, g) in &gens {
        let lhs = ad_over_hbar(&beta, g, fm);
        let rhs = op_d(&nabla(g, p), fm).add(&nabla(&op_d(g, fm), p));
        let c = Check::weyl_zero(name.clone(), &lhs.sub(&rhs), horizon, top);
        if !c.pass {
            fails.push(format!("{}: {}", c.name, c.detail));
        }
    }
    checks.push(require(summary("ad(β)/ħ=d∇+∇d on generators", fails))?);

    checks.push(require(Check::weyl_zero(
        "∇α=0",
        &nabla(&alpha, p),
        horizon,
        top,
    ))?);
    checks.push(require(Check::weyl_zero(
        "dβ=0",
        &op_d(&beta, fm),
        horizon,
        top,
    ))?);
    let b = alpha.add(&beta);
    let total = op_d(&b, fm).add(&nabla(&b, p));
    checks.push(require(Check::weyl_zero(
        "(d+∇)(α+β)=0",
        &total,
        horizon,
        top,
    ))?);
    Ok(CurvatureData {
        alpha,
        beta,
        b,
        psi,
        checks,
    })
}

fn summary(name: &str, fails: Vec<String>) -> Check {
    if fails.is_empty() {
        Check::pass(name)
    } else {
        Check::fail(name, fails.join("; "))
    }
}
