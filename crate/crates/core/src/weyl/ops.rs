use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use super::element::{factorial, wedge_left_sign, wedge_sign, WeylElement, WeylKey};
use crate::exactring::{int, rat, BaseElement, Matrix, Monomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("form matrix must be square of size {expected}, got {rows}x{cols}")]
    Shape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("phi is not skew-symmetric")]
    PhiNotSkew,
    #[error("omega is not skew-symmetric")]
    OmegaNotSkew,
    #[error("omega is not an inverse of phi")]
    NotInverse,
    #[error("elements live in different Weyl spaces")]
    SpaceMismatch,
}

/// The fiberwise symplectic form `φ_ab = φ(e_a, e_b)` and its inverse `ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMatrix {
    phi: Matrix,
    omega: Matrix,
}

impl FormMatrix {
    /// Validates skewness and `ω φ = φ ω = 1` through the jet `horizon`.
    pub fn new(phi: Matrix, omega: Matrix, horizon: Option<u32>) -> Result<Self, WeylError> {
        let n = phi.rows();
        for m in [&phi, &omega] {
            if m.rows() != n || m.cols() != n {
                return Err(WeylError::Shape {
                    expected: n,
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
        }
        if !phi.is_skew() {
            return Err(WeylError::PhiNotSkew);
        }
        if !omega.is_skew() {
            return Err(WeylError::OmegaNotSkew);
        }
        let left = omega.mul(&phi).map_err(|_| WeylError::NotInverse)?;
        let right = phi.mul(&omega).map_err(|_| WeylError::NotInverse)?;
        if !left.is_identity_through(horizon) || !right.is_identity_through(horizon) {
            return Err(WeylError::NotInverse);
        }
        Ok(FormMatrix { phi, omega })
    }

    /// Builds from `φ` alone, inverting it exactly.
    pub fn from_phi(
        phi: Matrix,
        horizon: Option<u32>,
    ) -> Result<Self, crate::exactring::RingError> {
        let omega = phi.invert()?;
        FormMatrix::new(phi, omega, horizon)
            .map_err(|e| crate::exactring::RingError::Shape(e.to_string()))
    }

    pub fn n(&self) -> usize {
        self.phi.rows()
    }

    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn omega(&self) -> &Matrix {
        &self.omega
    }
}

/// Which contraction orders of the product to keep.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Contractions {
    All,
    Odd,
}

type ContractionTable = Rc<Vec<(u32, Monomial, BaseElement)>>;

/// All `c`-fold φ-contractions of `y^α ⊗ y^β`, with the `(1/2)^c / c!`
/// weight folded in: entries `(c, y-power of the result, weight)`.
fn contraction_table(
    alpha: Monomial,
    beta: Monomial,
    fm: &FormMatrix,
    keep: Contractions,
) -> Vec<(u32, Monomial, BaseElement)> {
    let n = fm.n();
    let ring = fm.phi.get(0, 0).ring();
    let mut out = Vec::new();
    if keep == Contractions::All {
        out.push((0, alpha.mul(beta), ring.one()));
    }
    let mut level: HashMap<(Monomial, Monomial), BaseElement> = HashMap::new();
    level.insert((alpha, beta), ring.one());
    let max_c = alpha.degree().min(beta.degree());
    for c in 1..=max_c {
        let mut next: HashMap<(Monomial, Monomial), BaseElement> = HashMap::new();
        for ((a, b), w) in &level {
            for i in 0..n {
                let ai = a.exponent(i);
                if ai == 0 {
                    continue;
                }
                for j in 0..n {
                    let bj = b.exponent(j);
                    if bj == 0 {
                        continue;
                    }
                    let phi = fm.phi.get(i, j);
                    if phi.is_zero() {
                        continue;
                    }
                    let contrib = (w * phi).scale(&int((ai * bj) as i64));
                    let key = (a.lower(i).unwrap(), b.lower(j).unwrap());
                    match next.get_mut(&key) {
                        Some(acc) => *acc += &contrib,
                        None => {
                            next.insert(key, contrib);
                        }
                    }
                }
            }
        }
        level = next;
        if keep == Contractions::All || c % 2 == 1 {
            let weight = rat(1, 1 << c) / factorial(c);
            let mut merged: HashMap<Monomial, BaseElement> = HashMap::new();
            for ((a, b), w) in &level {
                let w = w.scale(&weight);
                match merged.get_mut(&a.mul(*b)) {
                    Some(acc) => *acc += &w,
                    None => {
                        merged.insert(a.mul(*b), w);
                    }
                }
            }
            let mut entries: Vec<_> = merged.into_iter().collect();
            entries.sort_by_key(|e| e.0);
            for (m, w) in entries {
                if !w.is_zero() || w.precision().is_some() {
                    out.push((c, m, w));
                }
            }
        }
        if level.is_empty() {
            break;
        }
    }
    out
}

fn product_impl(
    a: &WeylElement,
    b: &WeylElement,
    fm: &FormMatrix,
    keep: Contractions,
) -> WeylElement {
    let space = a.space();
    debug_assert_eq!(space, b.space());
    let mut tables: HashMap<(Monomial, Monomial), ContractionTable> = HashMap::new();
    let mut out = space.zero();
    for (ka, ca) in a.terms() {
        for (kb, cb) in b.terms() {
            if ka.filtration() + kb.filtration() > space.dmax {
                continue;
            }
            let sign = match wedge_sign(ka.forms, kb.forms) {
                Some(s) => s,
                None => continue,
            };
            let table = tables
                .entry((ka.y, kb.y))
                .or_insert_with(|| Rc::new(contraction_table(ka.y, kb.y, fm, keep)))
                .clone();
            if table.is_empty() {
                continue;
            }
            // contractions trade two y's for one ħ, so every output term
            // sits at the filtration ka + kb
            let cap = space.degree_cap(ka.filtration() + kb.filtration());
            let mut base = match cap {
                Some(cap) => ca.mul_truncated(cb, cap),
                None => ca * cb,
            };
            if sign < 0 {
                base = base.neg();
            }
            let forms = ka.forms | kb.forms;
            for (c, m, w) in table.iter() {
                let key = WeylKey::new(*m, forms, ka.hbar + kb.hbar + c);
                if key.filtration() > space.dmax {
                    continue;
                }
                let coeff = match cap {
                    Some(cap) => base.mul_truncated(w, cap),
                    None => &base * w,
                };
                out.add_term(key, coeff);
            }
        }
    }
    out
}

/// Fiberwise product of symbols: the exponential φ-contraction formula with
/// ħ/2 per contraction, exterior factors multiplied with their sign.
pub fn weyl_product(a: &WeylElement, b: &WeylElement, fm: &FormMatrix) -> WeylElement {
    product_impl(a, b, fm, Contractions::All)
}

pub fn checked_weyl_product(
    a: &WeylElement,
    b: &WeylElement,
    fm: &FormMatrix,
) -> Result<WeylElement, WeylError> {
    if a.space() != b.space() || a.space().n != fm.n() {
        return Err(WeylError::SpaceMismatch);
    }
    Ok(weyl_product(a, b, fm))
}

/// Super-commutator `ab - (-1)^{|a||b|} ba`.
///
/// Even contraction orders cancel between the two products and odd ones
/// double, so this is twice the odd-contraction part of `a∘b`.
pub fn commutator(a: &WeylElement, b: &WeylElement, fm: &FormMatrix) -> WeylElement {
    product_impl(a, b, fm, Contractions::Odd).scale(&int(2))
}

/// `(1/ħ)[a, b]`.
pub fn ad_over_hbar(a: &WeylElement, b: &WeylElement, fm: &FormMatrix) -> WeylElement {
    // the commutator of terms at total filtration dmax+1 can land at dmax-1
    // after dividing by ħ, so compute one ħ-step above the truncation
    let space = a.space();
    let wide = space.with_dmax(space.dmax + 2);
    let (aw, bw) = (a.retruncate(wide.dmax), b.retruncate(wide.dmax));
    commutator(&aw, &bw, fm).div_hbar().retruncate(space.dmax)
}

/// The Koszul differential: odd derivation with `d(y_b) = Σ_a φ_ab e^a`,
/// vanishing on the base ring, ħ and forms.
pub fn op_d(a: &WeylElement, fm: &FormMatrix) -> WeylElement {
    let space = a.space();
    let mut out = space.zero();
    for (k, c) in a.terms() {
        for b in 0..space.n {
            let lowered = match k.y.lower(b) {
                Some(m) => m,
                None => continue,
            };
            let mult = int(k.y.exponent(b) as i64);
            for f in 0..space.n {
                let phi = fm.phi.get(f, b);
                if phi.is_zero() {
                    continue;
                }
                let sign = match wedge_left_sign(f, k.forms) {
                    Some(s) => s,
                    None => continue,
                };
                let coeff = (c * phi).scale(&(&mult * int(sign)));
                out.add_term(WeylKey::new(lowered, k.forms | (1 << f), k.hbar), coeff);
            }
        }
    }
    out
}

/// The contracting homotopy: odd derivation with `∂(e^b) = Σ_c ω_cb y_c`,
/// vanishing on the base ring, ħ and the y's.
pub fn op_partial(a: &WeylElement, fm: &FormMatrix) -> WeylElement {
    let space = a.space();
    let mut out = space.zero();
    for (k, c) in a.terms() {
        let mut position = 0;
        for b in 0..space.n {
            if k.forms & (1 << b) == 0 {
                continue;
            }
            let sign = if position % 2 == 0 { 1 } else { -1 };
            position += 1;
            let rest = k.forms & !(1 << b);
            for y in 0..space.n {
                let w = fm.omega.get(y, b);
                if w.is_zero() {
                    continue;
                }
                let coeff = (c * w).scale(&int(sign));
                out.add_term(WeylKey::new(k.y.raise(y), rest, k.hbar), coeff);
            }
        }
    }
    out
}

/// `δ = ∂ / (p + q)` on each s-degree component; zero on the (0,0) part.
pub fn op_delta(a: &WeylElement, fm: &FormMatrix) -> WeylElement {
    let raw = op_partial(a, fm);
    let mut out = a.space().zero();
    for (k, c) in raw.terms() {
        // ∂ preserves p + q, so the output key carries the input's total
        let total = k.y_degree() + k.form_degree();
        out.add_term(*k, c.scale(&rat(1, total as i64)));
    }
    out
}
