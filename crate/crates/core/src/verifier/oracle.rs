use std::collections::HashMap;

use num_traits::Zero;

use crate::exactring::{int, rat, BaseElement, Matrix, Monomial, Rational};
use crate::solver::StarExpansion;

use super::VerifierError;

fn derivative(f: &BaseElement, multi: Monomial, m: usize) -> BaseElement {
    let mut out = f.clone();
    for (i, &k) in multi.exponents(m).iter().enumerate() {
        for _ in 0..k {
            out = out.partial(i);
        }
    }
    out
}

/// Closed-form Moyal product for constant `π`:
/// `F_k = (1/k!)(1/2)^k Σ π^{i1j1}…π^{ikjk} ∂_{i1..ik} a · ∂_{j1..jk} b`.
pub fn moyal_oracle(
    a: &BaseElement,
    b: &BaseElement,
    pi: &Matrix,
    n: u32,
) -> Result<StarExpansion, VerifierError> {
    let m = pi.rows();
    let mut consts = vec![vec![Rational::from_integer(0); m]; m];
    for (i, row) in consts.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let e = pi.get(i, j);
            if !e.is_constant() {
                return Err(VerifierError::NonConstant {
                    row: i + 1,
                    col: j + 1,
                });
            }
            *slot = e.constant_term();
        }
    }
    let mut coeffs = vec![a * b];
    // weights of (derivatives on a, derivatives on b) after k contractions
    let mut level: HashMap<(Monomial, Monomial), Rational> = HashMap::new();
    level.insert((Monomial::ONE, Monomial::ONE), int(1));
    let mut scale = int(1);
    for k in 1..=n {
        let mut next: HashMap<(Monomial, Monomial), Rational> = HashMap::new();
        for ((da, db), w) in &level {
            for (i, row) in consts.iter().enumerate() {
                for (j, p) in row.iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    *next
                        .entry((da.raise(i), db.raise(j)))
                        .or_insert_with(|| int(0)) += w * p;
                }
            }
        }
        level = next;
        scale *= rat(1, 2 * k as i64);
        let mut fk = a.ring().zero();
        for ((da, db), w) in &level {
            if w.is_zero() {
                continue;
            }
            let term = &derivative(a, *da, m) * &derivative(b, *db, m);
            fk += &term.scale(&(w * &scale));
        }
        coeffs.push(fk);
    }
    Ok(StarExpansion {
        a: a.clone(),
        b: b.clone(),
        coeffs,
    })
}
