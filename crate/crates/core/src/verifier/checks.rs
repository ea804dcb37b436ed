use serde::Serialize;

use crate::diagnostics::Check;
use crate::exactring::{BaseElement, Matrix, ZeroCheck};
use crate::poisson::bracket;

use super::star::StarProduct;
use super::VerifierError;

fn names(e: &BaseElement) -> Vec<String> {
    (1..=e.ring().nvars).map(|i| format!("x{i}")).collect()
}

fn show(e: &BaseElement, horizon: Option<u32>) -> String {
    let shown = match horizon {
        Some(h) => e.truncate(h),
        None => e.clone(),
    };
    shown.render(&names(e))
}

fn verdict_text(v: &ZeroCheck, e: &BaseElement, horizon: Option<u32>) -> String {
    match v {
        ZeroCheck::Undetermined { known_below } => {
            format!("undetermined: known only below degree {known_below}; increase jet_guard")
        }
        _ => show(e, horizon),
    }
}

/// Per-order outcome of the associativity test.
#[derive(Clone, Debug, Serialize)]
pub struct OrderResidual {
    pub order: u32,
    pub pass: bool,
    /// First failing sample and its residual, when the order fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssocReport {
    pub order: u32,
    pub samples: usize,
    pub orders: Vec<OrderResidual>,
    pub pass: bool,
}

impl AssocReport {
    pub fn first_failing_order(&self) -> Option<u32> {
        self.orders.iter().find(|o| !o.pass).map(|o| o.order)
    }
}

#[cfg(feature = "parallel")]
fn workers() -> Option<usize> {
    std::env::var("FEDOSOV_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Maps `f` over `items`, in parallel when enabled, keeping input order.
#[cfg(feature = "parallel")]
fn ordered_map<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    let run = || items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    match workers().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(run),
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn ordered_map<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> R + Sync + Send) -> Vec<R> {
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// `(a∗b)∗c − a∗(b∗c)` coefficientwise through the product's order.
pub fn associativity_check<S: StarProduct>(
    star: &S,
    triples: &[[BaseElement; 3]],
) -> Result<AssocReport, VerifierError> {
    let n = star.order();
    let horizon = star.horizon();
    let residuals = ordered_map(
        triples,
        |_, [a, b, c]| -> Result<Vec<BaseElement>, VerifierError> {
            let ab = star.star(a, b)?;
            let left = star.star_series(&ab, std::slice::from_ref(c))?;
            let bc = star.star(b, c)?;
            let right = star.star_series(std::slice::from_ref(a), &bc)?;
            Ok(left.iter().zip(&right).map(|(l, r)| l - r).collect())
        },
    )
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let mut orders = Vec::new();
    for k in 0..=n as usize {
        let mut failure = None;
        for (t, res) in residuals.iter().enumerate() {
            let v = res[k].check_zero(horizon);
            if !v.is_zero() {
                failure = Some(format!(
                    "triple {t}: {}",
                    verdict_text(&v, &res[k], horizon)
                ));
                break;
            }
        }
        orders.push(OrderResidual {
            order: k as u32,
            pass: failure.is_none(),
            failure,
        });
    }
    let pass = orders.iter().all(|o| o.pass);
    Ok(AssocReport {
        order: n,
        samples: triples.len(),
        orders,
        pass,
    })
}

type Bilinear<'a> = dyn Fn(&BaseElement, &BaseElement) -> BaseElement + Sync + 'a;

fn collect_failures(name: &str, failures: Vec<String>) -> Check {
    if failures.is_empty() {
        Check::pass(name)
    } else {
        Check::fail(name, failures.join("; "))
    }
}

/// `x·F(y,z) − F(xy,z) + F(x,yz) − F(x,y)·z = 0` on samples, plus the Leibniz
/// rule `F(xy,z) = x·F(y,z) + y·F(x,z)` when `antisymmetric` is set.
pub fn hochschild_cocycle_check(
    f1: &Bilinear,
    samples: &[[BaseElement; 3]],
    antisymmetric: bool,
    horizon: Option<u32>,
) -> Check {
    let mut failures = Vec::new();
    for (t, [x, y, z]) in samples.iter().enumerate() {
        let xy = x * y;
        let cocycle = &(&(&(x * &f1(y, z)) - &f1(&xy, z)) + &f1(x, &(y * z))) - &(&f1(x, y) * z);
        let v = cocycle.check_zero(horizon);
        if !v.is_zero() {
            failures.push(format!(
                "triple {t}: cocycle residual {}",
                verdict_text(&v, &cocycle, horizon)
            ));
            continue;
        }
        if antisymmetric {
            let leibniz = &(&f1(&xy, z) - &(x * &f1(y, z))) - &(y * &f1(x, z));
            let v = leibniz.check_zero(horizon);
            if !v.is_zero() {
                failures.push(format!(
                    "triple {t}: Leibniz residual {}",
                    verdict_text(&v, &leibniz, horizon)
                ));
            }
        }
    }
    collect_failures("Hochschild cocycle", failures)
}

/// The cocycle test applied to `F'(x, y) = F(y, x)`.
pub fn transpose_cocycle_check(
    f1: &Bilinear,
    samples: &[[BaseElement; 3]],
    horizon: Option<u32>,
) -> Check {
    let transposed = |x: &BaseElement, y: &BaseElement| f1(y, x);
    let mut c = hochschild_cocycle_check(&transposed, samples, false, horizon);
    c.name = "transposed Hochschild cocycle".into();
    c
}

/// `F'(x,y) − F(x,y) = x·Q(y) − Q(xy) + Q(x)·y` on sampled pairs.
pub fn gauge_equivalence_check(
    f1: &Bilinear,
    f1_prime: &Bilinear,
    q1: &(dyn Fn(&BaseElement) -> BaseElement + Sync),
    pairs: &[(BaseElement, BaseElement)],
    horizon: Option<u32>,
) -> Check {
    let mut failures = Vec::new();
    for (t, (x, y)) in pairs.iter().enumerate() {
        let coboundary = &(&(x * &q1(y)) - &q1(&(x * y))) + &(&q1(x) * y);
        let residual = &(&f1_prime(x, y) - &f1(x, y)) - &coboundary;
        let v = residual.check_zero(horizon);
        if !v.is_zero() {
            failures.push(format!(
                "pair {t}: {}",
                verdict_text(&v, &residual, horizon)
            ));
        }
    }
    collect_failures("gauge equivalence", failures)
}

fn commutator_coefficients<S: StarProduct>(
    star: &S,
    a: &BaseElement,
    b: &BaseElement,
) -> Result<Vec<BaseElement>, VerifierError> {
    let ab = star.star(a, b)?;
    let ba = star.star(b, a)?;
    Ok(ab.iter().zip(&ba).map(|(x, y)| x - y).collect())
}

/// `a∗b − b∗a = ħ f(a,b) + O(ħ²)`.
pub fn first_order_check<S: StarProduct>(
    star: &S,
    pi: &Matrix,
    pairs: &[(BaseElement, BaseElement)],
) -> Result<Check, VerifierError> {
    let horizon = star.horizon();
    let failures = ordered_map(
        pairs,
        |t, (a, b)| -> Result<Option<String>, VerifierError> {
            let comm = commutator_coefficients(star, a, b)?;
            let v0 = comm[0].check_zero(horizon);
            if !v0.is_zero() {
                return Ok(Some(format!(
                    "pair {t}: order 0 residual {}",
                    verdict_text(&v0, &comm[0], horizon)
                )));
            }
            if comm.len() > 1 {
                let residual = &comm[1] - &bracket(pi, a, b);
                let v = residual.check_zero(horizon);
                if !v.is_zero() {
                    return Ok(Some(format!(
                        "pair {t}: order 1 residual {}",
                        verdict_text(&v, &residual, horizon)
                    )));
                }
            }
            Ok(None)
        },
    )
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(collect_failures(
        "first-order commutator",
        failures.into_iter().flatten().collect(),
    ))
}

/// Jacobi identity for the antisymmetric part of `F_1`.
pub fn jacobi_order2_check<S: StarProduct>(
    star: &S,
    triples: &[[BaseElement; 3]],
) -> Result<Check, VerifierError> {
    let horizon = star.horizon();
    if star.order() == 0 {
        return Ok(Check::fail(
            "Jacobi identity of F_1",
            "star product has no first-order term",
        ));
    }
    let br = |a: &BaseElement, b: &BaseElement| -> Result<BaseElement, VerifierError> {
        Ok(commutator_coefficients(star, a, b)?.swap_remove(1))
    };
    let failures =
        ordered_map(
            triples,
            |t, [a, b, c]| -> Result<Option<String>, VerifierError> {
                let total = &(&br(&br(a, b)?, c)? + &br(&br(b, c)?, a)?) + &br(&br(c, a)?, b)?;
                let v = total.check_zero(horizon);
                Ok((!v.is_zero())
                    .then(|| format!("triple {t}: {}", verdict_text(&v, &total, horizon))))
            },
        )
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(collect_failures(
        "Jacobi identity of F_1",
        failures.into_iter().flatten().collect(),
    ))
}

/// `1∗b = b∗1 = b` through the full order.
pub fn unit_check<S: StarProduct>(
    star: &S,
    samples: &[BaseElement],
) -> Result<Check, VerifierError> {
    let horizon = star.horizon();
    let one = star.ring().one();
    let mut failures = Vec::new();
    for (t, b) in samples.iter().enumerate() {
        for (side, series) in [("1∗b", star.star(&one, b)?), ("b∗1", star.star(b, &one)?)] {
            for (k, c) in series.iter().enumerate() {
                let residual = if k == 0 { c - b } else { c.clone() };
                let v = residual.check_zero(horizon);
                if !v.is_zero() {
                    failures.push(format!(
                        "sample {t}: {side} order {k}: {}",
                        verdict_text(&v, &residual, horizon)
                    ));
                }
            }
        }
    }
    Ok(collect_failures("unit", failures))
}

/// Coefficientwise agreement of two star products on sampled pairs.
pub fn agreement_check<S: StarProduct, T: StarProduct>(
    name: &str,
    star: &S,
    reference: &T,
    pairs: &[(BaseElement, BaseElement)],
) -> Result<Check, VerifierError> {
    let horizon = star.horizon();
    let failures = ordered_map(
        pairs,
        |t, (a, b)| -> Result<Option<String>, VerifierError> {
            let got = star.star(a, b)?;
            let want = reference.star(a, b)?;
            for (k, (g, w)) in got.iter().zip(&want).enumerate() {
                let residual = g - w;
                let v = residual.check_zero(horizon);
                if !v.is_zero() {
                    return Ok(Some(format!(
                        "pair {t} order {k}: {}",
                        verdict_text(&v, &residual, horizon)
                    )));
                }
            }
            Ok(None)
        },
    )
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(collect_failures(
        name,
        failures.into_iter().flatten().collect(),
    ))
}
