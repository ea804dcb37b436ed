use crate::weyl::WeylElement;

use super::SolverError;

/// Values the contraction iteration can run on: a difference and the lowest
/// degree at which two values disagree.
pub trait Filtered: Clone {
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    /// Lowest degree carrying a stored term, `None` for the empty value.
    fn lowest_degree(&self) -> Option<u32>;
    /// `None` when the two values are identical.
    fn first_difference(&self, other: &Self) -> Option<u32>;
}

impl Filtered for WeylElement {
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }

    fn lowest_degree(&self) -> Option<u32> {
        self.min_filtration()
    }

    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }

    fn first_difference(&self, other: &Self) -> Option<u32> {
        WeylElement::first_difference(self, other)
    }
}

/// Solution of `x + Φ(x) = rhs` and the number of iterations it took.
#[derive(Clone, Debug)]
pub struct FixedPoint<T> {
    pub value: T,
    pub iterations: usize,
}

/// Iterates `x_{k+1} = rhs − Φ(x_k)` from `x_0 = rhs` until two successive
/// iterates coincide. Each step must push the first disagreement to a
/// strictly higher degree, otherwise the iteration aborts with its trace.
pub fn fixed_point_solve<T: Filtered>(
    phi: impl Fn(&T) -> T,
    rhs: &T,
    max_iterations: usize,
) -> Result<FixedPoint<T>, SolverError> {
    let mut x = rhs.clone();
    let mut trace: Vec<u32> = Vec::new();
    for k in 1..=max_iterations {
        let next = rhs.minus(&phi(&x));
        match next.first_difference(&x) {
            None => {
                return Ok(FixedPoint {
                    value: next,
                    iterations: k,
                })
            }
            Some(deg) => {
                if trace.last().is_some_and(|&prev| deg <= prev) {
                    trace.push(deg);
                    return Err(SolverError::NonContracting { trace });
                }
                trace.push(deg);
            }
        }
        x = next;
    }
    Err(SolverError::NonContracting { trace })
}

/// Solves `x + Φ(x) = rhs` for linear `Φ` by summing `Σ_k (−Φ)^k rhs`,
/// each power evaluated once. Every power must start at a strictly higher
/// degree than the previous one.
pub fn neumann_solve<T: Filtered>(
    phi: impl Fn(&T) -> T,
    rhs: &T,
    max_iterations: usize,
) -> Result<FixedPoint<T>, SolverError> {
    let mut sum = rhs.clone();
    let mut power = rhs.clone();
    let mut trace: Vec<u32> = power.lowest_degree().into_iter().collect();
    for k in 1..=max_iterations {
        power = phi(&power);
        let deg = match power.lowest_degree() {
            None => {
                return Ok(FixedPoint {
                    value: sum,
                    iterations: k,
                })
            }
            Some(d) => d,
        };
        let stalled = trace.last().is_some_and(|&prev| deg <= prev);
        trace.push(deg);
        if stalled {
            return Err(SolverError::NonContracting { trace });
        }
        sum = if k % 2 == 1 {
            sum.minus(&power)
        } else {
            sum.plus(&power)
        };
    }
    Err(SolverError::NonContracting { trace })
}
