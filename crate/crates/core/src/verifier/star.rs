use std::collections::HashMap;
use std::sync::Mutex;

use crate::exactring::{BaseElement, BaseRing, Matrix};
use crate::solver::{product_of_lifts, quantize_series, FedosovConnection};
use crate::weyl::WeylElement;

use super::{moyal_oracle, VerifierError};

/// Coefficients `Σ_k ħ^k s_k`, indexed by `k`.
pub type Series = Vec<BaseElement>;

/// A star product truncated after `ħ^order`, extended ħ-bilinearly to series.
pub trait StarProduct: Sync {
    fn order(&self) -> u32;
    /// Degree through which jet coefficients are meaningful.
    fn horizon(&self) -> Option<u32>;
    fn ring(&self) -> BaseRing;
    fn star_series(&self, a: &[BaseElement], b: &[BaseElement]) -> Result<Series, VerifierError>;

    fn star(&self, a: &BaseElement, b: &BaseElement) -> Result<Series, VerifierError> {
        self.star_series(std::slice::from_ref(a), std::slice::from_ref(b))
    }
}

/// The star product of a solved connection; flat sections are cached.
pub struct FedosovStar<'a> {
    fc: &'a FedosovConnection,
    lifts: Mutex<HashMap<String, WeylElement>>,
}

impl<'a> FedosovStar<'a> {
    pub fn new(fc: &'a FedosovConnection) -> Self {
        FedosovStar {
            fc,
            lifts: Mutex::new(HashMap::new()),
        }
    }

    fn lift(&self, s: &[BaseElement]) -> Result<WeylElement, VerifierError> {
        let key = format!("{s:?}");
        if let Some(t) = self.lifts.lock().expect("lift cache").get(&key) {
            return Ok(t.clone());
        }
        let t = quantize_series(s, self.fc)?;
        self.lifts
            .lock()
            .expect("lift cache")
            .insert(key, t.clone());
        Ok(t)
    }
}

impl StarProduct for FedosovStar<'_> {
    fn order(&self) -> u32 {
        self.fc.n_hbar
    }

    fn horizon(&self) -> Option<u32> {
        self.fc.horizon()
    }

    fn ring(&self) -> BaseRing {
        self.fc.space.ring
    }

    fn star_series(&self, a: &[BaseElement], b: &[BaseElement]) -> Result<Series, VerifierError> {
        let (ta, tb) = (self.lift(a)?, self.lift(b)?);
        Ok(product_of_lifts(&ta, &tb, self.fc)?)
    }
}

/// The closed-form product for constant `π`.
pub struct MoyalStar {
    pi: Matrix,
    order: u32,
}

impl MoyalStar {
    pub fn new(pi: Matrix, order: u32) -> Result<Self, VerifierError> {
        let r = pi.get(0, 0).ring();
        moyal_oracle(&r.one(), &r.one(), &pi, 0)?;
        Ok(MoyalStar { pi, order })
    }
}

fn bilinear(
    a: &[BaseElement],
    b: &[BaseElement],
    order: u32,
    ring: BaseRing,
    mut f: impl FnMut(&BaseElement, &BaseElement, u32) -> Result<Series, VerifierError>,
) -> Result<Series, VerifierError> {
    let n = order as usize;
    let mut out = vec![ring.zero(); n + 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            if i + j > n {
                continue;
            }
            let part = f(ai, bj, (n - i - j) as u32)?;
            for (k, c) in part.iter().enumerate() {
                out[i + j + k] += c;
            }
        }
    }
    Ok(out)
}

impl StarProduct for MoyalStar {
    fn order(&self) -> u32 {
        self.order
    }

    fn horizon(&self) -> Option<u32> {
        None
    }

    fn ring(&self) -> BaseRing {
        self.pi.get(0, 0).ring()
    }

    fn star_series(&self, a: &[BaseElement], b: &[BaseElement]) -> Result<Series, VerifierError> {
        bilinear(a, b, self.order, self.ring(), |x, y, n| {
            Ok(moyal_oracle(x, y, &self.pi, n)?.coeffs)
        })
    }
}

/// Wraps a star product and adds `ħ^k ε(a, b)` with `ε(a, b) = Σ_i ∂_i² a · b`.
pub struct FaultyStar<S> {
    inner: S,
    fault_order: u32,
}

impl<S: StarProduct> FaultyStar<S> {
    pub fn new(inner: S, fault_order: u32) -> Self {
        FaultyStar { inner, fault_order }
    }
}

fn fault(a: &BaseElement, b: &BaseElement) -> BaseElement {
    let mut lap = a.ring().zero();
    for i in 0..a.ring().nvars {
        lap += &a.partial(i).partial(i);
    }
    &lap * b
}

impl<S: StarProduct> StarProduct for FaultyStar<S> {
    fn order(&self) -> u32 {
        self.inner.order()
    }

    fn horizon(&self) -> Option<u32> {
        self.inner.horizon()
    }

    fn ring(&self) -> BaseRing {
        self.inner.ring()
    }

    fn star_series(&self, a: &[BaseElement], b: &[BaseElement]) -> Result<Series, VerifierError> {
        let mut out = self.inner.star_series(a, b)?;
        let k = self.fault_order;
        if k > self.order() {
            return Ok(out);
        }
        let extra = bilinear(a, b, self.order() - k, self.ring(), |x, y, _| {
            Ok(vec![fault(x, y)])
        })?;
        for (i, c) in extra.iter().enumerate() {
            out[i + k as usize] += c;
        }
        Ok(out)
    }
}
