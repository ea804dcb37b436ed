use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::exactring::{int, BaseElement, BaseRing, Monomial, Rational, ZeroCheck};

/// Index of one basis term: symmetric y-power, exterior form set and ħ-power.
///
/// `forms` is a bitmask over `e^1..e^n`, always read in increasing order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct WeylKey {
    pub forms: u32,
    pub y: Monomial,
    pub hbar: u32,
}

impl WeylKey {
    pub fn new(y: Monomial, forms: u32, hbar: u32) -> Self {
        WeylKey { forms, y, hbar }
    }

    pub fn scalar() -> Self {
        WeylKey {
            forms: 0,
            y: Monomial::ONE,
            hbar: 0,
        }
    }

    /// Filtration degree: y's count one, ħ counts two.
    pub fn filtration(&self) -> u32 {
        self.y.degree() + 2 * self.hbar
    }

    pub fn form_degree(&self) -> u32 {
        self.forms.count_ones()
    }

    pub fn y_degree(&self) -> u32 {
        self.y.degree()
    }
}

/// Sign of `e^a ∧ e^S` relative to the sorted order, or `None` if `a ∈ S`.
pub fn wedge_left_sign(a: usize, forms: u32) -> Option<i64> {
    if forms & (1 << a) != 0 {
        return None;
    }
    let below = (forms & ((1u32 << a) - 1)).count_ones();
    Some(if below.is_multiple_of(2) { 1 } else { -1 })
}

/// Sign of `e^S ∧ e^T` relative to sorted order, or `None` if they overlap.
pub fn wedge_sign(s: u32, t: u32) -> Option<i64> {
    if s & t != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = t;
    while rest != 0 {
        let b = rest.trailing_zeros();
        swaps += (s >> (b + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if swaps.is_multiple_of(2) { 1 } else { -1 })
}

/// Ambient data of a truncated Weyl algebra: fiber rank, truncation degree
/// and the base ring of coefficients.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct WeylSpace {
    pub n: usize,
    pub dmax: u32,
    pub ring: BaseRing,
}

impl WeylSpace {
    pub fn new(n: usize, dmax: u32, ring: BaseRing) -> Self {
        assert!(n <= crate::exactring::MAX_VARS, "fiber rank too large");
        WeylSpace { n, dmax, ring }
    }

    pub fn zero(&self) -> WeylElement {
        WeylElement {
            space: *self,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> WeylElement {
        self.base(&self.ring.one())
    }

    /// Embeds a base element as a scalar (central) element.
    pub fn base(&self, f: &BaseElement) -> WeylElement {
        self.term(WeylKey::scalar(), f.clone())
    }

    pub fn term(&self, key: WeylKey, coeff: BaseElement) -> WeylElement {
        let mut e = self.zero();
        e.add_term(key, coeff);
        e
    }

    /// Fiber generator `y_a` (zero-based).
    pub fn y(&self, a: usize) -> WeylElement {
        assert!(a < self.n);
        self.term(WeylKey::new(Monomial::var(a), 0, 0), self.ring.one())
    }

    /// Form generator `e^a` (zero-based).
    pub fn form(&self, a: usize) -> WeylElement {
        assert!(a < self.n);
        self.term(WeylKey::new(Monomial::ONE, 1 << a, 0), self.ring.one())
    }

    pub fn hbar(&self) -> WeylElement {
        self.term(WeylKey::new(Monomial::ONE, 0, 1), self.ring.one())
    }

    /// `Σ_a y_a e^a`, the element whose bracket realizes `d`.
    pub fn d_bar(&self) -> WeylElement {
        let mut e = self.zero();
        for a in 0..self.n {
            e.add_term(WeylKey::new(Monomial::var(a), 1 << a, 0), self.ring.one());
        }
        e
    }

    /// Lifts `Σ_k ħ^k f_k` into the scalar part.
    pub fn hbar_series(&self, coeffs: &[BaseElement]) -> WeylElement {
        let mut e = self.zero();
        for (k, c) in coeffs.iter().enumerate() {
            e.add_term(WeylKey::new(Monomial::ONE, 0, k as u32), c.clone());
        }
        e
    }

    /// Highest base degree stored for a coefficient at filtration `f`.
    ///
    /// In a jet ring of order `W` a term at filtration `f` is kept through
    /// degree `W − f`: each further filtration step of the recursions costs
    /// at most one base derivative.
    pub fn degree_cap(&self, filtration: u32) -> Option<u32> {
        self.ring.order().map(|w| w.saturating_sub(filtration))
    }

    pub fn with_dmax(&self, dmax: u32) -> Self {
        WeylSpace { dmax, ..*self }
    }
}

/// Truncated element of `W(E) ⊗ ∧E*` stored by symmetric-ordering symbols.
#[derive(Clone, PartialEq, Eq)]
pub struct WeylElement {
    space: WeylSpace,
    terms: BTreeMap<WeylKey, BaseElement>,
}

impl WeylElement {
    pub fn space(&self) -> WeylSpace {
        self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WeylKey, &BaseElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, key: &WeylKey) -> Option<&BaseElement> {
        self.terms.get(key)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff` at `key`, dropping keys above the truncation degree.
    pub fn add_term(&mut self, key: WeylKey, coeff: BaseElement) {
        if key.filtration() > self.space.dmax {
            return;
        }
        debug_assert!(key.forms < (1 << self.space.n));
        if coeff.is_zero() && coeff.precision().is_none() {
            return;
        }
        let coeff = match self.space.degree_cap(key.filtration()) {
            Some(cap)
                if coeff.max_degree().is_some_and(|d| d > cap)
                    || coeff.precision().is_some_and(|p| p > cap + 1) =>
            {
                coeff.truncate(cap)
            }
            _ => coeff,
        };
        match self.terms.get_mut(&key) {
            Some(c) => {
                *c += &coeff;
                if c.is_zero() && c.precision().is_none() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn add(&self, other: &WeylElement) -> WeylElement {
        debug_assert_eq!(self.space, other.space);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &WeylElement) -> WeylElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WeylElement {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, r: &Rational) -> WeylElement {
        if r.is_zero() {
            return self.space.zero();
        }
        self.map_coeffs(|c| c.scale(r))
    }

    /// Multiplies every coefficient by a central base element.
    pub fn mul_base(&self, f: &BaseElement) -> WeylElement {
        let mut out = self.space.zero();
        for (k, c) in &self.terms {
            out.add_term(*k, c * f);
        }
        out
    }

    fn map_coeffs(&self, f: impl Fn(&BaseElement) -> BaseElement) -> WeylElement {
        let mut out = self.space.zero();
        for (k, c) in &self.terms {
            out.add_term(*k, f(c));
        }
        out
    }

    /// Divides by ħ. Panics if a term carries no ħ.
    pub fn div_hbar(&self) -> WeylElement {
        let mut out = self.space.zero();
        for (k, c) in &self.terms {
            assert!(k.hbar > 0, "element is not divisible by hbar");
            out.add_term(
                WeylKey {
                    hbar: k.hbar - 1,
                    ..*k
                },
                c.clone(),
            );
        }
        out
    }

    pub fn mul_hbar(&self) -> WeylElement {
        let mut out = self.space.zero();
        for (k, c) in &self.terms {
            out.add_term(
                WeylKey {
                    hbar: k.hbar + 1,
                    ..*k
                },
                c.clone(),
            );
        }
        out
    }

    /// Keeps the terms satisfying `pred`.
    pub fn filter(&self, pred: impl Fn(&WeylKey) -> bool) -> WeylElement {
        WeylElement {
            space: self.space,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| pred(k))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Drops terms of filtration degree above `t`.
    pub fn truncate(&self, t: u32) -> WeylElement {
        self.filter(|k| k.filtration() <= t)
    }

    /// Re-embeds into a space with a different truncation degree.
    pub fn retruncate(&self, dmax: u32) -> WeylElement {
        let mut out = self.space.with_dmax(dmax).zero();
        for (k, c) in &self.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    /// Applies a map to every coefficient (used for jet truncation of outputs).
    pub fn map_base(&self, f: impl Fn(&BaseElement) -> BaseElement) -> WeylElement {
        self.map_coeffs(f)
    }

    pub fn even_part(&self) -> WeylElement {
        self.filter(|k| k.form_degree() % 2 == 0)
    }

    pub fn odd_part(&self) -> WeylElement {
        self.filter(|k| k.form_degree() % 2 == 1)
    }

    /// Lowest filtration degree at which the two elements differ, comparing
    /// coefficient precision as well as value.
    pub fn first_difference(&self, other: &WeylElement) -> Option<u32> {
        let differs = |k: &WeylKey| match (self.terms.get(k), other.terms.get(k)) {
            (Some(a), Some(b)) => !a.identical(b),
            _ => true,
        };
        self.terms
            .keys()
            .chain(other.terms.keys())
            .filter(|k| differs(k))
            .map(|k| k.filtration())
            .min()
    }

    /// Lowest filtration degree among stored terms.
    pub fn min_filtration(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.filtration()).min()
    }

    pub fn max_filtration(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.filtration()).max()
    }

    /// Scalar part: terms with no y and no forms, as `Σ ħ^k f_k`.
    pub fn scalar_series(&self, max_k: u32) -> Vec<BaseElement> {
        (0..=max_k)
            .map(|k| {
                self.terms
                    .get(&WeylKey::new(Monomial::ONE, 0, k))
                    .cloned()
                    .unwrap_or_else(|| self.space.ring.zero())
            })
            .collect()
    }

    /// Checks vanishing of every coefficient whose key has filtration
    /// `<= max_filtration`, each through the base-degree `horizon`.
    pub fn check_zero(&self, horizon: Option<u32>, max_filtration: u32) -> ZeroCheck {
        let mut verdict = ZeroCheck::Zero;
        for (k, c) in &self.terms {
            if k.filtration() > max_filtration {
                continue;
            }
            match c.check_zero(horizon) {
                ZeroCheck::NonZero => return ZeroCheck::NonZero,
                ZeroCheck::Undetermined { known_below } => {
                    verdict = match verdict {
                        ZeroCheck::Undetermined { known_below: kb } => ZeroCheck::Undetermined {
                            known_below: kb.min(known_below),
                        },
                        _ => ZeroCheck::Undetermined { known_below },
                    }
                }
                ZeroCheck::Zero => {}
            }
        }
        verdict
    }

    /// Minimum coefficient precision over all terms (`None` if all exact).
    pub fn precision(&self) -> Option<u32> {
        self.terms.values().filter_map(|c| c.precision()).min()
    }

    /// Derivative with respect to the fiber variable `y_c`.
    pub fn y_partial(&self, c: usize) -> WeylElement {
        let mut out = self.space.zero();
        for (k, v) in &self.terms {
            if let Some(lower) = k.y.lower(c) {
                let mult = int(k.y.exponent(c) as i64);
                out.add_term(WeylKey { y: lower, ..*k }, v.scale(&mult));
            }
        }
        out
    }

    /// Multiplies by the fiber variable `y_c` (commutative symbol product).
    pub fn y_raise(&self, c: usize) -> WeylElement {
        let mut out = self.space.zero();
        for (k, v) in &self.terms {
            out.add_term(
                WeylKey {
                    y: k.y.raise(c),
                    ..*k
                },
                v.clone(),
            );
        }
        out
    }

    /// Debug serialization: deterministic list of terms.
    pub fn to_json(&self, names: &[String]) -> Value {
        let n = self.space.n;
        Value::Array(
            self.terms
                .iter()
                .map(|(k, c)| {
                    let forms: Vec<usize> = (0..n)
                        .filter(|a| k.forms & (1 << a) != 0)
                        .map(|a| a + 1)
                        .collect();
                    json!({
                        "y": k.y.exponents(n),
                        "forms": forms,
                        "hbar": k.hbar,
                        "coeff": c.render(names),
                    })
                })
                .collect(),
        )
    }

    /// Symbolic rendering such as `1/2*hbar + y1*y2*e1`.
    pub fn render(&self, names: &[String]) -> String {
        let n = self.space.n;
        let mut parts = Vec::new();
        for (k, c) in self.terms.iter().filter(|(_, c)| c.num_terms() > 0) {
            let mut factors = Vec::new();
            let coeff = c.render(names);
            let sign = if coeff == "-1" { "-" } else { "" };
            if coeff != "1" && coeff != "-1" {
                factors.push(if c.num_terms() > 1 {
                    format!("({coeff})")
                } else {
                    coeff
                });
            }
            if k.hbar == 1 {
                factors.push("hbar".into());
            } else if k.hbar > 1 {
                factors.push(format!("hbar^{}", k.hbar));
            }
            let ynames: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
            let ym = k.y.render(&ynames);
            if !ym.is_empty() {
                factors.push(ym);
            }
            let forms: Vec<String> = (0..n)
                .filter(|a| k.forms & (1 << a) != 0)
                .map(|a| format!("e{}", a + 1))
                .collect();
            if !forms.is_empty() {
                factors.push(forms.join("^"));
            }
            if factors.is_empty() {
                factors.push("1".into());
            }
            parts.push(format!("{sign}{}", factors.join("*")));
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, part) in parts.iter().enumerate() {
            match (i, part.strip_prefix('-')) {
                (0, _) => out.push_str(part),
                (_, Some(rest)) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                (_, None) => {
                    out.push_str(" + ");
                    out.push_str(part);
                }
            }
        }
        out
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.space.ring.nvars)
            .map(|i| format!("x{i}"))
            .collect();
        write!(f, "{}", self.render(&names))
    }
}

/// One s-degree component: `(p, q)` = (y-degree, form degree).
pub type SComponent = (u32, u32, WeylElement);

/// Partitions an element by s-degree, ordered by form degree then y-degree.
pub fn s_decompose(a: &WeylElement) -> Vec<SComponent> {
    let mut parts: BTreeMap<(u32, u32), WeylElement> = BTreeMap::new();
    for (k, c) in a.terms() {
        parts
            .entry((k.form_degree(), k.y_degree()))
            .or_insert_with(|| a.space().zero())
            .add_term(*k, c.clone());
    }
    parts.into_iter().map(|((q, p), e)| (p, q, e)).collect()
}

pub(crate) fn factorial(c: u32) -> Rational {
    (1..=c).fold(Rational::one(), |acc, i| acc * int(i as i64))
}
