use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use super::monomial::{Monomial, MAX_VARS};
pub use super::rational::Rational;
use super::RingError;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Storage policy of a base ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Exact polynomials, no truncation.
    Polynomial,
    /// Power series at the origin modulo terms of total degree `> order`.
    Jet { order: u32 },
}

/// Shape shared by all elements of one base ring: variable count and mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BaseRing {
    pub nvars: usize,
    pub mode: Mode,
}

impl BaseRing {
    pub fn polynomial(nvars: usize) -> Self {
        assert!(
            nvars <= MAX_VARS,
            "at most {MAX_VARS} variables are supported"
        );
        BaseRing {
            nvars,
            mode: Mode::Polynomial,
        }
    }

    pub fn jet(nvars: usize, order: u32) -> Self {
        assert!(
            nvars <= MAX_VARS,
            "at most {MAX_VARS} variables are supported"
        );
        BaseRing {
            nvars,
            mode: Mode::Jet { order },
        }
    }

    pub fn is_jet(&self) -> bool {
        matches!(self.mode, Mode::Jet { .. })
    }

    pub fn order(&self) -> Option<u32> {
        match self.mode {
            Mode::Polynomial => None,
            Mode::Jet { order } => Some(order),
        }
    }

    pub fn zero(&self) -> BaseElement {
        BaseElement {
            ring: *self,
            prec: None,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> BaseElement {
        self.constant(Rational::one())
    }

    pub fn constant(&self, c: Rational) -> BaseElement {
        self.monomial(Monomial::ONE, c)
    }

    pub fn var(&self, i: usize) -> BaseElement {
        assert!(i < self.nvars);
        self.monomial(Monomial::var(i), Rational::one())
    }

    pub fn monomial(&self, m: Monomial, c: Rational) -> BaseElement {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        BaseElement::normalized(*self, None, terms)
    }
}

/// Outcome of testing an element for vanishing up to a degree horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroCheck {
    Zero,
    NonZero,
    /// Only terms of degree `< known_below` are determined, which does not
    /// cover the requested horizon.
    Undetermined {
        known_below: u32,
    },
}

impl ZeroCheck {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroCheck::Zero)
    }
}

/// An element of the base algebra: an exact polynomial or a truncated jet.
///
/// Jets carry a precision: `prec = Some(p)` means only the terms of total
/// degree `< p` are determined, the rest is unknown (and not stored).
/// Truncating a product or series, and differentiating, both lower it.
/// `prec = None` marks an element known exactly.
#[derive(Clone)]
pub struct BaseElement {
    ring: BaseRing,
    prec: Option<u32>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for BaseElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl Eq for BaseElement {}

fn min_prec(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

impl BaseElement {
    fn normalized(
        ring: BaseRing,
        prec: Option<u32>,
        mut terms: BTreeMap<Monomial, Rational>,
    ) -> Self {
        let mut prec = prec;
        if let Mode::Jet { order } = ring.mode {
            if terms.keys().any(|m| m.degree() > order) {
                prec = min_prec(prec, Some(order + 1));
            }
        }
        if let Some(p) = prec {
            terms.retain(|m, c| m.degree() < p && !c.is_zero());
        } else {
            terms.retain(|_, c| !c.is_zero());
        }
        BaseElement { ring, prec, terms }
    }

    pub fn from_terms(
        ring: BaseRing,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert_with(Rational::zero) += c;
        }
        Self::normalized(ring, None, map)
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    /// Equality of stored terms and of precision.
    pub fn identical(&self, other: &Self) -> bool {
        self == other && self.prec == other.prec
    }

    /// Terms of degree below the returned bound are determined; `None` means exact.
    pub fn precision(&self) -> Option<u32> {
        self.prec
    }

    /// Marks everything of degree `>= p` as unknown.
    pub fn with_precision_cap(mut self, p: u32) -> Self {
        self.prec = min_prec(self.prec, Some(p));
        self.terms.retain(|m, _| m.degree() < p);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(Monomial::ONE)
    }

    /// True when the element is an exact constant.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Lowest total degree that may be nonzero (stored or unknown).
    fn valuation(&self) -> Option<u32> {
        let low = self.terms.keys().map(|m| m.degree()).min();
        match (low, self.prec) {
            (Some(l), Some(p)) => Some(l.min(p)),
            (Some(l), None) => Some(l),
            (None, p) => p,
        }
    }

    fn check_ring(&self, other: &Self) -> Result<(), RingError> {
        if self.ring.nvars != other.ring.nvars {
            return Err(RingError::ModeMismatch(format!(
                "{} vs {} variables",
                self.ring.nvars, other.ring.nvars
            )));
        }
        if self.ring.mode != other.ring.mode {
            return Err(RingError::ModeMismatch(format!(
                "{:?} vs {:?}",
                self.ring.mode, other.ring.mode
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, RingError> {
        self.check_ring(other)?;
        Ok(self.add_unchecked(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, RingError> {
        self.check_ring(other)?;
        Ok(self.add_unchecked(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check_ring(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self, negate: bool) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let e = terms.entry(*m).or_insert_with(Rational::zero);
            if negate {
                *e -= c;
            } else {
                *e += c;
            }
        }
        Self::normalized(self.ring, min_prec(self.prec, other.prec), terms)
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        self.mul_below(other, None)
    }

    /// Product with every term of degree `> degree` dropped.
    pub fn mul_truncated(&self, other: &Self, degree: u32) -> Self {
        debug_assert_eq!(self.ring, other.ring);
        self.mul_below(other, Some(degree + 1))
    }

    fn mul_below(&self, other: &Self, bound: Option<u32>) -> Self {
        if (self.is_zero() && self.prec.is_none()) || (other.is_zero() && other.prec.is_none()) {
            return self.ring.zero();
        }
        // error of (a + O(m^pa)) * (b + O(m^pb)) lies in m^min(pa + v(b), pb + v(a))
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (Some(pa), None) => Some(pa + other.valuation().unwrap_or(0)),
            (None, Some(pb)) => Some(pb + self.valuation().unwrap_or(0)),
            (Some(pa), Some(pb)) => Some(
                (pa + other.valuation().unwrap_or(pb)).min(pb + self.valuation().unwrap_or(pa)),
            ),
        };
        let cap = [self.ring.order().map(|o| o + 1), prec, bound]
            .into_iter()
            .flatten()
            .min();
        let mut right: Vec<(Monomial, u32, &Rational)> = other
            .terms
            .iter()
            .map(|(m, c)| (*m, m.degree(), c))
            .collect();
        right.sort_by_key(|t| t.1);
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(self.terms.len() * right.len());
        let mut dropped = false;
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, db, cb) in &right {
                if let Some(c) = cap {
                    if da + db >= c {
                        dropped = true;
                        break;
                    }
                }
                let prod = ca * *cb;
                match acc.entry(ma.mul(*mb)) {
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += prod,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                }
            }
        }
        let mut prec = prec;
        if dropped {
            prec = min_prec(prec, self.ring.order().map(|o| o + 1));
            prec = min_prec(prec, bound);
        }
        Self::normalized(self.ring, prec, acc.into_iter().collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return self.ring.zero();
        }
        let terms = self.terms.iter().map(|(m, v)| (*m, v * c)).collect();
        BaseElement {
            ring: self.ring,
            prec: self.prec,
            terms,
        }
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(m, v)| (*m, -v)).collect();
        BaseElement {
            ring: self.ring,
            prec: self.prec,
            terms,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = self.ring.one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Self {
        assert!(var < self.ring.nvars);
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if let Some(lower) = m.lower(var) {
                terms.insert(lower, c * int(m.exponent(var) as i64));
            }
        }
        let prec = self.prec.map(|p| p.saturating_sub(1));
        Self::normalized(self.ring, prec, terms)
    }

    /// Drops every term of degree `> degree`, recording the loss of precision.
    pub fn truncate(&self, degree: u32) -> Self {
        let mut out = self.clone();
        if out.terms.keys().any(|m| m.degree() > degree) || self.prec.is_some() {
            out.prec = min_prec(out.prec, Some(degree + 1));
        }
        out.terms.retain(|m, _| m.degree() <= degree);
        out
    }

    /// Tests vanishing of all terms of degree `<= horizon` (`None`: all terms).
    pub fn check_zero(&self, horizon: Option<u32>) -> ZeroCheck {
        match horizon {
            None => {
                if let Some(p) = self.prec {
                    if !self.terms.is_empty() {
                        return ZeroCheck::NonZero;
                    }
                    return ZeroCheck::Undetermined { known_below: p };
                }
                if self.terms.is_empty() {
                    ZeroCheck::Zero
                } else {
                    ZeroCheck::NonZero
                }
            }
            Some(h) => {
                if self.terms.keys().any(|m| m.degree() <= h) {
                    return ZeroCheck::NonZero;
                }
                match self.prec {
                    Some(p) if p <= h => ZeroCheck::Undetermined { known_below: p },
                    _ => ZeroCheck::Zero,
                }
            }
        }
    }

    /// Multiplicative inverse of a jet by geometric-series iteration.
    pub fn series_invert(&self) -> Result<Self, RingError> {
        if !self.ring.is_jet() {
            return Err(RingError::PolynomialInverse);
        }
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(RingError::ZeroConstantTerm);
        }
        let inv0 = c0.recip();
        // a = c0 (1 + n), 1/a = inv0 * sum (-n)^k
        let n = (self - &self.ring.constant(c0.clone())).scale(&inv0);
        let neg_n = n.neg();
        let mut term = self.ring.one();
        let mut sum = self.ring.one();
        loop {
            term = &term * &neg_n;
            if term.is_zero() {
                // all further powers vanish or lie beyond the truncation
                sum.prec = min_prec(sum.prec, term.prec);
                break;
            }
            sum = &sum + &term;
        }
        Ok(sum.scale(&inv0))
    }

    /// Human-readable form, highest total degree first: `x1^2 - x1 + 1/4`.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut items: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        items.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(b.0.cmp(a.0)));
        let mut out = String::new();
        for (i, (m, c)) in items.into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = m.render(names);
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&abs.to_string());
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

impl fmt::Debug for BaseElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.ring.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.render(&names))?;
        if let Some(p) = self.prec {
            write!(f, " + O(deg {p})")?;
        }
        Ok(())
    }
}

impl<'a> std::ops::Add<&'a BaseElement> for &'a BaseElement {
    type Output = BaseElement;
    fn add(self, rhs: &BaseElement) -> BaseElement {
        debug_assert_eq!(self.ring, rhs.ring);
        self.add_unchecked(rhs, false)
    }
}

impl<'a> std::ops::Sub<&'a BaseElement> for &'a BaseElement {
    type Output = BaseElement;
    fn sub(self, rhs: &BaseElement) -> BaseElement {
        debug_assert_eq!(self.ring, rhs.ring);
        self.add_unchecked(rhs, true)
    }
}

impl<'a> std::ops::Mul<&'a BaseElement> for &'a BaseElement {
    type Output = BaseElement;
    fn mul(self, rhs: &BaseElement) -> BaseElement {
        debug_assert_eq!(self.ring, rhs.ring);
        self.mul_unchecked(rhs)
    }
}

impl std::ops::AddAssign<&BaseElement> for BaseElement {
    fn add_assign(&mut self, rhs: &BaseElement) {
        debug_assert_eq!(self.ring, rhs.ring);
        for (m, c) in &rhs.terms {
            let e = self.terms.entry(*m).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                self.terms.remove(m);
            }
        }
        if rhs.prec.is_some() {
            self.prec = min_prec(self.prec, rhs.prec);
            if let Some(p) = self.prec {
                self.terms.retain(|m, _| m.degree() < p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(ring: BaseRing, terms: &[(&[u32], Rational)]) -> BaseElement {
        BaseElement::from_terms(
            ring,
            terms
                .iter()
                .map(|(e, c)| (Monomial::from_exponents(e), c.clone())),
        )
    }

    #[test]
    fn difference_of_squares() {
        let r = BaseRing::polynomial(1);
        let a = &r.one() + &r.var(0);
        let b = &r.one() - &r.var(0);
        let expected = poly(r, &[(&[0], int(1)), (&[2], int(-1))]);
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn jet_truncation_kills_high_degree() {
        let r = BaseRing::jet(1, 2);
        let x = r.var(0);
        let x2 = &x * &x;
        let prod = &x2 * &x;
        assert!(prod.is_zero());
        assert_eq!(prod.precision(), Some(3));
    }

    #[test]
    fn sum_and_difference() {
        let r = BaseRing::polynomial(2);
        let s = &r.var(0) + &r.var(1);
        let d = &r.var(0) - &r.var(1);
        assert_eq!(&s + &d, r.var(0).scale(&int(2)));
    }

    #[test]
    fn series_inverse_examples() {
        let r = BaseRing::jet(1, 3);
        let a = &r.one() + &r.var(0);
        let inv = a.series_invert().unwrap();
        let expected = poly(
            r,
            &[
                (&[0], int(1)),
                (&[1], int(-1)),
                (&[2], int(1)),
                (&[3], int(-1)),
            ],
        );
        assert_eq!(inv, expected);

        let r2 = BaseRing::jet(2, 2);
        assert_eq!(
            r2.constant(int(2)).series_invert().unwrap(),
            r2.constant(rat(1, 2))
        );
        let b = &(&r2.one() + &r2.var(0)) + &r2.var(1);
        let inv = b.series_invert().unwrap();
        let expected = poly(
            r2,
            &[
                (&[0, 0], int(1)),
                (&[1, 0], int(-1)),
                (&[0, 1], int(-1)),
                (&[2, 0], int(1)),
                (&[1, 1], int(2)),
                (&[0, 2], int(1)),
            ],
        );
        assert_eq!(inv, expected);
        assert_eq!(&inv * &b, r2.one());
    }

    #[test]
    fn series_inverse_errors() {
        let p = BaseRing::polynomial(1);
        assert_eq!(
            p.one().series_invert().unwrap_err(),
            RingError::PolynomialInverse
        );
        let j = BaseRing::jet(1, 3);
        assert_eq!(
            j.var(0).series_invert().unwrap_err(),
            RingError::ZeroConstantTerm
        );
    }

    #[test]
    fn mode_mismatch_is_reported() {
        let a = BaseRing::polynomial(1).one();
        let b = BaseRing::jet(1, 2).one();
        assert!(matches!(a.checked_add(&b), Err(RingError::ModeMismatch(_))));
        let c = BaseRing::polynomial(2).one();
        assert!(matches!(a.checked_mul(&c), Err(RingError::ModeMismatch(_))));
    }

    #[test]
    fn derivative_lowers_jet_precision() {
        let r = BaseRing::jet(1, 3);
        let inv = (&r.one() + &r.var(0)).series_invert().unwrap();
        assert_eq!(inv.precision(), Some(4));
        let d = inv.partial(0);
        assert_eq!(d.precision(), Some(3));
        // d/dx (1+x)^-1 = -1 + 2x - 3x^2 + O(x^3)
        let expected = poly(r, &[(&[0], int(-1)), (&[1], int(2)), (&[2], int(-3))]);
        assert_eq!(d, expected);
    }

    #[test]
    fn exact_polynomials_stay_exact_in_jet_mode() {
        let r = BaseRing::jet(2, 6);
        let a = &r.var(0) * &r.var(1);
        assert_eq!(a.precision(), None);
        assert_eq!(a.partial(0).precision(), None);
    }

    #[test]
    fn zero_check_respects_precision() {
        let r = BaseRing::jet(1, 3);
        let inv = (&r.one() + &r.var(0)).series_invert().unwrap();
        let res = &(&inv * &(&r.one() + &r.var(0))) - &r.one();
        assert_eq!(res.check_zero(Some(3)), ZeroCheck::Zero);
        let d = res.partial(0).partial(0);
        assert_eq!(
            d.check_zero(Some(2)),
            ZeroCheck::Undetermined { known_below: 2 }
        );
        assert_eq!(d.check_zero(Some(1)), ZeroCheck::Zero);
    }

    #[test]
    fn rendering() {
        let r = BaseRing::polynomial(2);
        let names = vec!["x1".to_string(), "x2".to_string()];
        let e = poly(
            r,
            &[(&[2, 0], int(1)), (&[1, 0], int(-1)), (&[0, 0], rat(1, 4))],
        );
        assert_eq!(e.render(&names), "x1^2 - x1 + 1/4");
        assert_eq!(r.zero().render(&names), "0");
        let f = poly(r, &[(&[1, 1], rat(-3, 2)), (&[0, 0], int(2))]);
        assert_eq!(f.render(&names), "-3/2*x1*x2 + 2");
    }
}
