use std::fmt;

/// Maximum number of variables a packed exponent vector can hold.
pub const MAX_VARS: usize = 8;

const BITS: u32 = 8;
const MASK: u64 = 0xff;

/// Exponent vector packed into a `u64`, eight bits per variable.
///
/// Variable 0 occupies the most significant byte, so the natural integer
/// ordering is the lexicographic ordering with `x1 > x2 > ...`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    #[inline]
    fn shift(var: usize) -> u32 {
        debug_assert!(var < MAX_VARS);
        (MAX_VARS as u32 - 1 - var as u32) * BITS
    }

    pub fn from_exponents(exps: &[u32]) -> Monomial {
        assert!(
            exps.len() <= MAX_VARS,
            "at most {MAX_VARS} variables are supported"
        );
        let mut packed = 0u64;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e <= MASK as u32, "exponent {e} exceeds the packed range");
            packed |= (e as u64) << Self::shift(i);
        }
        Monomial(packed)
    }

    pub fn var(var: usize) -> Monomial {
        Monomial(1u64 << Self::shift(var))
    }

    #[inline]
    pub fn exponent(self, var: usize) -> u32 {
        ((self.0 >> Self::shift(var)) & MASK) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    #[inline]
    pub fn degree(self) -> u32 {
        let mut x = self.0;
        let mut d = 0;
        while x != 0 {
            d += (x & MASK) as u32;
            x >>= BITS;
        }
        d
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    /// Product of monomials. Panics if an exponent would overflow its byte.
    #[inline]
    pub fn mul(self, other: Monomial) -> Monomial {
        if self.degree() + other.degree() > MASK as u32 {
            for i in 0..MAX_VARS {
                assert!(
                    self.exponent(i) + other.exponent(i) <= MASK as u32,
                    "exponent overflow in monomial product"
                );
            }
        }
        Monomial(self.0 + other.0)
    }

    /// Divides by `var` once; `None` if the exponent is zero.
    #[inline]
    pub fn lower(self, var: usize) -> Option<Monomial> {
        if self.exponent(var) == 0 {
            None
        } else {
            Some(Monomial(self.0 - (1u64 << Self::shift(var))))
        }
    }

    #[inline]
    pub fn raise(self, var: usize) -> Monomial {
        assert!(self.exponent(var) < MASK as u32, "exponent overflow");
        Monomial(self.0 + (1u64 << Self::shift(var)))
    }

    /// Formats as `x1^2*x3` using the given names; the unit monomial is empty.
    pub fn render(self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, name) in names.iter().enumerate() {
            match self.exponent(i) {
                0 => {}
                1 => parts.push(name.clone()),
                e => parts.push(format!("{name}^{e}")),
            }
        }
        parts.join("*")
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exponents(MAX_VARS))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_round_trips() {
        let m = Monomial::from_exponents(&[3, 0, 7]);
        assert_eq!(m.exponents(3), vec![3, 0, 7]);
        assert_eq!(m.degree(), 10);
        assert_eq!(m.lower(1), None);
        assert_eq!(m.lower(2).unwrap().exponent(2), 6);
        assert_eq!(m.mul(Monomial::var(1)).exponents(3), vec![3, 1, 7]);
    }

    #[test]
    fn ordering_is_lex_with_first_variable_dominant() {
        let a = Monomial::from_exponents(&[1, 0]);
        let b = Monomial::from_exponents(&[0, 5]);
        assert!(a > b);
    }
}
