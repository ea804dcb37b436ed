//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' uint)*
//! atom   := rational | variable | '(' expr ')'
//! ```
//! Rationals are integers or `p/q`; the Unicode minus sign is accepted.

use num_bigint::BigInt;
use num_traits::Zero;

use super::base::{BaseElement, BaseRing, Rational};
use super::monomial::Monomial;
use super::RingError;

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    vars: &'a [String],
    ring: BaseRing,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(i, _)| i)
            .unwrap_or_else(|| {
                self.chars
                    .last()
                    .map(|&(i, c)| i + c.len_utf8())
                    .unwrap_or(0)
            })
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, msg: impl Into<String>) -> RingError {
        RingError::Syntax {
            position: self.offset(),
            message: msg.into(),
        }
    }

    fn is_minus(c: char) -> bool {
        c == '-' || c == '\u{2212}'
    }

    fn expr(&mut self) -> Result<BaseElement, RingError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(c) if Self::is_minus(c) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<BaseElement, RingError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                let f = self.unary()?;
                acc = &acc * &f;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<BaseElement, RingError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if Self::is_minus(c) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            _ => self.factor(),
        }
    }

    fn factor(&mut self) -> Result<BaseElement, RingError> {
        let mut base = self.atom()?;
        loop {
            self.skip_ws();
            if self.peek() != Some('^') {
                return Ok(base);
            }
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                self.pos = start;
                return Err(self.error("expected a non-negative integer exponent"));
            }
            let e: u32 = digits
                .parse()
                .map_err(|_| self.error("exponent out of range"))?;
            base = base.pow(e);
        }
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn atom(&mut self) -> Result<BaseElement, RingError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.digits().parse().expect("digits");
                self.skip_ws();
                let mut den = BigInt::from(1);
                if self.peek() == Some('/') {
                    self.pos += 1;
                    self.skip_ws();
                    let d = self.digits();
                    if d.is_empty() {
                        return Err(self.error("expected a denominator"));
                    }
                    den = d.parse().expect("digits");
                    if den.is_zero() {
                        return Err(self.error("zero denominator"));
                    }
                }
                Ok(self.ring.constant(Rational::from_bigints(num, den)))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.offset();
                let mut name = String::new();
                while let Some(c) = self.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(self
                        .ring
                        .monomial(Monomial::var(i), Rational::from_integer(1))),
                    None => Err(RingError::UnknownVariable {
                        name,
                        position: start,
                    }),
                }
            }
            Some(c) => Err(self.error(format!("unexpected character '{c}'"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses `text` over the variables `vars` into an element of `ring`.
pub fn poly_parse(text: &str, vars: &[String], ring: BaseRing) -> Result<BaseElement, RingError> {
    assert_eq!(vars.len(), ring.nvars, "variable list must match the ring");
    let mut p = Parser {
        chars: text.char_indices().collect(),
        pos: 0,
        vars,
        ring,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}
