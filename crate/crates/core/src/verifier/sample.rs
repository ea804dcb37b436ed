use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exactring::{rat, BaseElement, BaseRing, Monomial};

/// Deterministic source of test inputs.
pub struct Sampler {
    rng: ChaCha8Rng,
    ring: BaseRing,
}

impl Sampler {
    pub fn new(seed: u64, ring: BaseRing) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ring,
        }
    }

    fn exponents(&mut self, max_degree: u32) -> Monomial {
        let m = self.ring.nvars;
        let total = self.rng.gen_range(0..=max_degree);
        let mut e = vec![0u32; m];
        for _ in 0..total {
            e[self.rng.gen_range(0..m)] += 1;
        }
        Monomial::from_exponents(&e)
    }

    /// A monomial of total degree `<= max_degree` with coefficient one.
    pub fn monomial(&mut self, max_degree: u32) -> BaseElement {
        let m = self.exponents(max_degree);
        self.ring.monomial(m, rat(1, 1))
    }

    /// A sum of up to three terms of degree `<= max_degree` with small
    /// rational coefficients.
    pub fn polynomial(&mut self, max_degree: u32) -> BaseElement {
        let terms = self.rng.gen_range(1..=3);
        let mut out = self.ring.zero();
        for _ in 0..terms {
            let m = self.exponents(max_degree);
            let num = self.rng.gen_range(-3i64..=3);
            let den = self.rng.gen_range(1i64..=2);
            out += &self.ring.monomial(m, rat(num, den));
        }
        if out.is_zero() {
            out = self.ring.one();
        }
        out
    }

    pub fn pairs(&mut self, count: usize, max_degree: u32) -> Vec<(BaseElement, BaseElement)> {
        (0..count)
            .map(|_| (self.polynomial(max_degree), self.polynomial(max_degree)))
            .collect()
    }

    pub fn triples(&mut self, count: usize, max_degree: u32) -> Vec<[BaseElement; 3]> {
        (0..count)
            .map(|_| {
                [
                    self.polynomial(max_degree),
                    self.polynomial(max_degree),
                    self.polynomial(max_degree),
                ]
            })
            .collect()
    }
}

/// All monomials in `m` variables of total degree `<= max_degree`.
pub fn all_monomials(ring: BaseRing, max_degree: u32) -> Vec<BaseElement> {
    fn rec(m: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            rec(m, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut exps = Vec::new();
    rec(ring.nvars, max_degree, &mut Vec::new(), &mut exps);
    exps.iter()
        .map(|e| ring.monomial(Monomial::from_exponents(e), rat(1, 1)))
        .collect()
}
