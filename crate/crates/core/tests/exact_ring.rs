use fedosov_core::exactring::{
    matrix_invert, poly_parse, rat, ring_arith, series_invert, BaseElement, BaseRing, Matrix,
    Monomial, RingOp,
};
use proptest::prelude::*;

fn element(ring: BaseRing, terms: &[(Vec<u32>, i64, i64)]) -> BaseElement {
    BaseElement::from_terms(
        ring,
        terms
            .iter()
            .map(|(e, p, q)| (Monomial::from_exponents(e), rat(*p, *q))),
    )
}

fn terms(m: usize, max_exp: u32) -> impl Strategy<Value = Vec<(Vec<u32>, i64, i64)>> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, m), -6i64..=6, 1i64..=4),
        0..5,
    )
}

fn same(a: &BaseElement, b: &BaseElement) -> bool {
    a.terms().eq(b.terms())
}

fn canonical(a: &BaseElement) -> bool {
    let cap = a.ring().order().unwrap_or(u32::MAX);
    a.terms().all(|(m, c)| *c != rat(0, 1) && m.degree() <= cap)
}

fn names(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("x{i}")).collect()
}

proptest! {
    #[test]
    fn polynomial_ring_axioms(a in terms(3, 2), b in terms(3, 2), c in terms(3, 2)) {
        let r = BaseRing::polynomial(3);
        let (a, b, c) = (element(r, &a), element(r, &b), element(r, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        for x in [&a * &b, &a + &c, &a - &a] {
            prop_assert!(canonical(&x));
        }
    }

    #[test]
    fn jet_ring_axioms(a in terms(2, 3), b in terms(2, 3), c in terms(2, 3)) {
        let r = BaseRing::jet(2, 4);
        let (a, b, c) = (element(r, &a), element(r, &b), element(r, &c));
        prop_assert!(same(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
        prop_assert!(same(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
        prop_assert!(same(&(&a * &b), &(&b * &a)));
        for x in [&a, &b, &(&a * &b), &(&(&a * &b) * &c), &(&a - &b)] {
            prop_assert!(canonical(x));
        }
    }

    #[test]
    fn checked_arithmetic_matches_operators(a in terms(2, 2), b in terms(2, 2)) {
        let r = BaseRing::polynomial(2);
        let (a, b) = (element(r, &a), element(r, &b));
        prop_assert_eq!(ring_arith(&a, &b, RingOp::Add).unwrap(), &a + &b);
        prop_assert_eq!(ring_arith(&a, &b, RingOp::Sub).unwrap(), &a - &b);
        prop_assert_eq!(ring_arith(&a, &b, RingOp::Mul).unwrap(), &a * &b);
    }

    #[test]
    fn series_inverse_multiplies_to_one(rest in terms(2, 3), c0 in 1i64..=5, sign in prop::bool::ANY) {
        let r = BaseRing::jet(2, 5);
        let c0 = if sign { c0 } else { -c0 };
        let tail: Vec<_> = rest.into_iter().filter(|(e, _, _)| e.iter().sum::<u32>() > 0).collect();
        let a = &element(r, &tail) + &r.constant(rat(c0, 1));
        let inv = series_invert(&a).unwrap();
        prop_assert!(same(&(&a * &inv), &r.one()));
        prop_assert!(canonical(&inv));
    }

    #[test]
    fn matrix_inverse_is_two_sided(
        entries in prop::collection::vec(terms(2, 2), 9),
        diag in prop::collection::vec(1i64..=4, 3),
    ) {
        let r = BaseRing::jet(2, 4);
        let mut p = Matrix::zeros(r, 3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let tail: Vec<_> =
                    entries[3 * i + j].iter().filter(|(e, _, _)| e.iter().sum::<u32>() > 0).cloned().collect();
                let mut v = element(r, &tail);
                if i == j {
                    v = &v + &r.constant(rat(diag[i], 1));
                }
                p.set(i, j, v);
            }
        }
        let inv = matrix_invert(&p).unwrap();
        prop_assert!(p.mul(&inv).unwrap().is_identity_through(Some(4)));
        prop_assert!(inv.mul(&p).unwrap().is_identity_through(Some(4)));
    }

    #[test]
    fn render_then_parse_is_identity(a in terms(3, 3)) {
        let r = BaseRing::polynomial(3);
        let a = element(r, &a);
        let text = a.render(&names(3));
        prop_assert_eq!(poly_parse(&text, &names(3), r).unwrap(), a);
    }
}
