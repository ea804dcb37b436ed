use fedosov_core::exactring::{poly_parse, BaseElement, BaseRing, Matrix};
use fedosov_core::poisson::*;
use fedosov_core::solver::*;
use fedosov_core::verifier::*;
use fedosov_core::weyl::WeylSpace;

fn names(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("x{i}")).collect()
}

fn matrix(ring: BaseRing, rows: &[&[&str]]) -> Matrix {
    let vars = names(ring.nvars);
    Matrix::from_rows(
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|s| poly_parse(s, &vars, ring).unwrap())
                    .collect()
            })
            .collect(),
    )
    .unwrap()
}

fn connection(
    ring: BaseRing,
    pi: &[&[&str]],
    horizon: Option<u32>,
    dmax: u32,
    n: u32,
) -> FedosovConnection {
    let p = build_structure(
        StructureInput::Symplectic {
            pi: matrix(ring, pi),
        },
        horizon,
    )
    .unwrap();
    let space = WeylSpace::new(p.n, dmax, ring);
    let curv = curvature(&p, space).unwrap();
    solve_r(&p, &curv, space, n).unwrap()
}

const MOYAL: &[&[&str]] = &[&["0", "1"], &["-1", "0"]];
const DEFORMED: &[&[&str]] = &[&["0", "1 + x1*x2"], &["-1 - x1*x2", "0"]];

fn poly_ring() -> BaseRing {
    BaseRing::polynomial(2)
}

fn monomial_triples(seed: u64, count: usize, max_degree: u32) -> Vec<[BaseElement; 3]> {
    let mut s = Sampler::new(seed, poly_ring());
    (0..count)
        .map(|_| {
            [
                s.monomial(max_degree),
                s.monomial(max_degree),
                s.monomial(max_degree),
            ]
        })
        .collect()
}

#[test]
fn moyal_oracle_rejects_nonconstant_matrix() {
    let pi = matrix(poly_ring(), DEFORMED);
    assert!(matches!(
        MoyalStar::new(pi, 2),
        Err(VerifierError::NonConstant { row: 1, col: 2 })
    ));
}

#[test]
fn fedosov_agrees_with_moyal() {
    let fc = connection(poly_ring(), MOYAL, None, 8, 4);
    let fedosov = FedosovStar::new(&fc);
    let oracle = MoyalStar::new(matrix(poly_ring(), MOYAL), 4).unwrap();
    let mons = all_monomials(poly_ring(), 3);
    let pairs: Vec<_> = mons
        .iter()
        .flat_map(|a| mons.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    let c = agreement_check("Moyal agreement", &fedosov, &oracle, &pairs).unwrap();
    assert!(c.pass, "{}", c.detail);
}

#[test]
fn moyal_associativity_and_fault_injection() {
    let fc = connection(poly_ring(), MOYAL, None, 8, 4);
    let triples = monomial_triples(1, 10, 3);
    let report = associativity_check(&FedosovStar::new(&fc), &triples).unwrap();
    assert!(report.pass);
    assert_eq!(report.orders.len(), 5);

    let oracle = MoyalStar::new(matrix(poly_ring(), MOYAL), 4).unwrap();
    let faulty = FaultyStar::new(oracle, 2);
    let report = associativity_check(&faulty, &triples).unwrap();
    assert!(!report.pass);
    assert_eq!(report.first_failing_order(), Some(2));
    assert!(report.orders[..2].iter().all(|o| o.pass));
}

#[test]
fn order_zero_associativity_always_passes() {
    let fc = connection(poly_ring(), MOYAL, None, 2, 0);
    let report = associativity_check(&FedosovStar::new(&fc), &monomial_triples(2, 5, 4)).unwrap();
    assert!(report.pass);
    assert_eq!(report.orders.len(), 1);
}

#[test]
fn deformed_structure_is_associative() {
    let fc = connection(BaseRing::jet(2, 14), DEFORMED, Some(6), 6, 2);
    let star = FedosovStar::new(&fc);
    let mut s = Sampler::new(9, fc.space.ring);
    let report = associativity_check(&star, &s.triples(3, 2)).unwrap();
    assert!(report.pass, "{:?}", report.orders);
    let pi = fc.structure.pi.clone();
    let c = first_order_check(&star, &pi, &s.pairs(5, 3)).unwrap();
    assert!(c.pass, "{}", c.detail);
    let c = jacobi_order2_check(&star, &s.triples(3, 2)).unwrap();
    assert!(c.pass, "{}", c.detail);
    let c = unit_check(&star, &[s.polynomial(3), s.polynomial(3)]).unwrap();
    assert!(c.pass, "{}", c.detail);
}

#[test]
fn hochschild_examples() {
    let ring = BaseRing::polynomial(3);
    let pi = matrix(
        ring,
        &[
            &["0", "x3", "-x2"],
            &["-x3", "0", "x1"],
            &["x2", "-x1", "0"],
        ],
    );
    let samples = Sampler::new(4, ring).triples(10, 3);
    let poisson = |a: &BaseElement, b: &BaseElement| bracket(&pi, a, b);
    let product = |a: &BaseElement, b: &BaseElement| a * b;
    let bad = |a: &BaseElement, b: &BaseElement| &(&a.partial(0) * &b.partial(0)) * a;

    assert!(hochschild_cocycle_check(&poisson, &samples, true, None).pass);
    assert!(hochschild_cocycle_check(&product, &samples, false, None).pass);
    assert!(!hochschild_cocycle_check(&bad, &samples, false, None).pass);

    assert!(transpose_cocycle_check(&poisson, &samples, None).pass);
    assert!(transpose_cocycle_check(&product, &samples, None).pass);
    assert!(!transpose_cocycle_check(&bad, &samples, None).pass);

    assert!(!hochschild_cocycle_check(&product, &samples, true, None).pass);
}

#[test]
fn gauge_examples() {
    let ring = BaseRing::polynomial(2);
    let pi = matrix(ring, MOYAL);
    let pairs = Sampler::new(6, ring).pairs(10, 3);
    let f1 = |a: &BaseElement, b: &BaseElement| bracket(&pi, a, b);
    let zero = |a: &BaseElement| a.ring().zero();
    assert!(gauge_equivalence_check(&f1, &f1, &zero, &pairs, None).pass);

    let shifted = |a: &BaseElement, b: &BaseElement| &bracket(&pi, a, b) + &(a * b);
    let identity = |a: &BaseElement| a.clone();
    assert!(gauge_equivalence_check(&f1, &shifted, &identity, &pairs, None).pass);
    assert!(!gauge_equivalence_check(&f1, &f1, &identity, &pairs, None).pass);

    let d1 = |a: &BaseElement| a.partial(0);
    let coboundary = |a: &BaseElement, b: &BaseElement| {
        &bracket(&pi, a, b)
            + &(&(&(a * &b.partial(0)) - &(a * b).partial(0)) + &(&a.partial(0) * b))
    };
    assert!(gauge_equivalence_check(&f1, &coboundary, &d1, &pairs, None).pass);
}

#[test]
fn unit_for_moyal_oracle() {
    let oracle = MoyalStar::new(matrix(poly_ring(), MOYAL), 3).unwrap();
    let samples: Vec<_> = (0..10)
        .map(|i| Sampler::new(i, poly_ring()).polynomial(4))
        .collect();
    assert!(unit_check(&oracle, &samples).unwrap().pass);
}
