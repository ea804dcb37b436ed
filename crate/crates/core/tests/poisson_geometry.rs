use fedosov_core::exactring::{int, poly_parse, BaseRing, Matrix, Monomial};
use fedosov_core::poisson::*;
use fedosov_core::weyl::*;
use proptest::prelude::*;

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

fn moyal() -> PoissonStructure {
    let r = BaseRing::polynomial(2);
    build_structure(
        StructureInput::Symplectic {
            pi: matrix(r, &[&["0", "1"], &["-1", "0"]]),
        },
        None,
    )
    .unwrap()
}

fn jet_case() -> PoissonStructure {
    jet_case_at(10)
}

/// Coefficients of a term at filtration `f` are kept through degree `order - f`.
fn jet_case_at(order: u32) -> PoissonStructure {
    let r = BaseRing::jet(2, order);
    let pi = matrix(r, &[&["0", "1 + x1*x2"], &["-1 - x1*x2", "0"]]);
    build_structure(StructureInput::Symplectic { pi }, Some(6)).unwrap()
}

fn four_dim_form(ring: BaseRing) -> Matrix {
    let mut phi = Matrix::zeros(ring, 4, 4);
    phi.set(0, 1, ring.one());
    phi.set(1, 0, ring.one().neg());
    phi.set(2, 3, ring.one());
    phi.set(3, 2, ring.one().neg());
    phi
}

#[test]
fn nabla_of_coordinate_in_moyal_case() {
    let p = moyal();
    let s = WeylSpace::new(2, 6, p.ring());
    let got = nabla(&s.base(&p.ring().var(0)), &p);
    assert_eq!(got, s.form(1).neg());
    assert!(nabla(&s.y(0), &p).is_zero());
    assert!(nabla(&s.y(1), &p).is_zero());
}

#[test]
fn moyal_curvature_vanishes() {
    let p = moyal();
    let s = WeylSpace::new(2, 6, p.ring());
    let curv = curvature(&p, s).unwrap();
    assert!(curv.alpha.is_zero() && curv.beta.is_zero() && curv.b.is_zero() && curv.psi.is_zero());
    assert!(curv.checks.iter().all(|c| c.pass));
}

#[test]
fn jet_curvature_relations_hold() {
    let p = jet_case();
    let s = WeylSpace::new(2, 8, p.ring());
    let curv = curvature(&p, s).unwrap();
    assert!(!curv.b.is_zero());
    assert!(!curv.psi.is_zero());
    for (pq, comp) in [((2, 2), &curv.alpha), ((1, 2), &curv.beta)] {
        for (k, _) in comp.terms() {
            assert_eq!((k.y_degree(), k.form_degree(), k.hbar), (pq.0, pq.1, 0));
        }
    }
    assert_eq!(curv.checks.len(), 7);
}

#[test]
fn inner_potential_of_d_is_d_bar() {
    let p = moyal();
    let s = WeylSpace::new(2, 6, p.ring());
    let images: Vec<_> = (0..2).map(|b| op_d(&s.y(b), &p.fm)).collect();
    assert_eq!(inner_potential(&images, &p).unwrap(), s.d_bar());
    let zero = vec![s.zero(), s.zero()];
    assert!(inner_potential(&zero, &p).unwrap().is_zero());
}

#[test]
fn inner_potential_back_substitutes() {
    let p = moyal();
    let s = WeylSpace::new(2, 6, p.ring());
    let images = vec![weyl_product(&s.hbar(), &s.form(0), &p.fm), s.zero()];
    let v = inner_potential(&images, &p).unwrap();
    for (b, img) in images.iter().enumerate() {
        assert_eq!(&ad_over_hbar(&v, &s.y(b), &p.fm), img);
    }
}

#[test]
fn non_derivation_images_are_rejected() {
    let p = moyal();
    let s = WeylSpace::new(2, 6, p.ring());
    let y1y1 = weyl_product(&s.y(0), &s.y(0), &p.fm);
    let images = vec![y1y1, s.zero()];
    let err = inner_potential(&images, &p).unwrap_err();
    assert!(err.is_invariant_violation());
}

#[test]
fn corrupted_structure_functions_fail_torsion() {
    let r = BaseRing::polynomial(1);
    let phi = four_dim_form(r);
    let mut c = vec![vec![vec![r.zero(); 4]; 4]; 4];
    c[0][1][2] = r.one();
    c[1][0][2] = r.constant(int(-1));
    let input = StructureInput::Explicit {
        pi: Matrix::zeros(r, 1, 1),
        v: Matrix::zeros(r, 4, 1),
        omega: phi.neg(),
        phi,
        c,
    };
    let p = build_structure(input, None).unwrap();
    let s = WeylSpace::new(4, 4, r);
    match curvature(&p, s) {
        Err(PoissonError::Identity(check)) => assert_eq!(check.name, "dψ=0"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn flat_explicit_torus() {
    let r = BaseRing::polynomial(2);
    let pi = matrix(r, &[&["0", "1"], &["-1", "0"]]);
    let c = vec![vec![vec![r.zero(); 2]; 2]; 2];
    let input = StructureInput::Explicit {
        pi: pi.clone(),
        v: pi.clone(),
        phi: pi.clone(),
        omega: pi.neg(),
        c,
    };
    let p = build_structure(input, None).unwrap();
    let curv = curvature(&p, WeylSpace::new(2, 4, r)).unwrap();
    assert!(curv.b.is_zero());
}

#[test]
fn phi_invariance_in_jet_case() {
    let p = jet_case();
    let s = WeylSpace::new(2, 6, p.ring());
    // ∇(φ_12) equals Σ_c (φ(∇_c D_1, D_2) + φ(D_1, ∇_c D_2)) e^c
    let phi12 = p.fm.phi().get(0, 1).clone();
    let lhs = nabla(&s.base(&phi12), &p);
    let mut rhs = s.zero();
    for c in 0..2 {
        let mut coeff = p.ring().zero();
        for k in 0..2 {
            coeff += &(&p.c[c][0][k] * p.fm.phi().get(k, 1));
            coeff += &(&p.c[c][1][k] * p.fm.phi().get(0, k));
        }
        rhs = rhs.add(&s.form(c).mul_base(&coeff));
    }
    assert!(lhs.sub(&rhs).check_zero(Some(6), 6).is_zero());
}

fn element(s: WeylSpace, terms: &[(Vec<u32>, u32, u32, Vec<u32>, i64)]) -> WeylElement {
    let mut e = s.zero();
    let r = s.ring;
    for (y, forms, h, x, c) in terms {
        let coeff = r.monomial(Monomial::from_exponents(x), int(*c));
        let mut piece = s.zero();
        piece.add_term(WeylKey::new(Monomial::from_exponents(y), *forms, *h), coeff);
        e = e.add(&piece);
    }
    e
}

fn terms() -> impl Strategy<Value = Vec<(Vec<u32>, u32, u32, Vec<u32>, i64)>> {
    prop::collection::vec(
        (
            prop::collection::vec(0u32..2, 2),
            0u32..4,
            0u32..2,
            prop::collection::vec(0u32..3, 2),
            -3i64..=3,
        ),
        1..4,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nabla_is_a_derivation(ta in terms(), tb in terms()) {
        let p = jet_case_at(18);
        let s = WeylSpace::new(2, 8, p.ring());
        let (a, b) = (element(s, &ta), element(s, &tb));
        let even = a.filter(|k| k.form_degree() % 2 == 0);
        let odd = a.filter(|k| k.form_degree() % 2 == 1);
        let nb = nabla(&b, &p);
        let lhs = nabla(&weyl_product(&a, &b, &p.fm), &p);
        let rhs = weyl_product(&nabla(&a, &p), &b, &p.fm)
            .add(&weyl_product(&even, &nb, &p.fm))
            .sub(&weyl_product(&odd, &nb, &p.fm));
        prop_assert!(lhs.sub(&rhs).check_zero(Some(6), 8).is_zero());
    }

    #[test]
    fn curvature_acts_by_bracket_on_products(ta in terms()) {
        let p = jet_case_at(18);
        let s = WeylSpace::new(2, 8, p.ring());
        let curv = curvature(&p, s).unwrap();
        let a = element(s, &ta);
        let lhs = ad_over_hbar(&curv.b, &a, &p.fm);
        let na = nabla(&a, &p);
        let da = op_d(&a, &p.fm);
        let rhs = nabla(&na, &p).add(&op_d(&na, &p.fm)).add(&nabla(&da, &p));
        prop_assert!(lhs.sub(&rhs).check_zero(Some(6), 7).is_zero());
    }
}
