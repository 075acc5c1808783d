mod common;

use common::{parse, poly};
use dequant::grassmann::berezin_single;
use dequant::{berezin_integrate, g_mul, grassmann_shift_eval, GrassmannElement, PolySymbol, VariableId};
use proptest::prelude::*;

fn element(dim: usize) -> impl Strategy<Value = GrassmannElement> {
    let c = move || poly(dim, 3, 3, true, true, true);
    (c(), c(), c(), c()).prop_map(|(f, g, l, m)| GrassmannElement::new(f, g, l, m).unwrap())
}

fn odd(dim: usize) -> impl Strategy<Value = GrassmannElement> {
    let c = move || poly(dim, 3, 3, true, true, true);
    (c(), c())
        .prop_map(move |(g, l)| GrassmannElement::new(PolySymbol::zero(dim), g, l, PolySymbol::zero(dim)).unwrap())
}

/// `P + theta thetabar * sum_a D^a d_a P`, written out directly.
fn truncated_taylor(p: &PolySymbol, shifts: &[PolySymbol]) -> GrassmannElement {
    let n = p.dim();
    let mut m = PolySymbol::zero(n);
    for (a, d) in shifts.iter().enumerate() {
        m = &m + &(d * &p.partial_derivative(VariableId::Phase(a)));
    }
    GrassmannElement::new(p.clone(), PolySymbol::zero(n), PolySymbol::zero(n), m).unwrap()
}

#[test]
fn basis_products() {
    let (t, tb) = (GrassmannElement::theta(1), GrassmannElement::theta_bar(1));
    assert_eq!(g_mul(&t, &tb).unwrap(), GrassmannElement::theta_theta_bar(1));
    let back = g_mul(&tb, &t).unwrap();
    assert_eq!(back.m, parse("-1", 1));
    assert!(back.f.is_zero() && back.g.is_zero() && back.l.is_zero());
    assert!(g_mul(&t, &t).unwrap().is_zero());
    assert!(g_mul(&tb, &tb).unwrap().is_zero());
    assert!(g_mul(&t, &GrassmannElement::theta(2)).is_err());
}

#[test]
fn shift_eval_examples() {
    let h = parse("1/2*q^2 + 1/2*p^2 + 1/3*q^3*p", 1);
    // hbar omega^{ab} lambda_b: (hbar lp, -hbar lq)
    let d = [parse("h*lp", 1), parse("-h*lq", 1)];
    let x = grassmann_shift_eval(&h, &d).unwrap();
    assert_eq!(x.f, h);
    assert!(x.g.is_zero() && x.l.is_zero());
    let expect =
        &(&d[0] * &h.partial_derivative(VariableId::Phase(0))) + &(&d[1] * &h.partial_derivative(VariableId::Phase(1)));
    assert_eq!(x.m, expect);

    let y = grassmann_shift_eval(&parse("q^2", 1), &[parse("h*lp", 1), PolySymbol::zero(1)]).unwrap();
    assert_eq!(y.f, parse("q^2", 1));
    assert_eq!(y.m, parse("2*q*h*lp", 1));

    let z = grassmann_shift_eval(&parse("7/2", 1), &d).unwrap();
    assert_eq!(z.f, parse("7/2", 1));
    assert!(z.m.is_zero());
    assert!(grassmann_shift_eval(&h, &d[..1]).is_err());
}

#[test]
fn berezin_examples() {
    assert_eq!(berezin_single(&GrassmannElement::theta(1)).unwrap(), parse("1", 1));
    assert!(berezin_single(&GrassmannElement::one(1)).unwrap().is_zero());
    assert!(berezin_integrate(&GrassmannElement::one(1)).is_zero());
    let x = parse("q*lp - 3*h", 1);
    let e = GrassmannElement::theta_theta_bar(1).scale_poly(&x);
    assert_eq!(berezin_integrate(&e), x);
    assert!(berezin_single(&e).is_err());
}

#[test]
fn render_omits_zero_components() {
    let e = GrassmannElement::new(parse("q", 1), PolySymbol::zero(1), PolySymbol::zero(1), parse("2*p", 1)).unwrap();
    assert_eq!(e.to_string(), "q + (2*p)θθ̄");
    assert_eq!(GrassmannElement::theta_bar(1).to_string(), "(1)θ̄");
    assert_eq!(GrassmannElement::zero(1).to_string(), "0");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_associative(x in element(1), y in element(1), z in element(1)) {
        let l = g_mul(&g_mul(&x, &y).unwrap(), &z).unwrap();
        let r = g_mul(&x, &g_mul(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn product_is_bilinear(x in element(1), y in element(1), z in element(1), c in poly(1, 2, 2, true, true, true)) {
        let l = g_mul(&x.add(&y).unwrap(), &z).unwrap();
        let r = g_mul(&x, &z).unwrap().add(&g_mul(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
        prop_assert_eq!(g_mul(&x.scale_poly(&c), &z).unwrap(), g_mul(&x, &z).unwrap().scale_poly(&c));
    }

    #[test]
    fn odd_elements_anticommute(x in odd(1), y in odd(1)) {
        let xy = g_mul(&x, &y).unwrap();
        let yx = g_mul(&y, &x).unwrap();
        prop_assert!(xy.add(&yx).unwrap().is_zero());
        prop_assert!(g_mul(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn shift_eval_matches_truncated_taylor(
        p in poly(2, 5, 5, true, true, true),
        d in prop::collection::vec(poly(2, 2, 3, true, true, true), 4),
    ) {
        let x = grassmann_shift_eval(&p, &d).unwrap();
        prop_assert!(x.g.is_zero());
        prop_assert!(x.l.is_zero());
        prop_assert_eq!(x, truncated_taylor(&p, &d));
    }

    #[test]
    fn shift_eval_is_linear_and_multiplicative(
        a in poly(1, 4, 4, true, true, false),
        b in poly(1, 4, 4, true, true, false),
        d in prop::collection::vec(poly(1, 2, 2, true, true, false), 2),
    ) {
        let sa = grassmann_shift_eval(&a, &d).unwrap();
        let sb = grassmann_shift_eval(&b, &d).unwrap();
        prop_assert_eq!(grassmann_shift_eval(&(&a + &b), &d).unwrap(), sa.add(&sb).unwrap());
        prop_assert_eq!(grassmann_shift_eval(&(&a * &b), &d).unwrap(), g_mul(&sa, &sb).unwrap());
    }

    #[test]
    fn berezin_after_theta_theta_bar_projects_scalar(x in element(1)) {
        let y = g_mul(&GrassmannElement::theta_theta_bar(1), &x).unwrap();
        prop_assert_eq!(berezin_integrate(&y), x.f);
    }
}
