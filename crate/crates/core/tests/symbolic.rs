mod common;

use common::{parse, phase_poly, poly};
use dequant::rational::rational;
use dequant::{hamiltonian_flow_rhs, parse_poly, ComplexRational, Error, PolySymbol, SymplecticForm, VariableId};
use proptest::prelude::*;

fn q() -> VariableId {
    VariableId::Phase(0)
}

fn p() -> VariableId {
    VariableId::Phase(1)
}

#[test]
fn parse_examples() {
    assert_eq!(parse("q^2", 1), PolySymbol::var(1, q()).pow(2));
    assert_eq!(parse("0.5*p^2 + 0.25*q^4", 1), parse("1/2*p^2 + 1/4*q^4", 1));
    assert_eq!(parse("0.5*p^2 + 0.25*q^4", 1).to_string(), "1/4*q^4 + 1/2*p^2");
    assert!(matches!(parse_poly("q^-1", 1), Err(Error::Parse { .. })));
    assert!(matches!(parse_poly("q^1.5", 1), Err(Error::Parse { .. })));
    assert!(parse_poly("q3", 2).is_err());
    assert!(parse_poly("q", 2).is_err());
    assert!(parse_poly("(q + p", 1).is_err());
    assert!(parse_poly("q p", 1).is_err());
    assert_eq!(parse("q1*p2 - lq2 + h", 2).to_string(), "q1*p2 - lq2 + h");
}

#[test]
fn parse_error_reports_position() {
    match parse_poly("q + * p", 1) {
        Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn decimal_literals_are_exact() {
    let c = parse("0.125", 1);
    assert_eq!(c, PolySymbol::constant(1, ComplexRational::from_ratio(1, 8)));
    assert_eq!(parse("1.10", 1), PolySymbol::constant(1, ComplexRational::from_ratio(11, 10)));
}

#[test]
fn ring_examples() {
    assert_eq!(&parse("q + p", 1) + &parse("q - p", 1), parse("2*q", 1));
    assert_eq!((&parse("q", 1) * &parse("p", 1)).to_string(), "q*p");
    let z = &PolySymbol::zero(1) * &parse("q^3 + 7*h*lp", 1);
    assert!(z.is_zero());
    assert_eq!(z.len(), 0);
    assert!(parse("q1", 2).checked_add(&parse("q", 1)).is_err());
}

#[test]
fn derivative_examples() {
    assert_eq!(parse("q^4", 1).partial_derivative(q()), parse("4*q^3", 1));
    assert!(parse("q^4", 1).partial_derivative(p()).is_zero());
    assert_eq!(parse("q^2*p + h*q", 1).partial_derivative(q()), parse("2*q*p + h", 1));
}

#[test]
fn shift_examples() {
    let d = parse("h*lp", 1);
    let out = parse("q^2", 1).shift_substitute(&[d, PolySymbol::zero(1)]).unwrap();
    assert_eq!(out, parse("q^2 + 2*q*h*lp + h^2*lp^2", 1));
    let any = parse("3*q^3*p - 1/2*p + lq*h", 1);
    assert_eq!(any.shift_substitute(&[PolySymbol::zero(1), PolySymbol::zero(1)]).unwrap(), any);
    let gone = parse("q", 1).shift_substitute(&[parse("-q", 1), PolySymbol::zero(1)]).unwrap();
    assert!(gone.is_zero());
    assert!(any.shift_substitute(&[PolySymbol::zero(1)]).is_err());
}

#[test]
fn flow_examples() {
    let f = hamiltonian_flow_rhs(&parse("1/2*q^2 + 1/2*p^2", 1)).unwrap();
    assert_eq!(f, vec![parse("p", 1), parse("-q", 1)]);
    assert!(hamiltonian_flow_rhs(&parse("5/3", 1)).unwrap().iter().all(PolySymbol::is_zero));
    let f = hamiltonian_flow_rhs(&parse("1/4*q^4", 1)).unwrap();
    assert_eq!(f, vec![PolySymbol::zero(1), parse("-q^3", 1)]);
    assert!(hamiltonian_flow_rhs(&parse("q*lp", 1)).is_err());
    assert!(hamiltonian_flow_rhs(&parse("q*h", 1)).is_err());
}

#[test]
fn symplectic_form_identities() {
    for n in 1..=4 {
        let w = SymplecticForm::new(n);
        for a in 0..2 * n {
            for b in 0..2 * n {
                assert_eq!(w.upper(a, b), -w.upper(b, a));
                assert_eq!(w.lower(a, b), -w.upper(a, b));
                let s: i32 = (0..2 * n).map(|c| w.upper(a, c) * w.lower(c, b)).sum();
                assert_eq!(s, i32::from(a == b));
            }
        }
        assert_eq!(w.upper(0, n), 1);
    }
}

#[test]
fn rational_is_reduced() {
    let r = rational(6, -4);
    assert_eq!(r, rational(-3, 2));
    assert_eq!(*r.denom(), 2.into());
    assert_eq!(rational(0, 5), rational(0, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(
        a in poly(2, 3, 4, true, true, true),
        b in poly(2, 3, 4, true, true, true),
        c in poly(2, 3, 4, true, true, true),
    ) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &PolySymbol::one(2), a.clone());
    }

    #[test]
    fn stored_coefficients_are_nonzero(a in poly(1, 4, 6, true, true, true), b in poly(1, 4, 6, true, true, true)) {
        for x in [&a + &b, &a * &b, &a - &b] {
            prop_assert!(x.terms().all(|(_, c)| !c.is_zero()));
        }
    }

    #[test]
    fn render_parse_round_trip(a in poly(2, 4, 6, true, true, true)) {
        let text = a.to_string();
        let back = parse_poly(&text, 2).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn derivatives_commute(a in poly(2, 5, 6, true, true, true), i in 0usize..4, j in 0usize..4) {
        let vars = [VariableId::Phase(0), VariableId::Phase(1), VariableId::Phase(2), VariableId::Phase(3)];
        let (u, v) = (vars[i], vars[j]);
        prop_assert_eq!(a.partial_derivative(u).partial_derivative(v), a.partial_derivative(v).partial_derivative(u));
    }

    #[test]
    fn leibniz_rule(a in phase_poly(1, 4), b in phase_poly(1, 4)) {
        let lhs = (&a * &b).partial_derivative(q());
        let rhs = &(&a.partial_derivative(q()) * &b) + &(&a * &b.partial_derivative(q()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn constant_shift_inverts(
        a in poly(2, 4, 5, true, true, true),
        d in prop::collection::vec(poly(2, 0, 2, true, true, true), 4),
    ) {
        let neg: Vec<PolySymbol> = d.iter().map(|x| -x).collect();
        let there = a.shift_substitute(&d).unwrap();
        prop_assert_eq!(there.shift_substitute(&neg).unwrap(), a);
    }

    #[test]
    fn shift_agrees_with_evaluation(
        a in phase_poly(1, 5),
        d in prop::collection::vec(phase_poly(1, 2), 2),
        x in -1.5f64..1.5,
        y in -1.5f64..1.5,
    ) {
        let shifted = a.shift_substitute(&d).unwrap().eval(&[x, y], &[0.0, 0.0], 0.0);
        let dx = d[0].eval(&[x, y], &[0.0, 0.0], 0.0).re;
        let dy = d[1].eval(&[x, y], &[0.0, 0.0], 0.0).re;
        let direct = a.eval(&[x + dx, y + dy], &[0.0, 0.0], 0.0);
        prop_assert!((shifted - direct).norm() <= 1e-9 * (1.0 + direct.norm()));
    }

    #[test]
    fn eval_is_a_ring_homomorphism(a in poly(1, 3, 4, true, true, true), b in poly(1, 3, 4, true, true, true), x in -1.0f64..1.0) {
        let pt = ([x, 0.3], [0.7, -x], 0.9);
        let e = |z: &PolySymbol| z.eval(&pt.0, &pt.1, pt.2);
        prop_assert!((e(&(&a * &b)) - e(&a) * e(&b)).norm() <= 1e-9 * (1.0 + (e(&a) * e(&b)).norm()));
    }
}
