#![allow(dead_code)]

use dequant::{ComplexRational, PolySymbol};
use proptest::prelude::*;

fn coefficient(complex: bool) -> impl Strategy<Value = ComplexRational> {
    let part = (-6i64..=6, 1i64..=4);
    (part.clone(), part).prop_map(move |((a, b), (c, d))| {
        let re = ComplexRational::from_ratio(a, b);
        if complex {
            &re + &ComplexRational::from_ratio(c, d).mul_i()
        } else {
            re
        }
    })
}

/// Polynomials in the phase variables (and optionally lambda and hbar) for `dim` degrees of freedom.
pub fn poly(
    dim: usize,
    max_deg: u32,
    max_terms: usize,
    lambda: bool,
    hbar: bool,
    complex: bool,
) -> BoxedStrategy<PolySymbol> {
    let nvars = 4 * dim + 1;
    let exps = prop::collection::vec(0..=max_deg, 2 * dim);
    let lam = prop::collection::vec(0..=if lambda { 2u32 } else { 0 }, 2 * dim);
    let h = 0..=if hbar { 2u32 } else { 0 };
    let term = (exps, lam, h, coefficient(complex)).prop_map(move |(e, l, h, c)| {
        // cap the phase degree by scaling exponents down
        let mut e = e;
        while e.iter().sum::<u32>() > max_deg {
            let i = e.iter().position(|&x| x > 0).unwrap();
            e[i] -= 1;
        }
        let mut m = vec![0u32; nvars];
        m[..2 * dim].copy_from_slice(&e);
        m[2 * dim..4 * dim].copy_from_slice(&l);
        m[4 * dim] = h;
        (m, c)
    });
    prop::collection::vec(term, 0..=max_terms)
        .prop_map(move |terms| PolySymbol::from_terms(dim, terms).unwrap())
        .boxed()
}

pub fn phase_poly(dim: usize, max_deg: u32) -> BoxedStrategy<PolySymbol> {
    poly(dim, max_deg, 5, false, false, false)
}

pub fn parse(text: &str, dim: usize) -> PolySymbol {
    dequant::parse_poly(text, dim).unwrap_or_else(|e| panic!("{text}: {e}"))
}
