//! Seeded random polynomials for property suites.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::poly::PolySymbol;
use crate::rational::ComplexRational;

#[derive(Debug, Clone, Copy)]
pub struct RandomPolySpec {
    pub dim: usize,
    pub max_degree: u32,
    pub max_terms: usize,
    pub complex: bool,
    pub with_hbar: bool,
}

impl RandomPolySpec {
    pub fn phase(dim: usize, max_degree: u32) -> Self {
        RandomPolySpec { dim, max_degree, max_terms: 6, complex: false, with_hbar: false }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational<R: Rng>(rng: &mut R) -> ComplexRational {
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-9i64..=9);
    }
    ComplexRational::from_ratio(num, rng.gen_range(1i64..=4))
}

/// Random polynomial in the phase variables (and optionally hbar) with
/// total phase degree at most `max_degree`.
pub fn random_poly<R: Rng>(rng: &mut R, spec: &RandomPolySpec) -> PolySymbol {
    let n = spec.dim;
    let nterms = rng.gen_range(1..=spec.max_terms.max(1));
    let mut terms = Vec::with_capacity(nterms);
    for _ in 0..nterms {
        let mut m = vec![0u32; 4 * n + 1];
        let deg = rng.gen_range(0..=spec.max_degree);
        for _ in 0..deg {
            m[rng.gen_range(0..2 * n)] += 1;
        }
        if spec.with_hbar {
            m[4 * n] = rng.gen_range(0..=2);
        }
        let mut c = small_rational(rng);
        if spec.complex && rng.gen_bool(0.5) {
            c = &c + &small_rational(rng).mul_i();
        }
        terms.push((m, c));
    }
    PolySymbol::from_terms(n, terms).expect("well-formed exponent vectors")
}

/// Random polynomial of exact total degree at most 2.
pub fn random_quadratic<R: Rng>(rng: &mut R, dim: usize) -> PolySymbol {
    random_poly(rng, &RandomPolySpec { dim, max_degree: 2, max_terms: 5, complex: false, with_hbar: false })
}
