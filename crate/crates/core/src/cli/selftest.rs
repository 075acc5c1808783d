//! Reduced-size invariant suites behind `dequant selftest`.

use std::time::Instant;

use crate::dynamics::{conservation, propagate, EvolutionConfig};
use crate::grassmann::{g_mul, GrassmannElement};
use crate::moyal::{
    bidifferential_power, classical_extended_hamiltonian, dequantise_with, lambda_to_operator, marinov_hamiltonian,
    moyal_bracket, moyal_bracket_via_star, poisson_bracket, star_product, Mutation,
};
use crate::oracle::{oracle_wigner_trajectory, SplitHamiltonian};
use crate::parse::parse_poly;
use crate::poly::PolySymbol;
use crate::random::{random_poly, random_quadratic, rng, RandomPolySpec};
use crate::rational::{ComplexRational, Rational};
use crate::wigner::{
    gaussian_wigner, grid_star, weyl_quantize, weyl_symbol, Generator, GridSymbol, OperatorMatrix, PhaseLattice,
    SpatialGrid, StateVector,
};

type Check = std::result::Result<(), String>;

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub seconds: f64,
    pub message: Option<String>,
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn p(text: &str, dim: usize) -> std::result::Result<PolySymbol, String> {
    parse_poly(text, dim).map_err(err)
}

fn symbolic() -> Check {
    let mut r = rng(11);
    for dim in 1..=2 {
        let spec = RandomPolySpec { complex: true, with_hbar: true, ..RandomPolySpec::phase(dim, 4) };
        for _ in 0..20 {
            let (a, b, c) = (random_poly(&mut r, &spec), random_poly(&mut r, &spec), random_poly(&mut r, &spec));
            ensure!(&(&a * &b) * &c == &a * &(&b * &c), "product is not associative");
            ensure!(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), "product does not distribute");
            ensure!(p(&a.to_string(), dim)? == a, "render/parse round trip failed for {a}");
        }
    }
    ensure!(p("q*p", 1)?.to_string() == "q*p", "rendering of q*p");
    Ok(())
}

fn grassmann() -> Check {
    let dim = 1;
    let (t, tb) = (GrassmannElement::theta(dim), GrassmannElement::theta_bar(dim));
    ensure!(g_mul(&t, &t).map_err(err)?.is_zero(), "theta^2 != 0");
    let a = g_mul(&t, &tb).map_err(err)?;
    let b = g_mul(&tb, &t).map_err(err)?;
    ensure!(a.add(&b).map_err(err)?.is_zero(), "theta and theta-bar do not anticommute");
    let mut r = rng(12);
    let spec = RandomPolySpec::phase(dim, 3);
    for _ in 0..10 {
        let e = |r: &mut _| {
            GrassmannElement::new(
                random_poly(r, &spec),
                random_poly(r, &spec),
                random_poly(r, &spec),
                random_poly(r, &spec),
            )
        };
        let (x, y, z) = (e(&mut r).map_err(err)?, e(&mut r).map_err(err)?, e(&mut r).map_err(err)?);
        let l = g_mul(&g_mul(&x, &y).map_err(err)?, &z).map_err(err)?;
        let rr = g_mul(&x, &g_mul(&y, &z).map_err(err)?).map_err(err)?;
        ensure!(l == rr, "Grassmann product is not associative");
    }
    Ok(())
}

fn moyal() -> Check {
    ensure!(star_product(&p("q", 1)?, &p("p", 1)?).map_err(err)?.to_string() == "q*p + 1/2*i*h", "q star p");
    ensure!(moyal_bracket(&p("q^3", 1)?, &p("p^3", 1)?).map_err(err)? == p("9*q^2*p^2 - 3/2*h^2", 1)?, "{{q^3, p^3}}");
    let mut r = rng(13);
    for dim in 1..=2 {
        let spec = RandomPolySpec::phase(dim, 4);
        for _ in 0..15 {
            let (a, b) = (random_poly(&mut r, &spec), random_poly(&mut r, &spec));
            let mb = moyal_bracket(&a, &b).map_err(err)?;
            ensure!(mb == moyal_bracket_via_star(&a, &b).map_err(err)?, "bracket series differs from star commutator");
            ensure!(mb == -moyal_bracket(&b, &a).map_err(err)?, "bracket is not antisymmetric");
            let d = &mb - &poisson_bracket(&a, &b).map_err(err)?;
            ensure!(d.hbar_min_degree().is_none_or(|k| k >= 2), "moyal - poisson has an O(hbar) term");
            ensure!(bidifferential_power(&a, &b, 0).map_err(err)? == &a * &b, "B_0 is not the product");
        }
    }
    Ok(())
}

fn dequant_cases(mutation: Mutation, count: usize) -> std::result::Result<usize, String> {
    let mut r = rng(7);
    let mut failures = 0;
    for i in 0..count {
        let h = random_poly(&mut r, &RandomPolySpec::phase(1 + i % 2, 6));
        let rep = dequantise_with(&h, mutation).map_err(err)?;
        if !rep.is_exact() || !rep.hbar_eliminated() {
            failures += 1;
        }
    }
    Ok(failures)
}

fn dequantisation(mutation: Mutation) -> Check {
    let failures = dequant_cases(mutation, 40)?;
    ensure!(failures == 0, "{failures} of 40 Hamiltonians violate the dequantisation identity");
    let mut r = rng(14);
    for _ in 0..10 {
        let h = random_quadratic(&mut r, 1);
        let m = marinov_hamiltonian(&h).map_err(err)?;
        ensure!(m.body == classical_extended_hamiltonian(&h).map_err(err)?.body, "quadratic H does not collapse");
    }
    let half = Rational::new(1.into(), 2.into());
    for _ in 0..10 {
        let h = random_poly(&mut r, &RandomPolySpec::phase(1, 4));
        let f = random_poly(&mut r, &RandomPolySpec::phase(1, 4));
        let lhs = lambda_to_operator(&marinov_hamiltonian(&h).map_err(err)?, &half, &f)
            .map_err(err)?
            .scale(&ComplexRational::from_ratio(2, 1));
        let rhs = moyal_bracket(&h, &f).map_err(err)?.scale(&ComplexRational::i());
        ensure!(lhs == rhs, "Bopp substitution does not reproduce the Moyal bracket");
    }
    Ok(())
}

fn mutations() -> Check {
    for m in [Mutation::FlipBerezinSign, Mutation::DropFactorTwo] {
        let failures = dequant_cases(m, 40)?;
        ensure!(failures > 0, "mutation {m:?} went undetected");
    }
    Ok(())
}

fn wigner() -> Check {
    let grid = SpatialGrid::square(33, 1.0).map_err(err)?;
    let mut r = rng(15);
    for _ in 0..4 {
        let a = OperatorMatrix::random_hermitian(grid, &mut r);
        let b = OperatorMatrix::random_hermitian(grid, &mut r);
        let back = weyl_quantize(&weyl_symbol(&a).map_err(err)?).map_err(err)?;
        let d = (&back.entries - &a.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
        ensure!(d < 1e-10, "Weyl round trip error {d:.3e}");
        let sab = weyl_symbol(&a.matmul(&b).map_err(err)?).map_err(err)?;
        let star = grid_star(&weyl_symbol(&a).map_err(err)?, &weyl_symbol(&b).map_err(err)?).map_err(err)?;
        let rel = sab.sup_diff(&star) / sab.max_abs();
        ensure!(rel < 1e-9, "homomorphism error {rel:.3e}");
    }
    let psi =
        StateVector::gaussian(SpatialGrid::square(65, 1.0).map_err(err)?, 0.0, 0.0, 0.5f64.sqrt()).map_err(err)?;
    let w = crate::wigner::wigner_of_state(&psi).map_err(err)?;
    let o = crate::wigner::observables(&w);
    ensure!((o.norm - 1.0).abs() < 1e-10, "Wigner mass {}", o.norm);
    ensure!((o.purity - 1.0).abs() < 1e-8, "pure-state purity {}", o.purity);
    Ok(())
}

fn dynamics() -> Check {
    let lat = PhaseLattice::covering(45, 45, 7.0, 7.0, 1.0).map_err(err)?;
    let h = p("1/2*q^2 + 1/2*p^2", 1)?;
    let rho0 = GridSymbol::from_fn(lat, |q, pp| gaussian_wigner(q, pp, 1.5, 0.0, 1.0 / 2f64.sqrt(), 1.0));
    let t = 2.0 * std::f64::consts::PI;
    let mut runs = Vec::new();
    for engine in [Generator::Moyal, Generator::Liouville] {
        let cfg = EvolutionConfig {
            engine,
            hamiltonian: h.clone(),
            dt: t / 400.0,
            t_final: t,
            snapshot_stride: 100,
            lattice: lat,
            keep_snapshots: true,
        };
        let traj = propagate(&cfg, &rho0).map_err(err)?;
        let c = conservation(&traj);
        ensure!(c.norm_drift < 1e-8, "{engine:?} norm drift {:.3e}", c.norm_drift);
        runs.push(traj);
    }
    let last = runs[0].snapshots.last().unwrap();
    ensure!(last.sup_diff(runs[1].snapshots.last().unwrap()) < 1e-6, "engines disagree on a quadratic H");
    ensure!(last.sup_diff(&rho0) < 1e-4, "state does not return after one period");
    Ok(())
}

fn oracle() -> Check {
    // fine q spacing keeps the chord sum free of momentum aliasing out to p_max
    let lat = PhaseLattice::covering(61, 45, 7.0, 7.0, 1.0).map_err(err)?;
    let h = p("1/2*p^2 + 1/2*q^2", 1)?;
    let split = SplitHamiltonian::from_poly(&h).map_err(err)?;
    let grid = SpatialGrid::new(123, 123.0 * lat.dq, 1.0).map_err(err)?;
    let sigma = 1.0 / 2f64.sqrt();
    let psi = StateVector::gaussian(grid, 1.5, 0.0, sigma).map_err(err)?;
    let rho0 = GridSymbol::from_fn(lat, |q, pp| gaussian_wigner(q, pp, 1.5, 0.0, sigma, 1.0));
    let cfg = EvolutionConfig {
        engine: Generator::Moyal,
        hamiltonian: h,
        dt: 0.0025,
        t_final: 1.0,
        snapshot_stride: 100,
        lattice: lat,
        keep_snapshots: true,
    };
    let engine = propagate(&cfg, &rho0).map_err(err)?;
    let reference = oracle_wigner_trajectory(&psi, &split, 0.0025, 1.0, 100, Some(lat), true).map_err(err)?.trajectory;
    ensure!(engine.times.len() == reference.times.len(), "schedules differ");
    for k in 0..engine.times.len() {
        let dq = (engine.observables[k].mean_q - reference.observables[k].mean_q).abs();
        ensure!(dq < 1e-5, "mean q differs by {dq:.3e} at t = {}", engine.times[k]);
        let rel = engine.snapshots[k].sup_diff(&reference.snapshots[k]) / rho0.max_abs();
        ensure!(rel < 1e-5, "density differs by {rel:.3e} at t = {}", engine.times[k]);
    }
    Ok(())
}

pub const SUITES: [&str; 8] =
    ["symbolic", "grassmann", "moyal", "dequantisation", "mutations", "wigner", "dynamics", "oracle"];

fn run_suite(name: &str, mutation: Mutation) -> Check {
    match name {
        "symbolic" => symbolic(),
        "grassmann" => grassmann(),
        "moyal" => moyal(),
        "dequantisation" => dequantisation(mutation),
        "mutations" => mutations(),
        "wigner" => wigner(),
        "dynamics" => dynamics(),
        "oracle" => oracle(),
        _ => Err(format!("unknown suite {name}")),
    }
}

/// Runs every suite whose name contains `filter`, printing one line per suite.
pub fn run_selftest(filter: Option<&str>, mutation: Mutation) -> Vec<SuiteResult> {
    let mut out = Vec::new();
    for name in SUITES {
        if filter.is_some_and(|f| !name.contains(f)) {
            continue;
        }
        let start = Instant::now();
        let res = std::panic::catch_unwind(|| run_suite(name, mutation))
            .unwrap_or_else(|_| Err("suite panicked".to_string()));
        let seconds = start.elapsed().as_secs_f64();
        match &res {
            Ok(()) => println!("[PASS] {name:<15} {seconds:>7.2} s"),
            Err(m) => println!("[FAIL] {name:<15} {seconds:>7.2} s  {m}"),
        }
        out.push(SuiteResult { name, passed: res.is_ok(), seconds, message: res.err() });
    }
    out
}
