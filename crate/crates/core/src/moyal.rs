//! Moyal calculus on polynomial symbols, extended Hamiltonians and the
//! Grassmann dequantisation pipeline.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{berezin_integrate, grassmann_shift_eval, GrassmannElement};
use crate::parse::parse_poly;
use crate::poly::{PolySymbol, VariableId};
use crate::rational::{ComplexRational, Rational};
use crate::symplectic::SymplecticForm;

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn frac(num: BigInt, den: BigInt) -> ComplexRational {
    ComplexRational::real(Rational::new(num, den))
}

fn same_dim(a: &PolySymbol, b: &PolySymbol) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() })
    }
}

fn require_no_lambda(p: &PolySymbol, what: &str) -> Result<()> {
    if p.has_lambda() {
        Err(Error::Precondition(format!("{what} must not contain lambda variables")))
    } else {
        Ok(())
    }
}

fn require_classical(h: &PolySymbol) -> Result<()> {
    require_no_lambda(h, "Hamiltonian")?;
    if h.has_hbar() {
        return Err(Error::Precondition("Hamiltonian must be hbar-free".into()));
    }
    Ok(())
}

/// All compositions of `k` into `parts` non-negative integers.
fn compositions(k: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut tail in compositions(k - first, parts - 1) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// `(<-d_a omega^{ab} ->d_b)^k` applied to `(A, B)`.
///
/// With `omega` in canonical block form the operator is
/// `sum_i (dq_i^L dp_i^R - dp_i^L dq_i^R)`, expanded multinomially.
pub fn bidifferential_power(a: &PolySymbol, b: &PolySymbol, k: u32) -> Result<PolySymbol> {
    same_dim(a, b)?;
    require_no_lambda(a, "left operand")?;
    require_no_lambda(b, "right operand")?;
    let n = a.dim();
    let mut out = PolySymbol::zero(n);
    if k == 0 {
        return Ok(a * b);
    }
    let kf = factorial(k);
    for comp in compositions(k, 2 * n) {
        // comp[i] pairs dq_i on A with dp_i on B, comp[n+i] pairs dp_i on A with dq_i on B
        let mut da = a.clone();
        let mut db = b.clone();
        let mut denom = BigInt::one();
        let mut sign = 1i32;
        for i in 0..n {
            let (r, s) = (comp[i], comp[n + i]);
            if r > 0 {
                da = da.derivative_n(VariableId::Phase(i), r);
                db = db.derivative_n(VariableId::Phase(n + i), r);
            }
            if s > 0 {
                da = da.derivative_n(VariableId::Phase(n + i), s);
                db = db.derivative_n(VariableId::Phase(i), s);
                if s % 2 == 1 {
                    sign = -sign;
                }
            }
            denom *= factorial(r) * factorial(s);
            if da.is_zero() || db.is_zero() {
                break;
            }
        }
        if da.is_zero() || db.is_zero() {
            continue;
        }
        let c = frac(kf.clone() * BigInt::from(sign), denom);
        out = &out + &(&da * &db).scale(&c);
    }
    Ok(out)
}

fn series_order(a: &PolySymbol, b: &PolySymbol) -> u32 {
    a.phase_degree().min(b.phase_degree())
}

/// `sum_k (1/k!) (i hbar / 2)^k B_k(A, B)`.
pub fn star_product(a: &PolySymbol, b: &PolySymbol) -> Result<PolySymbol> {
    same_dim(a, b)?;
    let n = a.dim();
    let mut out = PolySymbol::zero(n);
    let half_i = ComplexRational::from_ratio(1, 2).mul_i();
    for k in 0..=series_order(a, b) {
        let bk = bidifferential_power(a, b, k)?;
        if bk.is_zero() {
            continue;
        }
        let mut c = frac(BigInt::one(), factorial(k));
        for _ in 0..k {
            c *= &half_i;
        }
        out = &out + &bk.scale(&c).mul_hbar(k);
    }
    Ok(out)
}

/// Odd sine series `sum_n (-1)^n hbar^{2n} / (4^n (2n+1)!) B_{2n+1}(A, B)`.
pub fn moyal_bracket(a: &PolySymbol, b: &PolySymbol) -> Result<PolySymbol> {
    same_dim(a, b)?;
    let n = a.dim();
    let mut out = PolySymbol::zero(n);
    let top = series_order(a, b);
    let mut j = 0u32;
    while 2 * j < top {
        let k = 2 * j + 1;
        let bk = bidifferential_power(a, b, k)?;
        if !bk.is_zero() {
            let den = BigInt::from(4u32).pow(j) * factorial(k);
            let num = if j.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
            out = &out + &bk.scale(&frac(num, den)).mul_hbar(2 * j);
        }
        j += 1;
    }
    Ok(out)
}

/// `(A*B - B*A) / (i hbar)` with exact division by the formal hbar.
pub fn moyal_bracket_via_star(a: &PolySymbol, b: &PolySymbol) -> Result<PolySymbol> {
    let comm = &star_product(a, b)? - &star_product(b, a)?;
    let minus_i = ComplexRational::i().inv().expect("i is invertible");
    Ok(comm.div_hbar()?.scale(&minus_i))
}

pub fn poisson_bracket(a: &PolySymbol, b: &PolySymbol) -> Result<PolySymbol> {
    bidifferential_power(a, b, 1)
}

/// Classical density evolution `d_t rho = {H, rho}_pb`.
pub fn liouville_rhs(h: &PolySymbol, rho: &PolySymbol) -> Result<PolySymbol> {
    require_classical(h)?;
    poisson_bracket(h, rho)
}

/// Wigner evolution `d_t rho = {H, rho}_mb`.
pub fn quantum_liouville_rhs(h: &PolySymbol, rho: &PolySymbol) -> Result<PolySymbol> {
    require_classical(h)?;
    moyal_bracket(h, rho)
}

pub fn hbar2_correction(h: &PolySymbol, rho: &PolySymbol) -> Result<PolySymbol> {
    Ok(&quantum_liouville_rhs(h, rho)? - &liouville_rhs(h, rho)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtendedKind {
    Classical,
    Marinov,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedHamiltonian {
    pub body: PolySymbol,
    pub kind: ExtendedKind,
}

impl ExtendedHamiltonian {
    /// Checks the structural invariant of the kind.
    pub fn check(&self) -> Result<()> {
        match self.kind {
            ExtendedKind::Classical => {
                if self.body.has_hbar() || self.body.lambda_degrees().iter().any(|&d| d != 1) {
                    return Err(Error::Precondition(
                        "classical extended Hamiltonian must be hbar-free and linear in lambda".into(),
                    ));
                }
            }
            ExtendedKind::Marinov => {
                if self.body.negate_lambda() != -&self.body {
                    return Err(Error::Precondition("Marinov Hamiltonian must be odd in lambda".into()));
                }
            }
        }
        Ok(())
    }
}

/// `Delta^a = hbar * omega^{ab} lambda_b`.
fn hbar_omega_lambda(n: usize) -> Vec<PolySymbol> {
    let form = SymplecticForm::new(n);
    let lambdas: Vec<PolySymbol> = (0..2 * n).map(|b| PolySymbol::var(n, VariableId::Lambda(b))).collect();
    form.contract(&lambdas).into_iter().map(|x| x.mul_hbar(1)).collect()
}

fn negated(v: &[PolySymbol]) -> Vec<PolySymbol> {
    v.iter().map(|x| -x).collect()
}

/// Perturbations of the pipeline used to show the identity check can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    #[default]
    None,
    FlipBerezinSign,
    DropFactorTwo,
}

fn marinov_prefactor(m: Mutation) -> ComplexRational {
    match m {
        Mutation::DropFactorTwo => ComplexRational::one(),
        _ => ComplexRational::from_ratio(1, 2),
    }
}

/// `(1/2hbar) [H(phi - hbar omega lambda) - H(phi + hbar omega lambda)]`.
pub fn marinov_hamiltonian(h: &PolySymbol) -> Result<ExtendedHamiltonian> {
    marinov_with(h, Mutation::None)
}

fn marinov_with(h: &PolySymbol, m: Mutation) -> Result<ExtendedHamiltonian> {
    require_classical(h)?;
    let delta = hbar_omega_lambda(h.dim());
    let minus = h.shift_substitute(&negated(&delta))?;
    let plus = h.shift_substitute(&delta)?;
    let body = (&minus - &plus).div_hbar()?.scale(&marinov_prefactor(m));
    Ok(ExtendedHamiltonian { body, kind: ExtendedKind::Marinov })
}

/// `lambda_a omega^{ab} d_b H`.
pub fn classical_extended_hamiltonian(h: &PolySymbol) -> Result<ExtendedHamiltonian> {
    require_classical(h)?;
    let n = h.dim();
    let form = SymplecticForm::new(n);
    let mut body = PolySymbol::zero(n);
    for (a, b, w) in form.nonzero() {
        let term = &PolySymbol::var(n, VariableId::Lambda(a)) * &h.partial_derivative(VariableId::Phase(b));
        body = &body + &term.scale(&ComplexRational::from_int(w as i64));
    }
    Ok(ExtendedHamiltonian { body, kind: ExtendedKind::Classical })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    ExactEqual,
    Mismatch { difference: PolySymbol },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DequantReport {
    pub input: PolySymbol,
    pub marinov: PolySymbol,
    pub shifted: GrassmannElement,
    pub berezin: PolySymbol,
    pub classical: PolySymbol,
    pub verdict: Verdict,
}

#[derive(Debug, Serialize, Deserialize)]
struct ReportJson {
    dim: usize,
    input: String,
    marinov: String,
    shifted: GrassmannJson,
    berezin: String,
    classical: String,
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    difference: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GrassmannJson {
    scalar: String,
    theta: String,
    theta_bar: String,
    theta_theta_bar: String,
}

impl DequantReport {
    pub fn is_exact(&self) -> bool {
        self.verdict == Verdict::ExactEqual
    }

    /// True when the theta-thetabar component carries no hbar.
    pub fn hbar_eliminated(&self) -> bool {
        !self.shifted.m.has_hbar()
    }

    fn to_json_struct(&self) -> ReportJson {
        let (verdict, difference) = match &self.verdict {
            Verdict::ExactEqual => ("exact-equal".to_string(), None),
            Verdict::Mismatch { difference } => ("mismatch".to_string(), Some(difference.to_string())),
        };
        ReportJson {
            dim: self.input.dim(),
            input: self.input.to_string(),
            marinov: self.marinov.to_string(),
            shifted: GrassmannJson {
                scalar: self.shifted.f.to_string(),
                theta: self.shifted.g.to_string(),
                theta_bar: self.shifted.l.to_string(),
                theta_theta_bar: self.shifted.m.to_string(),
            },
            berezin: self.berezin.to_string(),
            classical: self.classical.to_string(),
            verdict,
            difference,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_struct()).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_struct()).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: ReportJson = serde_json::from_str(text)?;
        let p = |s: &str| parse_poly(s, r.dim);
        let verdict = match r.verdict.as_str() {
            "exact-equal" => Verdict::ExactEqual,
            "mismatch" => Verdict::Mismatch { difference: p(r.difference.as_deref().unwrap_or("0"))? },
            other => return Err(Error::Format(format!("unknown verdict '{other}'"))),
        };
        Ok(DequantReport {
            input: p(&r.input)?,
            marinov: p(&r.marinov)?,
            shifted: GrassmannElement::new(
                p(&r.shifted.scalar)?,
                p(&r.shifted.theta)?,
                p(&r.shifted.theta_bar)?,
                p(&r.shifted.theta_theta_bar)?,
            )?,
            berezin: p(&r.berezin)?,
            classical: p(&r.classical)?,
            verdict,
        })
    }
}

pub fn dequantise(h: &PolySymbol) -> Result<DequantReport> {
    dequantise_with(h, Mutation::None)
}

/// Runs the two-rule pipeline, optionally with a deliberate fault.
pub fn dequantise_with(h: &PolySymbol, mutation: Mutation) -> Result<DequantReport> {
    require_classical(h)?;
    let marinov = marinov_with(h, mutation)?.body;
    let delta = hbar_omega_lambda(h.dim());
    let minus = grassmann_shift_eval(h, &negated(&delta))?;
    let plus = grassmann_shift_eval(h, &delta)?;
    let pref = marinov_prefactor(mutation);
    let shifted = minus.sub(&plus)?.map(|x| Ok(x.div_hbar()?.scale(&pref)))?;
    let mut berezin = berezin_integrate(&shifted);
    if mutation == Mutation::FlipBerezinSign {
        berezin = -berezin;
    }
    let classical = classical_extended_hamiltonian(h)?.body;
    let diff = &berezin - &classical;
    let verdict = if diff.is_zero() { Verdict::ExactEqual } else { Verdict::Mismatch { difference: diff } };
    Ok(DequantReport { input: h.clone(), marinov, shifted, berezin, classical, verdict })
}

/// Applies `X` with `lambda_a -> -i s d/dphi^a`, derivatives to the right.
pub fn lambda_to_operator(x: &ExtendedHamiltonian, s: &Rational, f: &PolySymbol) -> Result<PolySymbol> {
    same_dim(&x.body, f)?;
    require_no_lambda(f, "operand")?;
    let n = f.dim();
    let minus_is = ComplexRational::imag(-s.clone());
    let mut out = PolySymbol::zero(n);
    for (mono, c) in x.body.terms() {
        let mut coeff_mono = mono.clone();
        let mut df = f.clone();
        let mut c = c.clone();
        for a in 0..2 * n {
            let e = mono[2 * n + a];
            if e == 0 {
                continue;
            }
            coeff_mono[2 * n + a] = 0;
            df = df.derivative_n(VariableId::Phase(a), e);
            for _ in 0..e {
                c *= &minus_is;
            }
        }
        if df.is_zero() {
            continue;
        }
        let coeff = PolySymbol::from_terms(n, [(coeff_mono, c)])?;
        out = &out + &(&coeff * &df);
    }
    Ok(out)
}
