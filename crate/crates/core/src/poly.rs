//! Sparse multivariate polynomials over exact complex rationals.
//!
//! Exponent vectors use the layout `[phi_0 .. phi_2N, lambda_0 .. lambda_2N, hbar]`
//! with the phase block ordered `(q1..qN, p1..pN)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{ComplexRational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VariableId {
    Phase(usize),
    Lambda(usize),
    Hbar,
}

impl VariableId {
    pub fn q(i: usize, dim: usize) -> Self {
        debug_assert!(i < dim);
        VariableId::Phase(i)
    }

    pub fn p(i: usize, dim: usize) -> Self {
        VariableId::Phase(dim + i)
    }

    pub fn lq(i: usize) -> Self {
        VariableId::Lambda(i)
    }

    pub fn lp(i: usize, dim: usize) -> Self {
        VariableId::Lambda(dim + i)
    }

    fn slot(self, dim: usize) -> usize {
        match self {
            VariableId::Phase(a) => a,
            VariableId::Lambda(a) => 2 * dim + a,
            VariableId::Hbar => 4 * dim,
        }
    }

    fn from_slot(slot: usize, dim: usize) -> Self {
        if slot < 2 * dim {
            VariableId::Phase(slot)
        } else if slot < 4 * dim {
            VariableId::Lambda(slot - 2 * dim)
        } else {
            VariableId::Hbar
        }
    }

    /// Name in the parser grammar.
    pub fn name(self, dim: usize) -> String {
        let sub = |i: usize| if dim == 1 { String::new() } else { (i + 1).to_string() };
        match self {
            VariableId::Phase(a) if a < dim => format!("q{}", sub(a)),
            VariableId::Phase(a) => format!("p{}", sub(a - dim)),
            VariableId::Lambda(a) if a < dim => format!("lq{}", sub(a)),
            VariableId::Lambda(a) => format!("lp{}", sub(a - dim)),
            VariableId::Hbar => "h".to_string(),
        }
    }

    fn check(self, dim: usize) -> Result<()> {
        match self {
            VariableId::Phase(a) | VariableId::Lambda(a) if a >= 2 * dim => {
                Err(Error::Precondition(format!("variable index {a} out of range for N = {dim}")))
            }
            _ => Ok(()),
        }
    }
}

pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySymbol {
    dim: usize,
    terms: BTreeMap<Monomial, ComplexRational>,
}

fn check_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a, right: b })
    }
}

impl PolySymbol {
    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "phase-space dimension must be positive");
        PolySymbol { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, ComplexRational::one())
    }

    pub fn constant(dim: usize, c: ComplexRational) -> Self {
        let mut out = Self::zero(dim);
        out.add_term(vec![0; 4 * dim + 1], c);
        out
    }

    pub fn var(dim: usize, v: VariableId) -> Self {
        v.check(dim).expect("variable out of range");
        let mut m = vec![0; 4 * dim + 1];
        m[v.slot(dim)] = 1;
        let mut out = Self::zero(dim);
        out.add_term(m, ComplexRational::one());
        out
    }

    pub fn hbar(dim: usize) -> Self {
        Self::var(dim, VariableId::Hbar)
    }

    /// Builds `c * prod v^e`.
    pub fn monomial(dim: usize, c: ComplexRational, powers: &[(VariableId, u32)]) -> Self {
        let mut m = vec![0; 4 * dim + 1];
        for &(v, e) in powers {
            v.check(dim).expect("variable out of range");
            m[v.slot(dim)] += e;
        }
        let mut out = Self::zero(dim);
        out.add_term(m, c);
        out
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, ComplexRational)>,
    {
        let mut out = Self::zero(dim);
        for (m, c) in terms {
            if m.len() != out.nvars() {
                return Err(Error::Precondition(format!("exponent vector of length {} for N = {dim}", m.len())));
            }
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        4 * self.dim + 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ComplexRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u32]) -> ComplexRational {
        self.terms.get(m).cloned().unwrap_or_else(ComplexRational::zero)
    }

    pub fn exponent(&self, m: &[u32], v: VariableId) -> u32 {
        m[v.slot(self.dim)]
    }

    fn add_term(&mut self, m: Monomial, c: ComplexRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut out = Self::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.add_term(m, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        PolySymbol { dim: self.dim, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&ComplexRational::real(r.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.dim);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    /// Degree in the phase variables only.
    pub fn phase_degree(&self) -> u32 {
        self.terms.keys().map(|m| m[..2 * self.dim].iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: VariableId) -> u32 {
        let s = v.slot(self.dim);
        self.terms.keys().map(|m| m[s]).max().unwrap_or(0)
    }

    /// Smallest power of hbar over all terms; `None` for the zero polynomial.
    pub fn hbar_min_degree(&self) -> Option<u32> {
        let s = 4 * self.dim;
        self.terms.keys().map(|m| m[s]).min()
    }

    pub fn hbar_max_degree(&self) -> u32 {
        self.degree_in(VariableId::Hbar)
    }

    pub fn has_hbar(&self) -> bool {
        self.hbar_max_degree() > 0
    }

    pub fn has_lambda(&self) -> bool {
        let d = self.dim;
        self.terms.keys().any(|m| m[2 * d..4 * d].iter().any(|&e| e > 0))
    }

    pub fn has_phase(&self) -> bool {
        let d = self.dim;
        self.terms.keys().any(|m| m[..2 * d].iter().any(|&e| e > 0))
    }

    /// Total lambda degree of every term, deduplicated and sorted.
    pub fn lambda_degrees(&self) -> Vec<u32> {
        let d = self.dim;
        let mut v: Vec<u32> = self.terms.keys().map(|m| m[2 * d..4 * d].iter().sum()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    pub fn partial_derivative(&self, v: VariableId) -> Self {
        let s = v.slot(self.dim);
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m[s];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[s] = e - 1;
            out.add_term(m2, c * &ComplexRational::from_int(e as i64));
        }
        out
    }

    pub fn derivative_n(&self, v: VariableId, n: u32) -> Self {
        let s = v.slot(self.dim);
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m[s];
            if e < n {
                continue;
            }
            let mut fall = BigInt::one();
            for j in 0..n {
                fall *= BigInt::from(e - j);
            }
            let mut m2 = m.clone();
            m2[s] = e - n;
            out.add_term(m2, c * &ComplexRational::real(Rational::from_integer(fall)));
        }
        out
    }

    /// Substitutes `phi_a -> phi_a + shifts[a]` and expands exactly.
    pub fn shift_substitute(&self, shifts: &[PolySymbol]) -> Result<Self> {
        let d = self.dim;
        if shifts.len() != 2 * d {
            return Err(Error::Precondition(format!("expected {} shifts, got {}", 2 * d, shifts.len())));
        }
        for s in shifts {
            check_dim(d, s.dim)?;
        }
        // cache powers of (phi_a + Delta_a)
        let mut cache: Vec<Vec<PolySymbol>> = vec![vec![Self::one(d)]; 2 * d];
        let mut out = Self::zero(d);
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let mut factor = Self::one(d);
            for a in 0..2 * d {
                let e = m[a] as usize;
                if e == 0 {
                    continue;
                }
                rest[a] = 0;
                let powers = &mut cache[a];
                while powers.len() <= e {
                    let base = &Self::var(d, VariableId::Phase(a)) + &shifts[a];
                    let next = powers.last().unwrap() * &base;
                    powers.push(next);
                }
                factor = &factor * &powers[e];
            }
            let mut mono = Self::zero(d);
            mono.add_term(rest, c.clone());
            let term = &factor * &mono;
            for (m2, c2) in term.terms {
                out.add_term(m2, c2);
            }
        }
        Ok(out)
    }

    /// Sets hbar to zero.
    pub fn at_hbar_zero(&self) -> Self {
        let s = 4 * self.dim;
        PolySymbol {
            dim: self.dim,
            terms: self.terms.iter().filter(|(m, _)| m[s] == 0).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn mul_hbar(&self, k: u32) -> Self {
        let s = 4 * self.dim;
        PolySymbol {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m[s] += k;
                    (m, c.clone())
                })
                .collect(),
        }
    }

    /// Exact division by the formal hbar; fails if any term lacks a factor of hbar.
    pub fn div_hbar(&self) -> Result<Self> {
        let s = 4 * self.dim;
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m[s] == 0 {
                return Err(Error::HbarDivision);
            }
            let mut m = m.clone();
            m[s] -= 1;
            terms.insert(m, c.clone());
        }
        Ok(PolySymbol { dim: self.dim, terms })
    }

    /// `lambda -> -lambda`.
    pub fn negate_lambda(&self) -> Self {
        let d = self.dim;
        PolySymbol {
            dim: d,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let deg: u32 = m[2 * d..4 * d].iter().sum();
                    (m.clone(), if deg % 2 == 1 { -c } else { c.clone() })
                })
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        PolySymbol { dim: self.dim, terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect() }
    }

    /// Evaluates at a point; `lambda` may be empty when the polynomial is lambda-free.
    pub fn eval(&self, phase: &[f64], lambda: &[f64], hbar: f64) -> Complex64 {
        let d = self.dim;
        assert_eq!(phase.len(), 2 * d);
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let (re, im) = c.to_f64_pair();
            let mut v = 1.0;
            for a in 0..2 * d {
                if m[a] > 0 {
                    v *= phase[a].powi(m[a] as i32);
                }
                if m[2 * d + a] > 0 {
                    assert!(!lambda.is_empty(), "lambda values required");
                    v *= lambda[a].powi(m[2 * d + a] as i32);
                }
            }
            if m[4 * d] > 0 {
                v *= hbar.powi(m[4 * d] as i32);
            }
            acc += Complex64::new(re * v, im * v);
        }
        acc
    }

    /// Render order: lambda block, then phase block, then hbar.
    fn render_order(&self) -> Vec<usize> {
        let d = self.dim;
        (2 * d..4 * d).chain(0..2 * d).chain(std::iter::once(4 * d)).collect()
    }

    /// Terms sorted for display: total degree descending, then lexicographic
    /// descending in render order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &ComplexRational)> {
        let order = self.render_order();
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| {
                let ka: Vec<u32> = order.iter().map(|&s| a[s]).collect();
                let kb: Vec<u32> = order.iter().map(|&s| b[s]).collect();
                kb.cmp(&ka)
            })
        });
        v
    }

    fn render_monomial(&self, m: &[u32]) -> String {
        let d = self.dim;
        let parts: Vec<String> = self
            .render_order()
            .into_iter()
            .filter(|&s| m[s] > 0)
            .map(|s| {
                let name = VariableId::from_slot(s, d).name(d);
                if m[s] == 1 {
                    name
                } else {
                    format!("{name}^{}", m[s])
                }
            })
            .collect();
        parts.join("*")
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

/// Splits a coefficient into a sign and a magnitude string (`None` for unit magnitude).
fn split_coefficient(c: &ComplexRational) -> (bool, Option<String>) {
    let one = Rational::one();
    if c.im.is_zero() {
        let neg = c.re.is_negative();
        let a = c.re.abs();
        (neg, if a == one { None } else { Some(a.to_string()) })
    } else if c.re.is_zero() {
        let neg = c.im.is_negative();
        let a = c.im.abs();
        (neg, Some(if a == one { "i".to_string() } else { format!("{a}*i") }))
    } else {
        (false, Some(c.to_string()))
    }
}

impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let (neg, mag) = split_coefficient(c);
            let mono = self.render_monomial(m);
            let body = match (mag, mono.is_empty()) {
                (None, true) => "1".to_string(),
                (None, false) => mono,
                (Some(s), true) => s,
                (Some(s), false) => format!("{s}*{mono}"),
            };
            match (idx, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl Add for &PolySymbol {
    type Output = PolySymbol;
    fn add(self, rhs: &PolySymbol) -> PolySymbol {
        self.checked_add(rhs).expect("PolySymbol dimension mismatch")
    }
}

impl Sub for &PolySymbol {
    type Output = PolySymbol;
    fn sub(self, rhs: &PolySymbol) -> PolySymbol {
        self.checked_sub(rhs).expect("PolySymbol dimension mismatch")
    }
}

impl Mul for &PolySymbol {
    type Output = PolySymbol;
    fn mul(self, rhs: &PolySymbol) -> PolySymbol {
        self.checked_mul(rhs).expect("PolySymbol dimension mismatch")
    }
}

impl Neg for &PolySymbol {
    type Output = PolySymbol;
    fn neg(self) -> PolySymbol {
        self.scale(&ComplexRational::from_int(-1))
    }
}

impl Neg for PolySymbol {
    type Output = PolySymbol;
    fn neg(self) -> PolySymbol {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for PolySymbol {
            type Output = PolySymbol;
            fn $f(self, rhs: PolySymbol) -> PolySymbol {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&PolySymbol> for PolySymbol {
            type Output = PolySymbol;
            fn $f(self, rhs: &PolySymbol) -> PolySymbol {
                (&self).$f(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

pub fn poly_add(a: &PolySymbol, b: &PolySymbol) -> Result<PolySymbol> {
    a.checked_add(b)
}

pub fn poly_sub(a: &PolySymbol, b: &PolySymbol) -> Result<PolySymbol> {
    a.checked_sub(b)
}

pub fn poly_mul(a: &PolySymbol, b: &PolySymbol) -> Result<PolySymbol> {
    a.checked_mul(b)
}

pub fn poly_scale(a: &PolySymbol, c: &ComplexRational) -> PolySymbol {
    a.scale(c)
}

pub fn partial_derivative(p: &PolySymbol, v: VariableId) -> PolySymbol {
    p.partial_derivative(v)
}

pub fn shift_substitute(p: &PolySymbol, shifts: &[PolySymbol]) -> Result<PolySymbol> {
    p.shift_substitute(shifts)
}
