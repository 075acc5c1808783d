//! The exterior algebra on two generators `theta`, `thetabar`, with polynomial coefficients.

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{PolySymbol, VariableId};

/// `f + g*theta + l*thetabar + m*theta*thetabar`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrassmannElement {
    pub f: PolySymbol,
    pub g: PolySymbol,
    pub l: PolySymbol,
    pub m: PolySymbol,
}

impl GrassmannElement {
    pub fn new(f: PolySymbol, g: PolySymbol, l: PolySymbol, m: PolySymbol) -> Result<Self> {
        let d = f.dim();
        for x in [&g, &l, &m] {
            if x.dim() != d {
                return Err(Error::DimensionMismatch { left: d, right: x.dim() });
            }
        }
        Ok(GrassmannElement { f, g, l, m })
    }

    pub fn zero(dim: usize) -> Self {
        let z = PolySymbol::zero(dim);
        GrassmannElement { f: z.clone(), g: z.clone(), l: z.clone(), m: z }
    }

    pub fn scalar(f: PolySymbol) -> Self {
        let z = PolySymbol::zero(f.dim());
        GrassmannElement { f, g: z.clone(), l: z.clone(), m: z }
    }

    pub fn one(dim: usize) -> Self {
        Self::scalar(PolySymbol::one(dim))
    }

    pub fn theta(dim: usize) -> Self {
        let mut x = Self::zero(dim);
        x.g = PolySymbol::one(dim);
        x
    }

    pub fn theta_bar(dim: usize) -> Self {
        let mut x = Self::zero(dim);
        x.l = PolySymbol::one(dim);
        x
    }

    pub fn theta_theta_bar(dim: usize) -> Self {
        let mut x = Self::zero(dim);
        x.m = PolySymbol::one(dim);
        x
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero() && self.g.is_zero() && self.l.is_zero() && self.m.is_zero()
    }

    pub fn is_odd(&self) -> bool {
        self.f.is_zero() && self.m.is_zero()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(GrassmannElement {
            f: self.f.checked_add(&o.f)?,
            g: self.g.checked_add(&o.g)?,
            l: self.l.checked_add(&o.l)?,
            m: self.m.checked_add(&o.m)?,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(GrassmannElement {
            f: self.f.checked_sub(&o.f)?,
            g: self.g.checked_sub(&o.g)?,
            l: self.l.checked_sub(&o.l)?,
            m: self.m.checked_sub(&o.m)?,
        })
    }

    /// Multiplies every component by an even (ordinary) polynomial.
    pub fn scale_poly(&self, c: &PolySymbol) -> Self {
        GrassmannElement { f: &self.f * c, g: &self.g * c, l: &self.l * c, m: &self.m * c }
    }

    pub fn map(&self, op: impl Fn(&PolySymbol) -> Result<PolySymbol>) -> Result<Self> {
        Ok(GrassmannElement { f: op(&self.f)?, g: op(&self.g)?, l: op(&self.l)?, m: op(&self.m)? })
    }
}

pub fn g_mul(x: &GrassmannElement, y: &GrassmannElement) -> Result<GrassmannElement> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: y.dim() });
    }
    let f = &x.f * &y.f;
    let g = &(&x.f * &y.g) + &(&x.g * &y.f);
    let l = &(&x.f * &y.l) + &(&x.l * &y.f);
    // theta*thetabar from g_x l_y, thetabar*theta = -theta*thetabar from l_x g_y
    let m = &(&(&x.f * &y.m) + &(&x.m * &y.f)) + &(&(&x.g * &y.l) - &(&x.l * &y.g));
    Ok(GrassmannElement { f, g, l, m })
}

/// Evaluates `P(phi^a + theta*thetabar*Delta^a)` in the Grassmann algebra.
///
/// Each monomial is expanded by Grassmann multiplication, so the truncation to
/// `P + theta*thetabar * Delta^a d_a P` is a consequence of nilpotency, not an input.
pub fn grassmann_shift_eval(p: &PolySymbol, shifts: &[PolySymbol]) -> Result<GrassmannElement> {
    let d = p.dim();
    if shifts.len() != 2 * d {
        return Err(Error::Precondition(format!("expected {} shifts, got {}", 2 * d, shifts.len())));
    }
    for delta in shifts {
        if delta.dim() != d {
            return Err(Error::DimensionMismatch { left: d, right: delta.dim() });
        }
    }
    let mut powers: Vec<Vec<GrassmannElement>> = vec![vec![GrassmannElement::one(d)]; 2 * d];
    let mut out = GrassmannElement::zero(d);
    for (mono, c) in p.terms() {
        let mut rest = mono.clone();
        let mut acc = GrassmannElement::one(d);
        for a in 0..2 * d {
            let e = mono[a] as usize;
            if e == 0 {
                continue;
            }
            rest[a] = 0;
            let cache = &mut powers[a];
            while cache.len() <= e {
                let base = GrassmannElement {
                    f: PolySymbol::var(d, VariableId::Phase(a)),
                    g: PolySymbol::zero(d),
                    l: PolySymbol::zero(d),
                    m: shifts[a].clone(),
                };
                let next = g_mul(cache.last().unwrap(), &base)?;
                cache.push(next);
            }
            acc = g_mul(&acc, &cache[e])?;
        }
        let coeff = PolySymbol::from_terms(d, [(rest, c.clone())])?;
        out = out.add(&acc.scale_poly(&coeff))?;
    }
    Ok(out)
}

/// Berezin integral over `dthetabar dtheta`, normalised so that `theta*thetabar` integrates to +1.
pub fn berezin_integrate(x: &GrassmannElement) -> PolySymbol {
    x.m.clone()
}

/// Single-generator integral over `dtheta` of `f + g*theta`; returns `g`.
pub fn berezin_single(x: &GrassmannElement) -> Result<PolySymbol> {
    if !x.l.is_zero() || !x.m.is_zero() {
        return Err(Error::Precondition("element involves thetabar".into()));
    }
    Ok(x.g.clone())
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.f.is_zero() {
            parts.push(self.f.to_string());
        }
        for (c, basis) in [(&self.g, "θ"), (&self.l, "θ̄"), (&self.m, "θθ̄")] {
            if !c.is_zero() {
                parts.push(format!("({c}){basis}"));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    #[test]
    fn basis_products() {
        let t = GrassmannElement::theta(1);
        let tb = GrassmannElement::theta_bar(1);
        assert_eq!(g_mul(&t, &tb).unwrap(), GrassmannElement::theta_theta_bar(1));
        let r = g_mul(&tb, &t).unwrap();
        assert_eq!(r.m, parse_poly("-1", 1).unwrap());
        assert!(g_mul(&t, &t).unwrap().is_zero());
        assert!(g_mul(&tb, &tb).unwrap().is_zero());
    }

    #[test]
    fn shift_eval_two_terms() {
        let p = parse_poly("q^2", 1).unwrap();
        let shifts = [parse_poly("h*lp", 1).unwrap(), PolySymbol::zero(1)];
        let x = grassmann_shift_eval(&p, &shifts).unwrap();
        assert_eq!(x.f, p);
        assert!(x.g.is_zero() && x.l.is_zero());
        assert_eq!(x.m, parse_poly("2*q*h*lp", 1).unwrap());
        let c = grassmann_shift_eval(&parse_poly("7", 1).unwrap(), &shifts).unwrap();
        assert!(c.m.is_zero());
    }

    #[test]
    fn berezin_rules() {
        let one = PolySymbol::one(1);
        assert_eq!(berezin_single(&GrassmannElement::theta(1)).unwrap(), one);
        assert!(berezin_single(&GrassmannElement::one(1)).unwrap().is_zero());
        assert!(berezin_integrate(&GrassmannElement::one(1)).is_zero());
        let x = parse_poly("q*p", 1).unwrap();
        let e = GrassmannElement::theta_theta_bar(1).scale_poly(&x);
        assert_eq!(berezin_integrate(&e), x);
    }

    #[test]
    fn display() {
        let x = GrassmannElement::new(
            parse_poly("q", 1).unwrap(),
            PolySymbol::zero(1),
            PolySymbol::zero(1),
            parse_poly("lp", 1).unwrap(),
        )
        .unwrap();
        assert_eq!(x.to_string(), "q + (lp)θθ̄");
    }
}
