use crate::error::{Error, Result};
use crate::poly::{PolySymbol, VariableId};
use crate::rational::ComplexRational;

/// The canonical symplectic matrix `[[0, I], [-I, 0]]` on `(q1..qN, p1..pN)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticForm {
    n: usize,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        SymplecticForm { n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `omega^{ab}`.
    pub fn upper(&self, a: usize, b: usize) -> i32 {
        let n = self.n;
        if a < n && b == a + n {
            1
        } else if a >= n && b + n == a {
            -1
        } else {
            0
        }
    }

    /// `omega_{ab}`, the inverse, equal to `-omega^{ab}` entrywise.
    pub fn lower(&self, a: usize, b: usize) -> i32 {
        -self.upper(a, b)
    }

    pub fn upper_matrix(&self) -> Vec<Vec<i32>> {
        let m = 2 * self.n;
        (0..m).map(|a| (0..m).map(|b| self.upper(a, b)).collect()).collect()
    }

    /// Nonzero entries `(a, b, omega^{ab})`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, i32)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| [(i, i + n, 1), (i + n, i, -1)])
    }

    /// `sum_b omega^{ab} x_b` for each a.
    pub fn contract(&self, x: &[PolySymbol]) -> Vec<PolySymbol> {
        let m = 2 * self.n;
        assert_eq!(x.len(), m);
        let mut out = vec![PolySymbol::zero(self.n); m];
        for (a, b, w) in self.nonzero() {
            out[a] = &out[a] + &x[b].scale(&ComplexRational::from_int(w as i64));
        }
        out
    }
}

/// Components `omega^{ab} d_b H` of Hamilton's equations.
pub fn hamiltonian_flow_rhs(h: &PolySymbol) -> Result<Vec<PolySymbol>> {
    if h.has_lambda() || h.has_hbar() {
        return Err(Error::Precondition("Hamiltonian must depend on phase variables only".into()));
    }
    let form = SymplecticForm::new(h.dim());
    let grad: Vec<PolySymbol> = (0..2 * h.dim()).map(|b| h.partial_derivative(VariableId::Phase(b))).collect();
    Ok(form.contract(&grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_structure() {
        for n in 1..4 {
            let w = SymplecticForm::new(n);
            let m = 2 * n;
            for a in 0..m {
                for b in 0..m {
                    assert_eq!(w.upper(a, b), -w.upper(b, a));
                    let s: i32 = (0..m).map(|c| w.upper(a, c) * w.lower(c, b)).sum();
                    assert_eq!(s, i32::from(a == b));
                    let sq: i32 = (0..m).map(|c| w.upper(a, c) * w.upper(c, b)).sum();
                    assert_eq!(sq, -i32::from(a == b));
                }
            }
        }
        assert_eq!(SymplecticForm::new(1).upper_matrix(), vec![vec![0, 1], vec![-1, 0]]);
    }

    #[test]
    fn quartic_flow() {
        let h = crate::parse::parse_poly("1/4*q^4", 1).unwrap();
        let f = hamiltonian_flow_rhs(&h).unwrap();
        assert!(f[0].is_zero());
        assert_eq!(f[1], crate::parse::parse_poly("-q^3", 1).unwrap());
    }
}
