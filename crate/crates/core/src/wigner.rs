//! Discrete Weyl-Wigner layer on a periodic position grid.
//!
//! The symbol of an `n x n` operator (n odd) lives on an `n x n` phase-space
//! lattice with spacings `dq/2`, `dp/2`. Half-integer position shifts are
//! index multiplications by `(n+1)/2`, the inverse of 2 mod n.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{PolySymbol, VariableId};
use crate::spectral::{wavenumbers, Spectral2};

const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Periodic position grid for wavefunctions and operator matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub n_points: usize,
    pub box_length: f64,
    pub hbar: f64,
}

impl SpatialGrid {
    pub fn new(n_points: usize, box_length: f64, hbar: f64) -> Result<Self> {
        if n_points == 0 || !(box_length > 0.0) || !(hbar > 0.0) {
            return Err(Error::Precondition("grid needs n > 0, L > 0, hbar > 0".into()));
        }
        Ok(SpatialGrid { n_points, box_length, hbar })
    }

    /// Box length giving a square phase-space lattice (`dq = dp`).
    pub fn square(n_points: usize, hbar: f64) -> Result<Self> {
        Self::new(n_points, (2.0 * PI * hbar * n_points as f64).sqrt(), hbar)
    }

    pub fn dq(&self) -> f64 {
        self.box_length / self.n_points as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI * self.hbar / self.box_length
    }

    fn center(&self) -> usize {
        self.n_points / 2
    }

    pub fn position(&self, j: usize) -> f64 {
        (j as f64 - self.center() as f64) * self.dq()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.position(j)).collect()
    }

    /// Momenta `hbar * k` in FFT order.
    pub fn momenta(&self) -> Vec<f64> {
        wavenumbers(self.n_points, self.dq()).into_iter().map(|k| k * self.hbar).collect()
    }

    /// The lattice carrying Weyl symbols of operators on this grid.
    pub fn phase_lattice(&self) -> Result<PhaseLattice> {
        if self.n_points.is_multiple_of(2) {
            return Err(Error::EvenGrid(self.n_points));
        }
        PhaseLattice::new(self.n_points, self.n_points, self.dq() / 2.0, self.dp() / 2.0, self.hbar)
    }
}

/// Centered rectangular phase-space lattice with odd sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseLattice {
    pub nq: usize,
    pub np: usize,
    pub dq: f64,
    pub dp: f64,
    pub hbar: f64,
}

impl PhaseLattice {
    pub fn new(nq: usize, np: usize, dq: f64, dp: f64, hbar: f64) -> Result<Self> {
        if nq.is_multiple_of(2) {
            return Err(Error::EvenGrid(nq));
        }
        if np.is_multiple_of(2) {
            return Err(Error::EvenGrid(np));
        }
        if !(dq > 0.0 && dp > 0.0 && hbar > 0.0) {
            return Err(Error::Precondition("lattice spacings and hbar must be positive".into()));
        }
        Ok(PhaseLattice { nq, np, dq, dp, hbar })
    }

    /// Lattice covering `[-q_max, q_max] x [-p_max, p_max]`.
    pub fn covering(nq: usize, np: usize, q_max: f64, p_max: f64, hbar: f64) -> Result<Self> {
        if nq < 3 || np < 3 {
            return Err(Error::Precondition("lattice needs at least 3 points per axis".into()));
        }
        Self::new(nq, np, 2.0 * q_max / (nq - 1) as f64, 2.0 * p_max / (np - 1) as f64, hbar)
    }

    pub fn q(&self, i: usize) -> f64 {
        (i as f64 - ((self.nq - 1) / 2) as f64) * self.dq
    }

    pub fn p(&self, j: usize) -> f64 {
        (j as f64 - ((self.np - 1) / 2) as f64) * self.dp
    }

    pub fn cell(&self) -> f64 {
        self.dq * self.dp
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nq, self.np)
    }

    pub fn q_max(&self) -> f64 {
        self.q(self.nq - 1)
    }

    pub fn p_max(&self) -> f64 {
        self.p(self.np - 1)
    }

    /// The position grid whose operators have symbols on this lattice, if any.
    pub fn weyl_grid(&self) -> Option<SpatialGrid> {
        if self.nq != self.np {
            return None;
        }
        let g = SpatialGrid::new(self.nq, 2.0 * self.nq as f64 * self.dq, self.hbar).ok()?;
        let lat = g.phase_lattice().ok()?;
        (close(lat.dq, self.dq) && close(lat.dp, self.dp)).then_some(g)
    }

    fn same_as(&self, o: &PhaseLattice) -> bool {
        self.nq == o.nq && self.np == o.np && close(self.dq, o.dq) && close(self.dp, o.dp) && close(self.hbar, o.hbar)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub grid: SpatialGrid,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that must already satisfy `sum |psi|^2 dq = 1` to 1e-12.
    pub fn new(grid: SpatialGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n_points {
            return Err(Error::GridMismatch(format!("{} amplitudes for {} points", amplitudes.len(), grid.n_points)));
        }
        let s = StateVector { grid, amplitudes };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Unnormalized(norm));
        }
        Ok(s)
    }

    pub fn normalized(grid: SpatialGrid, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n_points {
            return Err(Error::GridMismatch("amplitude count".into()));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.dq();
        if !(norm > 0.0) {
            return Err(Error::Unnormalized(norm));
        }
        let s = 1.0 / norm.sqrt();
        amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(StateVector { grid, amplitudes })
    }

    /// Gaussian of position width `sigma_q` centred at `(q0, p0)`; coherent when `sigma_q^2 = hbar/2`.
    pub fn gaussian(grid: SpatialGrid, q0: f64, p0: f64, sigma_q: f64) -> Result<Self> {
        let amps = grid
            .positions()
            .into_iter()
            .map(|x| {
                let env = (-(x - q0).powi(2) / (4.0 * sigma_q * sigma_q)).exp();
                Complex64::from_polar(env, p0 * x / grid.hbar)
            })
            .collect();
        Self::normalized(grid, amps)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dq()
    }

    pub fn mean_q(&self) -> f64 {
        let xs = self.grid.positions();
        self.amplitudes.iter().zip(&xs).map(|(a, x)| a.norm_sqr() * x).sum::<f64>() * self.grid.dq()
    }

    pub fn mean_p(&self) -> f64 {
        let mut buf = self.amplitudes.clone();
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
        let ps = self.grid.momenta();
        let total: f64 = buf.iter().map(|a| a.norm_sqr()).sum();
        buf.iter().zip(&ps).map(|(a, p)| a.norm_sqr() * p).sum::<f64>() / total
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        let ov: Complex64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum::<Complex64>()
            * self.grid.dq();
        ov.norm_sqr()
    }

    /// Orthonormal-basis components `psi_j sqrt(dq)`.
    fn unit_components(&self) -> Vec<Complex64> {
        let s = self.grid.dq().sqrt();
        self.amplitudes.iter().map(|a| a * s).collect()
    }
}

/// Operator in the orthonormal position basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub grid: SpatialGrid,
    pub entries: Array2<Complex64>,
}

impl OperatorMatrix {
    pub fn new(grid: SpatialGrid, entries: Array2<Complex64>) -> Result<Self> {
        if entries.dim() != (grid.n_points, grid.n_points) {
            return Err(Error::GridMismatch("matrix shape".into()));
        }
        Ok(OperatorMatrix { grid, entries })
    }

    pub fn identity(grid: SpatialGrid) -> Self {
        let n = grid.n_points;
        OperatorMatrix { grid, entries: Array2::from_shape_fn((n, n), |(i, j)| if i == j { 1.0.into() } else { C0 }) }
    }

    pub fn diagonal(grid: SpatialGrid, f: impl Fn(f64) -> f64) -> Self {
        let n = grid.n_points;
        let xs = grid.positions();
        OperatorMatrix {
            grid,
            entries: Array2::from_shape_fn((n, n), |(i, j)| if i == j { f(xs[i]).into() } else { C0 }),
        }
    }

    pub fn projector(state: &StateVector) -> Self {
        let u = state.unit_components();
        let n = u.len();
        OperatorMatrix { grid: state.grid, entries: Array2::from_shape_fn((n, n), |(i, j)| u[i] * u[j].conj()) }
    }

    pub fn random_hermitian<R: Rng>(grid: SpatialGrid, rng: &mut R) -> Self {
        let n = grid.n_points;
        let a = Array2::from_shape_fn((n, n), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = Array2::from_shape_fn((n, n), |(i, j)| (a[[i, j]] + a[[j, i]].conj()) * 0.5);
        OperatorMatrix { grid, entries: h }
    }

    pub fn dagger(&self) -> Self {
        OperatorMatrix { grid: self.grid, entries: self.entries.t().mapv(|z| z.conj()) }
    }

    pub fn matmul(&self, o: &OperatorMatrix) -> Result<Self> {
        if self.grid != o.grid {
            return Err(Error::GridMismatch("operator grids differ".into()));
        }
        Ok(OperatorMatrix { grid: self.grid, entries: self.entries.dot(&o.entries) })
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diag().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.grid.n_points;
        (0..n).all(|i| (0..n).all(|j| (self.entries[[i, j]] - self.entries[[j, i]].conj()).norm() <= tol))
    }
}

/// A function on a phase-space lattice, indexed `[q, p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSymbol {
    pub lattice: PhaseLattice,
    pub values: Array2<Complex64>,
}

impl GridSymbol {
    pub fn new(lattice: PhaseLattice, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != lattice.shape() {
            return Err(Error::GridMismatch("value array shape".into()));
        }
        Ok(GridSymbol { lattice, values: values.as_standard_layout().into_owned() })
    }

    pub fn from_fn(lattice: PhaseLattice, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn(lattice.shape(), |(i, j)| f(lattice.q(i), lattice.p(j)).into());
        GridSymbol { lattice, values }
    }

    pub fn from_complex_fn(lattice: PhaseLattice, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = Array2::from_shape_fn(lattice.shape(), |(i, j)| f(lattice.q(i), lattice.p(j)));
        GridSymbol { lattice, values }
    }

    pub fn constant(lattice: PhaseLattice, c: f64) -> Self {
        Self::from_fn(lattice, |_, _| c)
    }

    /// Samples a polynomial in `(q, p, hbar)` with `hbar` set to the lattice value.
    pub fn sample_poly(lattice: PhaseLattice, p: &PolySymbol) -> Result<Self> {
        if p.dim() != 1 || p.has_lambda() {
            return Err(Error::Precondition("grid symbols need an N = 1 phase-space polynomial".into()));
        }
        Ok(Self::from_complex_fn(lattice, |q, pp| p.eval(&[q, pp], &[], lattice.hbar)))
    }

    /// Symbol of the identity operator on a Weyl lattice: `2 (-1)^{JK}`.
    pub fn weyl_unit(lattice: PhaseLattice) -> Self {
        let (cq, cp) = ((lattice.nq - 1) / 2, (lattice.np - 1) / 2);
        let values = Array2::from_shape_fn(lattice.shape(), |(i, j)| {
            let jk = (i as i64 - cq as i64) * (j as i64 - cp as i64);
            (if jk.rem_euclid(2) == 0 { 2.0 } else { -2.0 }).into()
        });
        GridSymbol { lattice, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn sup_diff(&self, o: &GridSymbol) -> f64 {
        self.values.iter().zip(o.values.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn real_values(&self) -> Array2<f64> {
        self.values.mapv(|z| z.re)
    }

    /// Total of `|rho|` times the cell area over the outer `width` rows and columns.
    pub fn boundary_mass(&self, width: usize) -> f64 {
        let (nq, np) = self.lattice.shape();
        let mut s = 0.0;
        for ((i, j), v) in self.values.indexed_iter() {
            if i < width || j < width || i + width >= nq || j + width >= np {
                s += v.norm();
            }
        }
        s * self.lattice.cell()
    }

    pub fn check_boundary(&self) -> Result<()> {
        let mass = self.boundary_mass(BOUNDARY_CELLS);
        if mass > BOUNDARY_LIMIT {
            return Err(Error::BoundaryMass { mass, limit: BOUNDARY_LIMIT });
        }
        Ok(())
    }
}

pub const BOUNDARY_CELLS: usize = 3;
pub const BOUNDARY_LIMIT: f64 = 1e-10;

fn modn(x: i64, n: usize) -> usize {
    x.rem_euclid(n as i64) as usize
}

fn parity_sign(x: i64) -> f64 {
    if x.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Discrete Weyl symbol `O(q_J, p_K)`.
pub fn weyl_symbol(op: &OperatorMatrix) -> Result<GridSymbol> {
    let grid = op.grid;
    let lattice = grid.phase_lattice()?;
    let n = grid.n_points;
    let c = ((n - 1) / 2) as i64;
    let h = n.div_ceil(2) as i64;
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut values = Array2::from_elem((n, n), C0);
    let mut f = vec![C0; n];
    for jj in -c..=c {
        let j = (jj * h).rem_euclid(n as i64);
        for s in 0..n as i64 {
            let a = modn(j + s * h + c, n);
            let b = modn(j - s * h + c, n);
            f[s as usize] = op.entries[[a, b]];
        }
        fft.process(&mut f);
        for kk in -c..=c {
            let v = f[modn(kk * h, n)] * (2.0 * parity_sign(jj * kk));
            values[[(jj + c) as usize, (kk + c) as usize]] = v;
        }
    }
    Ok(GridSymbol { lattice, values })
}

/// Inverse of [`weyl_symbol`].
pub fn weyl_quantize(sym: &GridSymbol) -> Result<OperatorMatrix> {
    if sym.lattice.nq.is_multiple_of(2) {
        return Err(Error::EvenGrid(sym.lattice.nq));
    }
    let grid = sym
        .lattice
        .weyl_grid()
        .ok_or_else(|| Error::GridMismatch("lattice is not the Weyl lattice of a position grid".into()))?;
    let n = grid.n_points;
    let c = ((n - 1) / 2) as i64;
    let h = n.div_ceil(2) as i64;
    let ifft = FftPlanner::new().plan_fft_inverse(n);
    let mut entries = Array2::from_elem((n, n), C0);
    let mut f = vec![C0; n];
    let scale = 0.5 / n as f64;
    for jj in -c..=c {
        let j = (jj * h).rem_euclid(n as i64);
        for kk in -c..=c {
            f[modn(kk * h, n)] = sym.values[[(jj + c) as usize, (kk + c) as usize]] * (scale * parity_sign(jj * kk));
        }
        ifft.process(&mut f);
        for s in 0..n as i64 {
            let a = modn(j + s * h + c, n);
            let b = modn(j - s * h + c, n);
            entries[[a, b]] = f[s as usize];
        }
    }
    Ok(OperatorMatrix { grid, entries })
}

/// Wigner function of a pure state on its Weyl lattice, normalised to unit mass.
pub fn wigner_of_state(psi: &StateVector) -> Result<GridSymbol> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized(norm));
    }
    let mut w = weyl_symbol(&OperatorMatrix::projector(psi))?;
    let s = 1.0 / (2.0 * PI * psi.grid.hbar);
    w.values.mapv_inplace(|z| z * s);
    Ok(w)
}

/// Wigner function of a pure state sampled on an arbitrary lattice whose q-points
/// are grid points, by the chord sum with step `dq`.
pub fn wigner_on_lattice(psi: &StateVector, lattice: PhaseLattice) -> Result<GridSymbol> {
    let grid = psi.grid;
    if !close(grid.dq(), lattice.dq) {
        return Err(Error::GridMismatch(format!("lattice dq {} differs from grid spacing {}", lattice.dq, grid.dq())));
    }
    if !close(grid.hbar, lattice.hbar) {
        return Err(Error::GridMismatch("hbar differs".into()));
    }
    let n = grid.n_points as i64;
    let cq = ((lattice.nq - 1) / 2) as i64;
    let cg = grid.center() as i64;
    if cq > cg || cq > n - 1 - cg {
        return Err(Error::GridMismatch("lattice q range exceeds the position grid".into()));
    }
    let delta = grid.dq();
    let pref = 2.0 * delta / (2.0 * PI * grid.hbar);
    let mmax = n as usize;
    // phase table e^{-2 i p_K m delta / hbar}
    let table: Vec<Vec<Complex64>> = (0..lattice.np)
        .map(|k| {
            let w = -2.0 * lattice.p(k) * delta / grid.hbar;
            (0..mmax).map(|m| Complex64::from_polar(1.0, w * m as f64)).collect()
        })
        .collect();
    let psi_a = &psi.amplitudes;
    let mut values = Array2::from_elem(lattice.shape(), C0);
    let mut chord = Vec::with_capacity(mmax);
    for i in 0..lattice.nq {
        let j = i as i64 - cq + cg;
        chord.clear();
        let mut m = 0i64;
        while j + m < n && j - m >= 0 {
            chord.push(psi_a[(j + m) as usize] * psi_a[(j - m) as usize].conj());
            m += 1;
        }
        for k in 0..lattice.np {
            let t = &table[k];
            let mut acc = chord[0].re;
            for (mm, z) in chord.iter().enumerate().skip(1) {
                acc += 2.0 * (z * t[mm]).re;
            }
            values[[i, k]] = (pref * acc).into();
        }
    }
    Ok(GridSymbol { lattice, values })
}

/// `symb(quant(A) quant(B))`.
pub fn grid_star(a: &GridSymbol, b: &GridSymbol) -> Result<GridSymbol> {
    if !a.lattice.same_as(&b.lattice) {
        return Err(Error::GridMismatch("star operands on different lattices".into()));
    }
    weyl_symbol(&weyl_quantize(a)?.matmul(&weyl_quantize(b)?)?)
}

/// Coherent Wigner-function parameters for closed-form comparisons.
pub fn gaussian_wigner(q: f64, p: f64, q0: f64, p0: f64, sigma_q: f64, hbar: f64) -> f64 {
    let sigma_p = hbar / (2.0 * sigma_q);
    let e = (q - q0).powi(2) / (2.0 * sigma_q * sigma_q) + (p - p0).powi(2) / (2.0 * sigma_p * sigma_p);
    (-e).exp() / (PI * hbar)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Moyal,
    Liouville,
}

/// A right-hand side `sum_t c_t(q, p) d_q^a d_p^b rho`, with the polynomial
/// coefficients sampled exactly and `rho` differentiated spectrally.
pub struct GridRhs {
    lattice: PhaseLattice,
    spectral: Spectral2,
    terms: Vec<RhsTerm>,
}

pub struct RhsTerm {
    pub coefficient: Array2<Complex64>,
    pub order: (u32, u32),
    multiplier: Array2<Complex64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

impl GridRhs {
    /// `{H, rho}_mb` (or only its Poisson part) for a real polynomial `H(q, p)`.
    pub fn new(h: &PolySymbol, lattice: PhaseLattice, generator: Generator) -> Result<Self> {
        if h.dim() != 1 || h.has_lambda() || h.has_hbar() {
            return Err(Error::Precondition("grid generator needs an N = 1 polynomial H(q, p)".into()));
        }
        if !h.is_real() {
            return Err(Error::Precondition("Hamiltonian must have real coefficients".into()));
        }
        let (q, p) = (VariableId::Phase(0), VariableId::Phase(1));
        let spectral = Spectral2::new(lattice.nq, lattice.np, lattice.dq, lattice.dp);
        let deg = h.phase_degree();
        let mut terms: Vec<RhsTerm> = Vec::new();
        let mut n = 0u32;
        while 2 * n < deg.max(1) {
            let k = 2 * n + 1;
            let series = (if n.is_multiple_of(2) { 1.0 } else { -1.0 })
                * (lattice.hbar * lattice.hbar / 4.0).powi(n as i32)
                / factorial(k);
            for r in 0..=k {
                // C(k,r) (-1)^{k-r} (dq^r dp^{k-r} H)(dp^r dq^{k-r} rho)
                let dh = h.derivative_n(q, r).derivative_n(p, k - r);
                if dh.is_zero() {
                    continue;
                }
                let w = series * binomial(k, r) * if (k - r).is_multiple_of(2) { 1.0 } else { -1.0 };
                let coef = GridSymbol::sample_poly(lattice, &dh)?.values.mapv(|z| z * w);
                let order = (k - r, r);
                if let Some(t) = terms.iter_mut().find(|t| t.order == order) {
                    t.coefficient += &coef;
                } else {
                    let multiplier = spectral.multiplier(order.0, order.1);
                    terms.push(RhsTerm { coefficient: coef, order, multiplier });
                }
            }
            if generator == Generator::Liouville {
                break;
            }
            n += 1;
        }
        Ok(GridRhs { lattice, spectral, terms })
    }

    pub fn lattice(&self) -> PhaseLattice {
        self.lattice
    }

    pub fn terms(&self) -> &[RhsTerm] {
        &self.terms
    }

    /// Applies the operator without the boundary check.
    pub fn apply_unchecked(&mut self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let mut spec = rho.clone();
        self.spectral.forward(&mut spec);
        let mut out = Array2::from_elem(rho.dim(), C0);
        let mut work = Array2::from_elem(rho.dim(), C0);
        for t in &self.terms {
            ndarray::Zip::from(&mut work).and(&spec).and(&t.multiplier).for_each(|w, s, m| *w = s * m);
            self.spectral.inverse(&mut work);
            ndarray::Zip::from(&mut out).and(&work).and(&t.coefficient).for_each(|o, w, c| *o += w * c);
        }
        out
    }

    pub fn apply(&mut self, rho: &GridSymbol) -> Result<GridSymbol> {
        if !rho.lattice.same_as(&self.lattice) {
            return Err(Error::GridMismatch("density lattice differs from generator lattice".into()));
        }
        rho.check_boundary()?;
        Ok(GridSymbol { lattice: self.lattice, values: self.apply_unchecked(&rho.values) })
    }

    /// Upper bound on the operator norm: sum of sup|c| times the largest `|k_q|^a |k_p|^b`.
    pub fn norm_bound(&self) -> f64 {
        let kq = self.spectral.kq().iter().fold(0.0f64, |m, k| m.max(k.abs()));
        let kp = self.spectral.kp().iter().fold(0.0f64, |m, k| m.max(k.abs()));
        self.terms
            .iter()
            .map(|t| {
                let c = t.coefficient.iter().map(|z| z.norm()).fold(0.0, f64::max);
                c * kq.powi(t.order.0 as i32) * kp.powi(t.order.1 as i32)
            })
            .sum()
    }
}

pub fn grid_moyal_rhs(h: &PolySymbol, rho: &GridSymbol) -> Result<GridSymbol> {
    GridRhs::new(h, rho.lattice, Generator::Moyal)?.apply(rho)
}

pub fn grid_liouville_rhs(h: &PolySymbol, rho: &GridSymbol) -> Result<GridSymbol> {
    GridRhs::new(h, rho.lattice, Generator::Liouville)?.apply(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub norm: f64,
    pub mean_q: f64,
    pub mean_p: f64,
    pub purity: f64,
    pub negativity: f64,
    pub min_value: f64,
}

pub fn observables(rho: &GridSymbol) -> Observables {
    let lat = rho.lattice;
    let cell = lat.cell();
    let (mut norm, mut mq, mut mp, mut sq, mut neg) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut min_value = f64::INFINITY;
    for ((i, j), z) in rho.values.indexed_iter() {
        let v = z.re;
        norm += v;
        mq += lat.q(i) * v;
        mp += lat.p(j) * v;
        sq += v * v;
        neg += v.abs() - v;
        min_value = min_value.min(v);
    }
    Observables {
        norm: norm * cell,
        mean_q: mq * cell,
        mean_p: mp * cell,
        purity: 2.0 * PI * lat.hbar * sq * cell,
        negativity: neg * cell,
        min_value,
    }
}

/// Sidecar written next to raw binary arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub n_points: usize,
    pub box_length: f64,
    pub hbar: f64,
    pub kind: String,
    pub time: f64,
    #[serde(default)]
    pub n_p: Option<usize>,
    #[serde(default)]
    pub dq: Option<f64>,
    #[serde(default)]
    pub dp: Option<f64>,
    #[serde(default)]
    pub complex: bool,
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

fn write_f64s(path: &Path, data: impl Iterator<Item = f64>) -> Result<()> {
    let mut bytes = Vec::new();
    for v in data {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes)?;
    Ok(())
}

fn read_f64s(path: &Path) -> Result<Vec<f64>> {
    let bytes = fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Format("binary length is not a multiple of 8".into()));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

/// Writes a grid symbol as little-endian f64 (q-major), real parts only unless `complex`.
pub fn write_symbol(path: &Path, sym: &GridSymbol, kind: &str, time: f64, complex: bool) -> Result<()> {
    let lat = sym.lattice;
    if complex {
        write_f64s(path, sym.values.iter().flat_map(|z| [z.re, z.im]))?;
    } else {
        write_f64s(path, sym.values.iter().map(|z| z.re))?;
    }
    let side = Sidecar {
        n_points: lat.nq,
        box_length: lat.nq as f64 * lat.dq,
        hbar: lat.hbar,
        kind: kind.to_string(),
        time,
        n_p: Some(lat.np),
        dq: Some(lat.dq),
        dp: Some(lat.dp),
        complex,
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
    Ok(())
}

pub fn read_symbol(path: &Path) -> Result<(GridSymbol, Sidecar)> {
    let side: Sidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    let nq = side.n_points;
    let np = side.n_p.unwrap_or(nq);
    let dq = side.dq.unwrap_or(side.box_length / nq as f64);
    let dp = side.dp.ok_or_else(|| Error::Format("sidecar lacks dp".into()))?;
    let lattice = PhaseLattice::new(nq, np, dq, dp, side.hbar)?;
    let raw = read_f64s(path)?;
    let per = if side.complex { 2 } else { 1 };
    if raw.len() != nq * np * per {
        return Err(Error::Format(format!("expected {} values, found {}", nq * np * per, raw.len())));
    }
    let vals: Vec<Complex64> = if side.complex {
        raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
    } else {
        raw.into_iter().map(Complex64::from).collect()
    };
    let values = Array2::from_shape_vec((nq, np), vals).map_err(|e| Error::Format(e.to_string()))?;
    Ok((GridSymbol { lattice, values }, side))
}

pub fn write_state(path: &Path, psi: &StateVector, time: f64) -> Result<()> {
    write_f64s(path, psi.amplitudes.iter().flat_map(|z| [z.re, z.im]))?;
    let g = psi.grid;
    let side = Sidecar {
        n_points: g.n_points,
        box_length: g.box_length,
        hbar: g.hbar,
        kind: "state".into(),
        time,
        n_p: None,
        dq: None,
        dp: None,
        complex: true,
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
    Ok(())
}

pub fn read_state(path: &Path) -> Result<(StateVector, Sidecar)> {
    let side: Sidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    let grid = SpatialGrid::new(side.n_points, side.box_length, side.hbar)?;
    let raw = read_f64s(path)?;
    if raw.len() != 2 * grid.n_points {
        return Err(Error::Format("state length mismatch".into()));
    }
    let amps = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    Ok((StateVector { grid, amplitudes: amps }, side))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_grid_rejected() {
        let g = SpatialGrid::new(64, 10.0, 1.0).unwrap();
        assert_eq!(g.phase_lattice().unwrap_err(), Error::EvenGrid(64));
        let op = OperatorMatrix::identity(g);
        assert!(matches!(weyl_symbol(&op), Err(Error::EvenGrid(64))));
    }

    #[test]
    fn identity_symbol_is_signed_unit() {
        let g = SpatialGrid::square(15, 1.0).unwrap();
        let s = weyl_symbol(&OperatorMatrix::identity(g)).unwrap();
        assert!(s.sup_diff(&GridSymbol::weyl_unit(s.lattice)) < 1e-13);
        let back = weyl_quantize(&GridSymbol::weyl_unit(s.lattice)).unwrap();
        assert!((back.entries - OperatorMatrix::identity(g).entries).iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn lattice_geometry() {
        let g = SpatialGrid::new(21, 7.0, 0.5).unwrap();
        let lat = g.phase_lattice().unwrap();
        assert!((lat.nq as f64 * lat.dq * lat.dp * 4.0 - 2.0 * PI * 0.5).abs() < 1e-12);
        assert_eq!(lat.weyl_grid(), Some(g));
        assert!((g.dq() * g.dp() * g.n_points as f64 - 2.0 * PI * g.hbar).abs() < 1e-12);
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let lat = PhaseLattice::new(5, 7, 0.1, 0.2, 1.0).unwrap();
        let s = GridSymbol::from_complex_fn(lat, |q, p| Complex64::new(q, p * p));
        let path = dir.path().join("sym.bin");
        write_symbol(&path, &s, "test", 0.5, true).unwrap();
        let (back, side) = read_symbol(&path).unwrap();
        assert_eq!(back, s);
        assert_eq!(side.time, 0.5);
        let psi = StateVector::gaussian(SpatialGrid::new(16, 8.0, 1.0).unwrap(), 0.0, 0.0, 0.7).unwrap();
        let spath = dir.path().join("psi.bin");
        write_state(&spath, &psi, 1.0).unwrap();
        assert_eq!(read_state(&spath).unwrap().0, psi);
    }
}
