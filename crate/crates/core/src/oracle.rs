//! Split-operator Schrödinger propagation used as an independent check of the
//! phase-space engines.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::poly::{PolySymbol, VariableId};
use crate::rational::ratio_to_f64;
use crate::wigner::{observables, wigner_of_state, wigner_on_lattice, GridSymbol, PhaseLattice, StateVector};

/// `H = p^2/(2m) + V(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitHamiltonian {
    pub mass: f64,
    pub potential: PolySymbol,
}

impl SplitHamiltonian {
    pub fn new(mass: f64, potential: PolySymbol) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Precondition("mass must be positive".into()));
        }
        if potential.dim() != 1 || potential.has_lambda() || potential.has_hbar() || !potential.is_real() {
            return Err(Error::Precondition("potential must be a real polynomial in q".into()));
        }
        if potential.degree_in(VariableId::Phase(1)) > 0 {
            return Err(Error::Precondition("potential depends on p".into()));
        }
        Ok(SplitHamiltonian { mass, potential })
    }

    /// Splits a polynomial `H(q, p)` into kinetic and potential parts.
    pub fn from_poly(h: &PolySymbol) -> Result<Self> {
        if h.dim() != 1 || h.has_lambda() || h.has_hbar() {
            return Err(Error::Precondition("H must be an N = 1 polynomial in q and p".into()));
        }
        let (q, p) = (VariableId::Phase(0), VariableId::Phase(1));
        let mut kinetic = None;
        let mut pot = Vec::new();
        for (m, c) in h.terms() {
            let (eq, ep) = (h.exponent(m, q), h.exponent(m, p));
            if ep == 0 {
                pot.push((m.clone(), c.clone()));
            } else if ep == 2 && eq == 0 && c.is_real() {
                kinetic = Some(ratio_to_f64(&c.re));
            } else {
                return Err(Error::Precondition("H is not of the form p^2/2m + V(q)".into()));
            }
        }
        let k = kinetic.ok_or_else(|| Error::Precondition("H has no p^2 term".into()))?;
        if !(k > 0.0) {
            return Err(Error::Precondition("kinetic coefficient must be positive".into()));
        }
        Self::new(0.5 / k, PolySymbol::from_terms(1, pot)?)
    }

    pub fn potential_at(&self, q: f64) -> f64 {
        self.potential.eval(&[q, 0.0], &[], 0.0).re
    }
}

/// Precomputed Strang factors for a fixed grid, Hamiltonian and step.
pub struct SplitPropagator {
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    dt: f64,
}

impl SplitPropagator {
    pub fn new(grid: crate::wigner::SpatialGrid, h: &SplitHamiltonian, dt: f64) -> Self {
        let hb = grid.hbar;
        let half_potential = grid
            .positions()
            .into_iter()
            .map(|x| Complex64::from_polar(1.0, -h.potential_at(x) * dt / (2.0 * hb)))
            .collect();
        let kinetic =
            grid.momenta().into_iter().map(|p| Complex64::from_polar(1.0, -p * p / (2.0 * h.mass) * dt / hb)).collect();
        let mut planner = FftPlanner::new();
        SplitPropagator {
            half_potential,
            kinetic,
            fft: planner.plan_fft_forward(grid.n_points),
            ifft: planner.plan_fft_inverse(grid.n_points),
            dt,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, psi: &mut StateVector) {
        let n = psi.amplitudes.len() as f64;
        let a = &mut psi.amplitudes;
        a.iter_mut().zip(&self.half_potential).for_each(|(z, v)| *z *= v);
        self.fft.process(a);
        a.iter_mut().zip(&self.kinetic).for_each(|(z, k)| *z *= k / n);
        self.ifft.process(a);
        a.iter_mut().zip(&self.half_potential).for_each(|(z, v)| *z *= v);
    }
}

pub fn split_operator_step(psi: &StateVector, h: &SplitHamiltonian, dt: f64) -> StateVector {
    let mut out = psi.clone();
    if dt != 0.0 {
        SplitPropagator::new(psi.grid, h, dt).step(&mut out);
    }
    out
}

/// `<H>` evaluated with the kinetic term in Fourier space.
pub fn energy(psi: &StateVector, h: &SplitHamiltonian) -> f64 {
    let g = psi.grid;
    let mut buf = psi.amplitudes.clone();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    let total: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
    let kin: f64 = buf.iter().zip(g.momenta()).map(|(z, p)| z.norm_sqr() * p * p / (2.0 * h.mass)).sum::<f64>() / total;
    let pot: f64 =
        psi.amplitudes.iter().zip(g.positions()).map(|(z, x)| z.norm_sqr() * h.potential_at(x)).sum::<f64>() * g.dq();
    kin + pot
}

/// Oracle run: the trajectory's `norm`, `mean_q` and `mean_p` come from the
/// wavefunction; `purity`, `negativity` and `min_value` from its Wigner function.
pub struct OracleRun {
    pub trajectory: Trajectory,
    pub states: Vec<StateVector>,
}

fn snapshot(psi: &StateVector, lattice: Option<PhaseLattice>) -> Result<GridSymbol> {
    match lattice {
        Some(l) => wigner_on_lattice(psi, l),
        None => wigner_of_state(psi),
    }
}

/// Evolves `psi0` and records Wigner snapshots every `stride` steps (and at the end).
/// Without a lattice the Weyl lattice of the position grid is used.
pub fn oracle_wigner_trajectory(
    psi0: &StateVector,
    h: &SplitHamiltonian,
    dt: f64,
    t_final: f64,
    stride: usize,
    lattice: Option<PhaseLattice>,
    keep_snapshots: bool,
) -> Result<OracleRun> {
    if !(dt > 0.0) || !(t_final >= dt) || stride == 0 {
        return Err(Error::Precondition("need 0 < dt <= t_final and stride > 0".into()));
    }
    let nsteps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    let dt = t_final / nsteps as f64;
    let prop = SplitPropagator::new(psi0.grid, h, dt);
    let mut run = OracleRun { trajectory: Trajectory::default(), states: Vec::new() };
    let record = |psi: &StateVector, t: f64, run: &mut OracleRun| -> Result<()> {
        let w = snapshot(psi, lattice)?;
        let mut obs = observables(&w);
        obs.norm = psi.norm();
        obs.mean_q = psi.mean_q();
        obs.mean_p = psi.mean_p();
        run.trajectory.push(t, obs);
        if keep_snapshots {
            run.trajectory.snapshots.push(w);
            run.states.push(psi.clone());
        }
        Ok(())
    };
    let mut psi = psi0.clone();
    record(&psi, 0.0, &mut run)?;
    for step in 1..=nsteps {
        prop.step(&mut psi);
        if step % stride == 0 || step == nsteps {
            record(&psi, step as f64 * dt, &mut run)?;
        }
    }
    Ok(run)
}
