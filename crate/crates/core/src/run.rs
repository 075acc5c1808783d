//! JSON run configurations for propagation and oracle comparisons.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{default_dt, propagate, EvolutionConfig, Trajectory};
use crate::error::{Error, Result};
use crate::oracle::{oracle_wigner_trajectory, SplitHamiltonian};
use crate::parse::parse_poly;
use crate::poly::PolySymbol;
use crate::wigner::{gaussian_wigner, Generator, GridSymbol, PhaseLattice, SpatialGrid, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub nq: usize,
    pub np: usize,
    pub q_max: f64,
    pub p_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub q0: f64,
    #[serde(default)]
    pub p0: f64,
    pub sigma_q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default = "default_tol")]
    pub tolerance_mean_q: f64,
    #[serde(default = "default_tol")]
    pub tolerance_rho: f64,
}

fn default_tol() -> f64 {
    1e-3
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec { grid_points: None, tolerance_mean_q: 1e-3, tolerance_rho: 1e-3 }
    }
}

fn default_hbar() -> f64 {
    1.0
}

fn default_engines() -> Vec<Generator> {
    vec![Generator::Moyal, Generator::Liouville]
}

fn default_records() -> usize {
    40
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hamiltonian: String,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default = "default_engines")]
    pub engines: Vec<Generator>,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub liouville_lattice: Option<LatticeSpec>,
    pub initial: InitialState,
    pub t_final: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default = "default_records")]
    pub records: usize,
    #[serde(default)]
    pub write_snapshots: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub oracle: OracleSpec,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn hamiltonian(&self) -> Result<PolySymbol> {
        parse_poly(&self.hamiltonian, 1)
    }

    pub fn lattice_for(&self, engine: Generator) -> Result<PhaseLattice> {
        let spec = match (engine, self.liouville_lattice) {
            (Generator::Liouville, Some(l)) => l,
            _ => self.lattice,
        };
        PhaseLattice::covering(spec.nq, spec.np, spec.q_max, spec.p_max, self.hbar)
    }

    /// Gaussian Wigner function of the configured initial state.
    pub fn initial_density(&self, lattice: PhaseLattice) -> GridSymbol {
        let s = self.initial;
        GridSymbol::from_fn(lattice, |q, p| gaussian_wigner(q, p, s.q0, s.p0, s.sigma_q, self.hbar))
    }

    /// Step count (a multiple of `records`) and the matching evolution config.
    pub fn plan(&self, engine: Generator) -> Result<EvolutionConfig> {
        if self.records == 0 || !(self.t_final > 0.0) {
            return Err(Error::Precondition("records and t_final must be positive".into()));
        }
        let h = self.hamiltonian()?;
        let lattice = self.lattice_for(engine)?;
        let raw = match (self.steps, self.dt) {
            (Some(n), _) => n,
            (None, Some(dt)) => (self.t_final / dt - 1e-9).ceil() as usize,
            (None, None) => (self.t_final / default_dt(engine, &h, lattice)? - 1e-9).ceil() as usize,
        };
        let steps = raw.max(1).div_ceil(self.records) * self.records;
        Ok(EvolutionConfig {
            engine,
            hamiltonian: h,
            dt: self.t_final / steps as f64,
            t_final: self.t_final,
            snapshot_stride: steps / self.records,
            lattice,
            keep_snapshots: self.write_snapshots,
        })
    }

    pub fn evolve(&self, engine: Generator) -> Result<Trajectory> {
        let cfg = self.plan(engine)?;
        propagate(&cfg, &self.initial_density(cfg.lattice))
    }

    /// Position grid for the oracle: spacing equal to the Moyal lattice `dq`.
    pub fn oracle_grid(&self) -> Result<SpatialGrid> {
        let lat = self.lattice_for(Generator::Moyal)?;
        let n = self.oracle.grid_points.unwrap_or(2 * lat.nq + 1);
        SpatialGrid::new(n, n as f64 * lat.dq, self.hbar)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub records: usize,
    pub max_mean_q_diff: f64,
    pub max_rho_rel_diff: f64,
    pub tolerance_mean_q: f64,
    pub tolerance_rho: f64,
    pub passed: bool,
}

pub struct Comparison {
    pub report: CompareReport,
    pub moyal: Trajectory,
    pub oracle: Trajectory,
}

/// Moyal engine against the split-operator oracle on matched schedules.
pub fn oracle_compare(cfg: &RunConfig) -> Result<Comparison> {
    let h = cfg.hamiltonian()?;
    let split = SplitHamiltonian::from_poly(&h)?;
    let mut plan = cfg.plan(Generator::Moyal)?;
    plan.keep_snapshots = true;
    let rho0 = cfg.initial_density(plan.lattice);
    let grid = cfg.oracle_grid()?;
    let s = cfg.initial;
    let psi0 = StateVector::gaussian(grid, s.q0, s.p0, s.sigma_q)?;
    let (moyal, oracle) = std::thread::scope(|scope| {
        let reference = scope.spawn(|| {
            oracle_wigner_trajectory(
                &psi0,
                &split,
                plan.dt,
                plan.t_final,
                plan.snapshot_stride,
                Some(plan.lattice),
                true,
            )
        });
        let moyal = propagate(&plan, &rho0);
        (moyal, reference.join().expect("oracle thread panicked"))
    });
    let (moyal, oracle) = (moyal?, oracle?.trajectory);
    if oracle.times.len() != moyal.times.len() {
        return Err(Error::GridMismatch("oracle and engine schedules differ".into()));
    }
    let scale = rho0.max_abs();
    let mut dq = 0.0f64;
    let mut drho = 0.0f64;
    for k in 0..moyal.times.len() {
        dq = dq.max((moyal.observables[k].mean_q - oracle.observables[k].mean_q).abs());
        drho = drho.max(moyal.snapshots[k].sup_diff(&oracle.snapshots[k]) / scale);
    }
    let report = CompareReport {
        records: moyal.times.len(),
        max_mean_q_diff: dq,
        max_rho_rel_diff: drho,
        tolerance_mean_q: cfg.oracle.tolerance_mean_q,
        tolerance_rho: cfg.oracle.tolerance_rho,
        passed: dq <= cfg.oracle.tolerance_mean_q && drho <= cfg.oracle.tolerance_rho,
    };
    Ok(Comparison { report, moyal, oracle })
}
