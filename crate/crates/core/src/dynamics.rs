//! Explicit RK4 propagation of phase-space densities.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{PolySymbol, VariableId};
use crate::wigner::{observables, Generator, GridRhs, GridSymbol, Observables, PhaseLattice};

/// Half-width of the RK4 stability region on the imaginary axis is 2*sqrt(2); keep a margin.
const RK4_IMAG_LIMIT: f64 = 2.5;
pub const NORM_DRIFT_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub engine: Generator,
    pub hamiltonian: PolySymbol,
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_stride: usize,
    pub lattice: PhaseLattice,
    pub keep_snapshots: bool,
}

/// Largest stable step from the operator-norm bound of the generator on `lattice`.
pub fn stability_limit(engine: Generator, h: &PolySymbol, lattice: PhaseLattice) -> Result<f64> {
    let rhs = GridRhs::new(h, lattice, engine)?;
    let b = rhs.norm_bound();
    Ok(if b > 0.0 { RK4_IMAG_LIMIT / b } else { f64::INFINITY })
}

/// Angular frequency of the quadratic part of `H` at the origin, if it is elliptic.
pub fn harmonic_frequency(h: &PolySymbol) -> Option<f64> {
    let (q, p) = (VariableId::Phase(0), VariableId::Phase(1));
    let at0 = |x: PolySymbol| x.eval(&[0.0, 0.0], &[], 0.0).re;
    let hqq = at0(h.derivative_n(q, 2));
    let hpp = at0(h.derivative_n(p, 2));
    let hqp = at0(h.partial_derivative(q).partial_derivative(p));
    let det = hqq * hpp - hqp * hqp;
    (det > 0.0).then(|| det.sqrt())
}

/// One fiftieth of the harmonic period, capped by the stability limit.
pub fn default_dt(engine: Generator, h: &PolySymbol, lattice: PhaseLattice) -> Result<f64> {
    let limit = stability_limit(engine, h, lattice)?;
    let base = harmonic_frequency(h).map(|w| 2.0 * std::f64::consts::PI / w / 50.0).unwrap_or(f64::INFINITY);
    let dt = base.min(limit);
    if !dt.is_finite() {
        return Err(Error::Precondition("no time scale: H has no quadratic part and no dynamics".into()));
    }
    Ok(dt)
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_final >= self.dt) {
            return Err(Error::Precondition("need 0 < dt <= t_final".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Precondition("snapshot stride must be positive".into()));
        }
        let limit = stability_limit(self.engine, &self.hamiltonian, self.lattice)?;
        if self.dt > limit {
            return Err(Error::Precondition(format!("dt = {:.3e} exceeds the stability limit {:.3e}", self.dt, limit)));
        }
        Ok(())
    }

    /// Number of steps; the step is shortened so that it divides `t_final`.
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub observables: Vec<Observables>,
    pub snapshots: Vec<GridSymbol>,
}

pub const CSV_HEADER: &str = "t,norm,mean_q,mean_p,purity,negativity,min_value";

impl Trajectory {
    pub fn push(&mut self, t: f64, obs: Observables) {
        self.times.push(t);
        self.observables.push(obs);
    }

    pub fn mean_q(&self) -> Vec<f64> {
        self.observables.iter().map(|o| o.mean_q).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for (t, o) in self.times.iter().zip(&self.observables) {
            let _ = writeln!(
                s,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                t, o.norm, o.mean_q, o.mean_p, o.purity, o.negativity, o.min_value
            );
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
            return Err(Error::Format(format!("unexpected header '{}'", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let mut out = Trajectory::default();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
            let v: Vec<f64> = rec
                .iter()
                .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Format(e.to_string())))
                .collect::<Result<_>>()?;
            if v.len() != 7 {
                return Err(Error::Format("row needs 7 columns".into()));
            }
            out.push(
                v[0],
                Observables { norm: v[1], mean_q: v[2], mean_p: v[3], purity: v[4], negativity: v[5], min_value: v[6] },
            );
        }
        Ok(out)
    }
}

fn axpy(y: &Array2<Complex64>, a: f64, x: &Array2<Complex64>) -> Array2<Complex64> {
    let mut out = y.clone();
    ndarray::Zip::from(&mut out).and(x).for_each(|o, &v| *o += v * a);
    out
}

/// Classical fourth-order Runge-Kutta step.
pub fn rk4_step(rhs: &mut GridRhs, rho: &GridSymbol, dt: f64) -> Result<GridSymbol> {
    if dt == 0.0 {
        return Ok(rho.clone());
    }
    let lat = rho.lattice;
    let eval = |rhs: &mut GridRhs, v: &Array2<Complex64>| -> Result<Array2<Complex64>> {
        Ok(rhs.apply(&GridSymbol { lattice: lat, values: v.clone() })?.values)
    };
    let y = &rho.values;
    let k1 = eval(rhs, y)?;
    let k2 = eval(rhs, &axpy(y, 0.5 * dt, &k1))?;
    let k3 = eval(rhs, &axpy(y, 0.5 * dt, &k2))?;
    let k4 = eval(rhs, &axpy(y, dt, &k3))?;
    let mut out = y.clone();
    let c = dt / 6.0;
    ndarray::Zip::from(&mut out)
        .and(&k1)
        .and(&k2)
        .and(&k3)
        .and(&k4)
        .for_each(|o, a, b, cc, d| *o += (a + (b + cc) * 2.0 + d) * c);
    Ok(GridSymbol { lattice: lat, values: out })
}

pub fn propagate(cfg: &EvolutionConfig, rho0: &GridSymbol) -> Result<Trajectory> {
    cfg.validate()?;
    if rho0.lattice != cfg.lattice {
        return Err(Error::GridMismatch("initial density is not on the configured lattice".into()));
    }
    rho0.check_boundary()?;
    let mut rhs = GridRhs::new(&cfg.hamiltonian, cfg.lattice, cfg.engine)?;
    let (nsteps, dt) = cfg.steps();
    let mut traj = Trajectory::default();
    let obs0 = observables(rho0);
    traj.push(0.0, obs0);
    if cfg.keep_snapshots {
        traj.snapshots.push(rho0.clone());
    }
    let mut rho = rho0.clone();
    for step in 1..=nsteps {
        rho = rk4_step(&mut rhs, &rho, dt)?;
        if step % cfg.snapshot_stride == 0 || step == nsteps {
            let t = step as f64 * dt;
            let obs = observables(&rho);
            let drift = (obs.norm - obs0.norm).abs();
            if !drift.is_finite() || drift > NORM_DRIFT_LIMIT {
                return Err(Error::Instability { time: t, drift });
            }
            traj.push(t, obs);
            if cfg.keep_snapshots {
                traj.snapshots.push(rho.clone());
            }
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationSummary {
    pub norm_drift: f64,
    pub purity_drift: f64,
    pub min_value: f64,
}

pub fn conservation(traj: &Trajectory) -> ConservationSummary {
    let o0 = traj.observables[0];
    let mut s = ConservationSummary { norm_drift: 0.0, purity_drift: 0.0, min_value: f64::INFINITY };
    for o in &traj.observables {
        s.norm_drift = s.norm_drift.max((o.norm - o0.norm).abs());
        s.purity_drift = s.purity_drift.max((o.purity - o0.purity).abs());
        s.min_value = s.min_value.min(o.min_value);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::wigner::gaussian_wigner;

    fn lattice() -> PhaseLattice {
        PhaseLattice::covering(41, 41, 6.0, 6.0, 1.0).unwrap()
    }

    #[test]
    fn zero_step_and_zero_hamiltonian() {
        let lat = lattice();
        let rho = GridSymbol::from_fn(lat, |q, p| gaussian_wigner(q, p, 0.5, 0.0, 0.7, 1.0));
        let mut rhs = GridRhs::new(&parse_poly("1/2*q^2 + 1/2*p^2", 1).unwrap(), lat, Generator::Moyal).unwrap();
        assert_eq!(rk4_step(&mut rhs, &rho, 0.0).unwrap(), rho);
        let mut zero = GridRhs::new(&PolySymbol::zero(1), lat, Generator::Moyal).unwrap();
        assert_eq!(rk4_step(&mut zero, &rho, 0.1).unwrap(), rho);
    }

    #[test]
    fn csv_round_trip() {
        let mut t = Trajectory::default();
        t.push(
            0.0,
            Observables { norm: 1.0, mean_q: 0.5, mean_p: -0.25, purity: 1.0, negativity: 0.0, min_value: -1e-17 },
        );
        t.push(
            0.1,
            Observables { norm: 1.0, mean_q: 0.4, mean_p: -0.3, purity: 0.999, negativity: 1e-3, min_value: -0.2 },
        );
        let back = Trajectory::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back.times, t.times);
        assert_eq!(back.observables, t.observables);
        assert!(Trajectory::from_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn default_step_uses_period() {
        let h = parse_poly("1/2*q^2 + 1/2*p^2", 1).unwrap();
        assert!((harmonic_frequency(&h).unwrap() - 1.0).abs() < 1e-14);
        let dt = default_dt(Generator::Liouville, &h, lattice()).unwrap();
        assert!(dt <= 2.0 * std::f64::consts::PI / 50.0 + 1e-15);
        assert!(harmonic_frequency(&parse_poly("1/2*p^2 + 1/4*q^4", 1).unwrap()).is_none());
    }
}
