//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a checked identity or tolerance failed, 2 bad input.

mod selftest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::dynamics::conservation;
use crate::error::Error;
use crate::moyal::{
    classical_extended_hamiltonian, dequantise_with, marinov_hamiltonian, moyal_bracket, poisson_bracket, star_product,
    Mutation,
};
use crate::parse::parse_poly;
use crate::random::{random_poly, rng, RandomPolySpec};
use crate::run::{oracle_compare, RunConfig};
use crate::wigner::{observables, wigner_of_state, write_symbol, Generator, SpatialGrid, StateVector};

pub use selftest::{run_selftest, SuiteResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const OUTPUT_DIR_ENV: &str = "DEQUANT_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "dequant", version, about = "Moyal calculus, Grassmann dequantisation and phase-space propagation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the Grassmann dequantisation identity.
    VerifyDequant(VerifyArgs),
    /// Star product of two polynomials.
    Star(PairArgs),
    /// Moyal, Poisson or star bracket of two polynomials.
    Bracket(BracketArgs),
    /// Marinov and classical extended Hamiltonians.
    Marinov(HamArgs),
    /// Propagate a Gaussian density with the configured engines.
    Evolve(EvolveArgs),
    /// Wigner function of a Gaussian state on the Weyl lattice.
    Wigner(WignerArgs),
    /// Compare the Moyal engine against split-operator Schrödinger evolution.
    OracleCompare(EvolveArgs),
    /// Run reduced-size invariant suites.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with = "random", allow_hyphen_values = true)]
    pub hamiltonian: Option<String>,
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub max_degree: u32,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the reports as a JSON array.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MutationArg::None, hide = true)]
    pub mutation: MutationArg,
}

#[derive(Args, Debug)]
pub struct PairArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
}

#[derive(Args, Debug)]
pub struct BracketArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value_t = BracketKind::Moyal)]
    pub kind: BracketKind,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum BracketKind {
    Star,
    Moyal,
    Poisson,
}

#[derive(Args, Debug)]
pub struct HamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub hamiltonian: String,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub hamiltonian: Option<String>,
    #[arg(long, value_enum)]
    pub engine: Option<EngineArg>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub records: Option<usize>,
    #[arg(long)]
    pub snapshots: bool,
    /// Output directory; defaults to $DEQUANT_OUTPUT_DIR, then the current directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum EngineArg {
    Moyal,
    Liouville,
}

#[derive(Args, Debug)]
pub struct WignerArgs {
    #[arg(long, default_value_t = 129)]
    pub n_points: usize,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Box length; defaults to the square-lattice value sqrt(2 pi hbar n).
    #[arg(long)]
    pub box_length: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub q0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub p0: f64,
    /// Position width; defaults to the coherent value sqrt(hbar/2).
    #[arg(long)]
    pub sigma_q: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Run only suites whose name contains this string.
    #[arg(long)]
    pub filter: Option<String>,
    /// Inject a fault into the dequantisation pipeline.
    #[arg(long, value_enum, default_value_t = MutationArg::None, hide = true)]
    pub mutation: MutationArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MutationArg {
    None,
    FlipBerezinSign,
    DropFactorTwo,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::None => Mutation::None,
            MutationArg::FlipBerezinSign => Mutation::FlipBerezinSign,
            MutationArg::DropFactorTwo => Mutation::DropFactorTwo,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. }
                | Error::Precondition(_)
                | Error::DimensionMismatch { .. }
                | Error::Io(_)
                | Error::Format(_)
                | Error::EvenGrid(_)
                | Error::GridMismatch(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn dispatch(cmd: Command) -> crate::Result<i32> {
    match cmd {
        Command::VerifyDequant(a) => verify_dequant(a),
        Command::Star(a) => {
            let (x, y) = (parse_poly(&a.a, a.dim)?, parse_poly(&a.b, a.dim)?);
            println!("{}", star_product(&x, &y)?);
            Ok(EXIT_OK)
        }
        Command::Bracket(a) => {
            let (x, y) = (parse_poly(&a.pair.a, a.pair.dim)?, parse_poly(&a.pair.b, a.pair.dim)?);
            let r = match a.kind {
                BracketKind::Star => star_product(&x, &y)?,
                BracketKind::Moyal => moyal_bracket(&x, &y)?,
                BracketKind::Poisson => poisson_bracket(&x, &y)?,
            };
            println!("{r}");
            Ok(EXIT_OK)
        }
        Command::Marinov(a) => {
            let h = parse_poly(&a.hamiltonian, a.dim)?;
            let m = marinov_hamiltonian(&h)?;
            let c = classical_extended_hamiltonian(&h)?;
            let out = json!({
                "input": h.to_string(),
                "marinov": m.body.to_string(),
                "classical": c.body.to_string(),
                "hbar_free": !m.body.has_hbar(),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(EXIT_OK)
        }
        Command::Evolve(a) => evolve(a),
        Command::Wigner(a) => wigner(a),
        Command::OracleCompare(a) => compare(a),
        Command::Selftest(a) => {
            let results = run_selftest(a.filter.as_deref(), a.mutation.into());
            if results.is_empty() {
                eprintln!("no suite matches the filter");
                return Ok(EXIT_USAGE);
            }
            let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
            if failed.is_empty() {
                println!("selftest: all {} suites passed", results.len());
                Ok(EXIT_OK)
            } else {
                println!("selftest: FAILED suites: {}", failed.join(", "));
                Ok(EXIT_FAILURE)
            }
        }
    }
}

fn verify_dequant(a: VerifyArgs) -> crate::Result<i32> {
    let hs = match (&a.hamiltonian, a.random) {
        (Some(text), _) => vec![parse_poly(text, a.dim)?],
        (None, Some(count)) => {
            if a.dim == 0 {
                return Err(Error::Precondition("dim must be positive".into()));
            }
            let mut r = rng(a.seed);
            let spec = RandomPolySpec::phase(a.dim, a.max_degree);
            (0..count).map(|_| random_poly(&mut r, &spec)).collect()
        }
        (None, None) => return Err(Error::Precondition("give --hamiltonian or --random".into())),
    };
    let mut reports = Vec::with_capacity(hs.len());
    let mut mismatches = 0;
    for h in &hs {
        let r = dequantise_with(h, a.mutation.into())?;
        if !r.is_exact() || !r.hbar_eliminated() {
            mismatches += 1;
        }
        reports.push(r);
    }
    if hs.len() == 1 {
        println!("{}", reports[0].to_json());
    } else {
        println!("checked {} Hamiltonians, {} mismatches", hs.len(), mismatches);
    }
    if let Some(path) = &a.output {
        let arr: Vec<_> = reports.iter().map(|r| r.to_json_value()).collect();
        std::fs::write(path, serde_json::to_string_pretty(&arr)?)?;
    }
    Ok(if mismatches == 0 { EXIT_OK } else { EXIT_FAILURE })
}

fn output_dir(explicit: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load_config(a: &EvolveArgs) -> crate::Result<(RunConfig, PathBuf)> {
    let mut cfg = RunConfig::from_file(&a.config)?;
    if let Some(h) = &a.hamiltonian {
        cfg.hamiltonian = h.clone();
    }
    if let Some(e) = a.engine {
        cfg.engines = vec![match e {
            EngineArg::Moyal => Generator::Moyal,
            EngineArg::Liouville => Generator::Liouville,
        }];
    }
    if a.dt.is_some() {
        cfg.dt = a.dt;
        cfg.steps = None;
    }
    if a.steps.is_some() {
        cfg.steps = a.steps;
    }
    if let Some(t) = a.t_final {
        cfg.t_final = t;
    }
    if let Some(r) = a.records {
        cfg.records = r;
    }
    if a.snapshots {
        cfg.write_snapshots = true;
    }
    let dir = output_dir(a.out_dir.as_deref(), &cfg);
    std::fs::create_dir_all(&dir)?;
    cfg.output_dir = Some(dir.clone());
    std::fs::write(dir.join("effective_config.json"), cfg.to_json())?;
    Ok((cfg, dir))
}

fn engine_name(g: Generator) -> &'static str {
    match g {
        Generator::Moyal => "moyal",
        Generator::Liouville => "liouville",
    }
}

fn evolve(a: EvolveArgs) -> crate::Result<i32> {
    let (cfg, dir) = load_config(&a)?;
    cfg.hamiltonian()?;
    for &engine in &cfg.engines {
        let name = engine_name(engine);
        let traj = cfg.evolve(engine)?;
        traj.write_csv(&dir.join(format!("{name}.csv")))?;
        for (k, snap) in traj.snapshots.iter().enumerate() {
            write_symbol(&dir.join(format!("{name}_{k:04}.bin")), snap, "wigner", traj.times[k], false)?;
        }
        let c = conservation(&traj);
        println!(
            "{name}: records={} norm_drift={:.3e} purity_drift={:.3e} min={:.3e}",
            traj.times.len(),
            c.norm_drift,
            c.purity_drift,
            c.min_value
        );
    }
    Ok(EXIT_OK)
}

fn compare(a: EvolveArgs) -> crate::Result<i32> {
    let (cfg, dir) = load_config(&a)?;
    let cmp = oracle_compare(&cfg)?;
    cmp.moyal.write_csv(&dir.join("moyal.csv"))?;
    cmp.oracle.write_csv(&dir.join("oracle.csv"))?;
    let text = serde_json::to_string_pretty(&cmp.report)?;
    std::fs::write(dir.join("compare.json"), &text)?;
    println!("{text}");
    Ok(if cmp.report.passed { EXIT_OK } else { EXIT_FAILURE })
}

fn wigner(a: WignerArgs) -> crate::Result<i32> {
    let grid = match a.box_length {
        Some(l) => SpatialGrid::new(a.n_points, l, a.hbar)?,
        None => SpatialGrid::square(a.n_points, a.hbar)?,
    };
    let sigma = a.sigma_q.unwrap_or((a.hbar / 2.0).sqrt());
    let psi = StateVector::gaussian(grid, a.q0, a.p0, sigma)?;
    let w = wigner_of_state(&psi)?;
    let obs = observables(&w);
    if let Some(path) = &a.output {
        write_symbol(path, &w, "wigner", 0.0, false)?;
    }
    println!("{}", serde_json::to_string_pretty(&obs)?);
    Ok(EXIT_OK)
}
