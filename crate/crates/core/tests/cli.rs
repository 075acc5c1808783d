use std::path::Path;
use std::process::{Command, Output};

use dequant::dynamics::Trajectory;
use dequant::moyal::DequantReport;
use dequant::wigner::{read_symbol, Observables};
use serde_json::json;

fn dequant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dequant")).args(args).env_remove("DEQUANT_OUTPUT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let cfg = json!({
        "hamiltonian": "1/2*q^2 + 1/2*p^2",
        "lattice": { "nq": 91, "np": 57, "q_max": 8.0, "p_max": 7.0 },
        "initial": { "q0": 1.0, "sigma_q": std::f64::consts::FRAC_1_SQRT_2 },
        "t_final": 1.0,
        "steps": 200,
        "records": 4
    });
    let path = dir.join("small.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    path
}

#[test]
fn verify_dequant_single_hamiltonians() {
    let o = dequant(&["verify-dequant", "--hamiltonian", "0.5*q^2+0.5*p^2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = DequantReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.berezin.to_string(), "lq*p - lp*q");
    assert_eq!(r.classical.to_string(), "lq*p - lp*q");
    assert!(r.is_exact());

    let o = dequant(&["verify-dequant", "--hamiltonian", "q^4"]);
    assert_eq!(o.status.code(), Some(0));
    let r = DequantReport::from_json(&stdout(&o)).unwrap();
    assert!(r.marinov.has_hbar() && !r.berezin.has_hbar());
    assert_eq!(r.marinov.to_string(), "-4*lp^3*q*h^2 - 4*lp*q^3");
}

#[test]
fn verify_dequant_exit_codes() {
    assert_eq!(dequant(&["verify-dequant", "--hamiltonian", "q + * p"]).status.code(), Some(2));
    assert_eq!(dequant(&["verify-dequant"]).status.code(), Some(2));
    assert_eq!(dequant(&["frobnicate"]).status.code(), Some(2));
    let bad = dequant(&["verify-dequant", "--hamiltonian", "q^3*p", "--mutation", "flip-berezin-sign"]);
    assert_eq!(bad.status.code(), Some(1));
    let o = dequant(&["verify-dequant", "--random", "200", "--max-degree", "6", "--dim", "2", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "checked 200 Hamiltonians, 0 mismatches");
}

#[test]
fn random_reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports.json");
    let o = dequant(&["verify-dequant", "--random", "5", "--seed", "3", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let arr: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(arr.len(), 5);
    for v in arr {
        let r = DequantReport::from_json(&v.to_string()).unwrap();
        assert!(r.is_exact());
        assert_eq!(r.to_json_value(), v);
    }
}

#[test]
fn star_and_brackets() {
    let run = |args: &[&str]| {
        let o = dequant(args);
        assert_eq!(o.status.code(), Some(0));
        stdout(&o).trim().to_string()
    };
    assert_eq!(run(&["star", "--a", "q", "--b", "p"]), "q*p + 1/2*i*h");
    assert_eq!(run(&["bracket", "--a", "q", "--b", "p", "--kind", "star"]), "q*p + 1/2*i*h");
    assert_eq!(run(&["bracket", "--a", "q", "--b", "p"]), "1");
    assert_eq!(run(&["bracket", "--a", "q", "--b", "q", "--kind", "poisson"]), "0");
    assert_eq!(run(&["bracket", "--a", "q^3", "--b", "p^3"]), "9*q^2*p^2 - 3/2*h^2");
    assert_eq!(run(&["star", "--a", "0.25*q", "--b", "-p"]), "-1/4*q*p - 1/8*i*h");
    assert_eq!(dequant(&["star", "--a", "q)", "--b", "p"]).status.code(), Some(2));
}

#[test]
fn marinov_output_is_json() {
    let o = dequant(&["marinov", "--hamiltonian", "1/2*p^2 + 1/2*q^2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["marinov"], v["classical"]);
    assert_eq!(v["hbar_free"], true);
}

#[test]
fn wigner_observables_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.bin");
    let o = dequant(&["wigner", "--n-points", "65", "--q0", "-0.5", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let obs: Observables = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((obs.norm - 1.0).abs() < 1e-10 && (obs.mean_q + 0.5).abs() < 1e-8);
    let (w, side) = read_symbol(&out).unwrap();
    assert_eq!(side.kind, "wigner");
    assert_eq!(w.lattice.shape(), (65, 65));
    assert_eq!(dequant(&["wigner", "--n-points", "64"]).status.code(), Some(2));
}

#[test]
fn evolve_writes_reproducible_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o =
            dequant(&["evolve", "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap(), "--snapshots"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("moyal: records=5"));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["moyal.csv", "liouville.csv", "moyal_0004.bin"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let m = Trajectory::from_csv(&std::fs::read_to_string(a.join("moyal.csv")).unwrap()).unwrap();
    let l = Trajectory::from_csv(&std::fs::read_to_string(a.join("liouville.csv")).unwrap()).unwrap();
    assert_eq!(m.times.len(), 5);
    for (x, y) in m.mean_q().iter().zip(l.mean_q()) {
        assert!((x - y).abs() <= 1e-6);
    }
    let echoed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("effective_config.json")).unwrap()).unwrap();
    assert_eq!(echoed["steps"], 200);
    assert_eq!(echoed["output_dir"], a.to_str().unwrap());
}

#[test]
fn flags_override_config_and_env_sets_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_dequant"))
        .args([
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--engine",
            "liouville",
            "--steps",
            "100",
            "--records",
            "2",
        ])
        .env("DEQUANT_OUTPUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("liouville.csv").exists() && !out.join("moyal.csv").exists());
    let t = Trajectory::from_csv(&std::fs::read_to_string(out.join("liouville.csv")).unwrap()).unwrap();
    assert_eq!(t.times.len(), 3);
}

#[test]
fn evolve_input_errors() {
    assert_eq!(dequant(&["evolve", "--config", "/nonexistent/run.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"hamiltonian\": \"q\"}").unwrap();
    assert_eq!(dequant(&["evolve", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn oracle_compare_small_and_non_split() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("cmp");
    let o = dequant(&["oracle-compare", "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("compare.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert!(out.join("oracle.csv").exists());

    let o = dequant(&[
        "oracle-compare",
        "--config",
        cfg.to_str().unwrap(),
        "--hamiltonian",
        "q*p + 1/2*p^2",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn selftest_filter_and_mutation() {
    let o = dequant(&["selftest", "--filter", "grassmann"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with('[')).collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with("[PASS] grassmann"));
    assert_eq!(dequant(&["selftest", "--filter", "nosuchsuite"]).status.code(), Some(2));

    let o = dequant(&["selftest", "--filter", "dequantisation", "--mutation", "flip-berezin-sign"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAILED suites: dequantisation"));
}
