use std::fs;
use std::path::Path;
use std::process::Command;

use nlheat::Execution;
use nlheat_cli::csvio::TRACE_HEADER;
use nlheat_cli::run::MANIFEST_FILE;
use nlheat_cli::{override_key, parse_config, run_scenario, sweep, CliError, RunStatus, Task};

const EVOLVE: &str = "\
domain = interval
length = 3.141592653589793
grid_n = 127
g = 1
sigma = 1
initial = eigenfunction
mass = 0.5
dt = 0.01
t_final = 0.5
scheme = projected
tasks = evolve
";

fn with_out(text: &str, dir: &Path) -> String {
    override_key(text, "output_dir", &dir.display().to_string())
}

#[test]
fn evolve_writes_trace_final_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let config = parse_config(&with_out(EVOLVE, tmp.path())).unwrap();
    let m = run_scenario(&config).unwrap();
    assert_eq!(m.status, RunStatus::Ok);
    assert_eq!(m.tasks_run, vec![Task::Evolve]);
    let trace = fs::read_to_string(tmp.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), TRACE_HEADER.join(","));
    assert!(trace.lines().count() > 2);
    let last = fs::read_to_string(tmp.path().join("final.csv")).unwrap();
    assert_eq!(last.lines().count(), 128);
    let manifest = fs::read_to_string(tmp.path().join(MANIFEST_FILE)).unwrap();
    assert!(manifest.contains("manifest.status = ok"));
    assert!(manifest.contains("manifest.artifact.trace.csv = sha256:"));
    assert!(m.scalar("mass_drift").unwrap() < 1e-12);
}

#[test]
fn config_errors_are_all_reported() {
    let text = "domain = interval\nlength = -1\ngrid_n = many\ng = 1\nsigma = 1\nsigma = 2\ncolour = red\n";
    let errs = parse_config(text).unwrap_err();
    let keys: Vec<&str> = errs.iter().map(|e| e.key.as_str()).collect();
    for k in ["length", "grid_n", "sigma", "colour", "initial"] {
        assert!(keys.contains(&k), "no issue for {k}: {errs:?}");
    }
    assert_eq!(CliError::Config(errs).exit_code(), 1);
}

#[test]
fn classify_on_bounded_domain_inserts_sobolev() {
    let tmp = tempfile::tempdir().unwrap();
    let text = override_key(&with_out(EVOLVE, tmp.path()), "tasks", "evolve,classify");
    let text = override_key(&text, "grid_n", "63");
    let m = run_scenario(&parse_config(&text).unwrap()).unwrap();
    assert_eq!(m.tasks_run, vec![Task::Sobolev, Task::Evolve, Task::Classify]);
    assert!(m.notes.iter().any(|n| n == "sobolev inserted before classify"));
    assert_eq!(m.labels.get("well_initial").map(String::as_str), Some("W"));
    assert_eq!(m.scalar("invariance_violations"), Some(0.0));
}

#[test]
fn whole_space_classify_below_threshold_fails_with_regime_code() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "\
domain = truncated_line
halfwidth = 16
grid_n = 511
g = 1
sigma = 1
initial = soliton
mass = 1
tasks = classify
";
    let config = parse_config(&with_out(text, tmp.path())).unwrap();
    let f = run_scenario(&config).unwrap_err();
    assert_eq!(f.error.exit_code(), 2);
    assert_eq!(f.manifest.exit_code(), 2);
    let manifest = fs::read_to_string(tmp.path().join(MANIFEST_FILE)).unwrap();
    assert!(manifest.contains("manifest.status = failed"));
    assert!(manifest.contains("manifest.exit_code = 2"));
    assert!(manifest.contains("manifest.failed_task = classify"));
}

#[test]
fn runs_are_deterministic_and_manifests_replay() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    let first = run_scenario(&parse_config(&with_out(EVOLVE, &a)).unwrap()).unwrap();
    let second = run_scenario(&parse_config(&with_out(EVOLVE, &b)).unwrap()).unwrap();
    assert_eq!(first.artifacts, second.artifacts);
    for name in ["trace.csv", "final.csv", "initial.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
    }

    let manifest = fs::read_to_string(a.join(MANIFEST_FILE)).unwrap();
    let replay = run_scenario(&parse_config(&with_out(&manifest, &c)).unwrap()).unwrap();
    assert_eq!(replay.artifacts, first.artifacts);
    assert_eq!(replay.scalars, first.scalars);
    assert_eq!(replay.config_text, with_out(&first.config_text, &c));
}

#[test]
fn dt_sweep_shows_first_order_mass_drift() {
    let tmp = tempfile::tempdir().unwrap();
    let base = override_key(EVOLVE, "g", "-1");
    let base = override_key(&base, "scheme", "multiplier");
    let base = override_key(&base, "t_final", "0.2");
    let values: Vec<String> = ["0.01", "0.005", "0.0025"].map(String::from).to_vec();
    let summary = sweep(&base, "dt", &values, tmp.path(), Execution::Parallel).unwrap();
    assert_eq!(summary.exit_code(), 0);
    let drift: Vec<f64> = summary.column("mass_drift").into_iter().map(Option::unwrap).collect();
    for w in drift.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.7..2.3).contains(&ratio), "drift {drift:?}");
    }
    let csv = fs::read_to_string(&summary.summary_path).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(tmp.path().join("dt_002").join(MANIFEST_FILE).exists());
}

#[test]
fn grid_sweep_refines_shooting_residual() {
    let tmp = tempfile::tempdir().unwrap();
    let base = "\
domain = truncated_line
halfwidth = 20
grid_n = 1023
g = 1
sigma = 1
initial = soliton
mass = 1
tasks = shoot
";
    let values: Vec<String> = ["1023", "2047", "4095"].map(String::from).to_vec();
    let summary = sweep(base, "grid_n", &values, tmp.path(), Execution::Sequential).unwrap();
    let res: Vec<f64> = summary.column("shoot_pde_sup").into_iter().map(Option::unwrap).collect();
    for w in res.windows(2) {
        assert!(w[1] < 0.5 * w[0], "residuals {res:?}");
    }
}

#[test]
fn sweep_rejects_bad_requests() {
    let tmp = tempfile::tempdir().unwrap();
    let err = sweep(EVOLVE, "length", &["1".into()], tmp.path(), Execution::Sequential).unwrap_err();
    assert!(matches!(err, CliError::Usage(_)));
    let err = sweep(EVOLVE, "dt", &[], tmp.path(), Execution::Sequential).unwrap_err();
    assert!(matches!(err, CliError::Usage(_)));
    let err = sweep(EVOLVE, "dt", &["-1".into()], tmp.path(), Execution::Sequential).unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
}

#[test]
fn binary_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("good.cfg");
    fs::write(&good, EVOLVE).unwrap();
    let out = tmp.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_nlheat"))
        .args(["run", "--quiet", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("trace.csv").exists());

    let bad = tmp.path().join("bad.cfg");
    fs::write(&bad, "domain = disc\n").unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_nlheat"))
        .args(["evolve", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("domain"));

    let missing = Command::new(env!("CARGO_BIN_EXE_nlheat"))
        .args(["sobolev", "--quiet", "--config"])
        .arg(tmp.path().join("nope.cfg"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}
