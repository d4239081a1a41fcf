use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nls_trains::config::ExperimentConfig;
use nls_trains::io::{read_norm_csv, RunReport};
use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nls-trains")).args(args).env_remove("NLS_TRAINS_THREADS").output().unwrap()
}

fn run_config(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn without_timestamp(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().filter(|l| !l.trim_start().starts_with("\"timestamp\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let o = run(&["norms"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--config"));
}

#[test]
fn norms_report_matches_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("norms", &configs().join("schedule_norms.toml"), dir.path(), &["--set", "norms.indices=[{ p = 2.0, e = 1, d = 1 }]"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(&dir.path().join("norms.json"));
    // ω = (1/4, 1/16, 1/64), |v| = (0, 8, 24): the closest pair is (1, 2) with ½·(1/4)·8
    assert_eq!(rep["results"]["vstar"], 1.0);
    assert_eq!(rep["subcommand"], "norms");
    // A_2 with κ = 1/α₁ - 1/4 = 1/4: Σ ω_j^{1/4}
    let a = &rep["results"]["norms"]["A"][0];
    assert_eq!(a["index"]["p"], 2.0);
    let expect = 0.25f64.powf(0.25) + 0.0625f64.powf(0.25) + 0.015625f64.powf(0.25);
    assert!((a["value"].as_f64().unwrap() - expect).abs() < 1e-14);
    let cfg = ExperimentConfig::load(&configs().join("schedule_norms.toml"), &["norms.indices=[{ p = 2.0, e = 1, d = 1 }]".into()]).unwrap();
    assert_eq!(rep["config"], serde_json::to_value(&cfg).unwrap());
}

#[test]
fn params_gen_lists_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("params-gen", &configs().join("schedule_norms.toml"), dir.path(), &["--set", "schedule.N=4"]);
    assert!(o.status.success());
    let rep = json(&dir.path().join("params-gen.json"));
    let speeds: Vec<f64> = serde_json::from_value(rep["results"]["speeds"].clone()).unwrap();
    assert_eq!(speeds, vec![0.0, 8.0, 24.0, 56.0]);
    assert_eq!(rep["config"]["schedule"]["N"], 4);
}

#[test]
fn single_soliton_picard_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("picard", &configs().join("single_soliton.toml"), dir.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(&dir.path().join("picard.json"));
    for trace in rep["results"]["stages"][0]["traces"].as_array().unwrap() {
        assert_eq!(trace["converged_at"], 1);
        assert_eq!(trace["eta_norm"], 0.0);
    }
    let rows = read_norm_csv(std::fs::File::open(dir.path().join("picard.csv")).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.value == 0.0));
}

#[test]
fn evolve_soliton_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("evolve", &configs().join("evolve_soliton.toml"), dir.path(), &[]);
    assert!(o.status.success());
    let rep = RunReport::read(&dir.path().join("evolve.json")).unwrap();
    assert!(rep.results["l2_error"].as_f64().unwrap() <= 1e-6);
    assert!(rep.results["max_mass_drift"].as_f64().unwrap() <= 1e-10);
    let field = nls_trains::io::read_field(std::fs::File::open(dir.path().join("evolve_final.nlsf")).unwrap()).unwrap();
    assert!((field.t - 1.0).abs() < 1e-12);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(run_config("estimates", &configs().join("estimates.toml"), d.path(), &["--set", "estimates.samples=5"]).status.success());
        assert!(run_config("appendixB", &configs().join("appendix_b.toml"), d.path(), &[]).status.success());
    }
    for name in ["estimates.csv", "appendixB.csv"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    for name in ["estimates.json", "appendixB.json"] {
        assert_eq!(without_timestamp(&a.path().join(name)), without_timestamp(&b.path().join(name)), "{name}");
    }
}

#[test]
fn report_collects_runs() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_config("norms", &configs().join("schedule_norms.toml"), dir.path(), &[]).status.success());
    assert!(run_config("appendixB", &configs().join("appendix_b.toml"), dir.path(), &[]).status.success());
    let o = run(&["report", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let summary = json(&dir.path().join("summary.json"));
    let subs: Vec<&str> = summary.as_array().unwrap().iter().map(|r| r["subcommand"].as_str().unwrap()).collect();
    assert_eq!(subs, vec!["appendixB", "norms"]);
    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "[nonlinearity]\nalpha1 = 2.0\n[solver]\nT_ned = 3.0\n");
    let o = run_config("norms", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("T_ned"));
    let o = run_config("evolve", &configs().join("evolve_soliton.toml"), dir.path(), &["--set", "solver.dt=-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("solver.dt"));
}

#[test]
fn inadmissible_plan_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("mixed", &configs().join("mixed_1d2d.toml"), dir.path(), &["--set", "nonlinearity.alpha1=3.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha2 <= 4/d"));
}

#[test]
fn divergence_exits_three_with_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "div.toml",
        r#"
[nonlinearity]
alpha1 = 2.0
[decay]
omega_star = 20.0
[[groups]]
dim = 1
solitons = [{ omega = 9.0, v = [0.5], x0 = [-0.5] }, { omega = 9.0, v = [-0.5], x0 = [0.5] }]
[[grids]]
n = [256]
half_width = [20.0]
[solver]
T_end = 4.0
n_time = 200
"#,
    );
    let o = run_config("picard", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(3));
    let trace = dir.path().join("picard_divergence.json");
    assert!(String::from_utf8_lossy(&o.stderr).contains(trace.to_str().unwrap()));
    assert_eq!(json(&trace)["subcommand"], "picard");
}

#[test]
fn unwritable_output_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = run_config("norms", &configs().join("schedule_norms.toml"), &blocker.join("sub"), &[]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn thread_flag_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("norms", &configs().join("schedule_norms.toml"), dir.path(), &["--threads", "1", "--seed", "9"]);
    assert!(o.status.success());
    assert_eq!(json(&dir.path().join("norms.json"))["seed"], 9);
    let o = run_config("norms", &configs().join("schedule_norms.toml"), dir.path(), &["--threads", "0"]);
    assert_eq!(o.status.code(), Some(1));
}
