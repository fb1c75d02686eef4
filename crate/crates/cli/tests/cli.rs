use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biharmonic")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn solution_dependent_case_verifies() {
    let o = bin(&["--n", "3", "--alpha", "-2", "--u0", "1", "--lap0", "0.5", "--rmax", "1e5", "--verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["verdict"], "verified");
    assert_eq!(v["regime"], "solution_dependent");
    assert!(v["rel_error"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn quartic_case_verifies() {
    let o = bin(&["--n", "3", "--alpha", "0", "--rmax", "10", "--verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let c = json(&o)["law"]["constant"].as_f64().unwrap();
    assert!((c - 1.0 / 120.0).abs() < 1e-15);
}

#[test]
fn supercritical_exponent_is_refused() {
    let o = bin(&["--n", "3", "--alpha", "1.5", "--verify"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["verdict"], "refused");
}

#[test]
fn fractional_alpha_is_accepted() {
    let o = bin(&["--n", "1", "--alpha", "-1/3", "--lap0", "0.5", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let row = text.lines().nth(1).expect("csv row");
    assert!(row.contains("LogCritical"), "{row}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&bin(&["--n", "3"])), 2);
    assert_eq!(code(&bin(&["--n", "3", "--alpha", "x"])), 2);
    assert_eq!(code(&bin(&["--n", "0", "--alpha", "0"])), 2);
}

#[test]
fn positivity_loss_exits_3() {
    let o = bin(&["--n", "3", "--alpha", "0.5", "--lap0", "-10", "--rmax", "10"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["verdict"], "integration_failed");
}

#[test]
fn outputs_go_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let table = dir.path().join("ratios.csv");
    let o = bin(&[
        "--n", "2", "--alpha", "0.5", "--rmax", "1e4",
        "--out", out.to_str().unwrap(),
        "--ratio-table", table.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    let rows = std::fs::read_to_string(&table).unwrap();
    assert!(rows.lines().count() > 50);
}

#[test]
fn sweep_runs_and_rejects_empty_lists() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    std::fs::write(&cfg, "n = 1\nn = 3\nalpha = 0\nalpha = 0.5\nlap0 = 0.5\n").unwrap();
    let o = bin(&["sweep", "--config", cfg.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("n,alpha,regime,law_form,"));

    let o = bin(&["sweep", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(json(&o)["reports"].as_array().unwrap().len(), 4);

    std::fs::write(&cfg, "n = 3\n").unwrap();
    assert_eq!(code(&bin(&["sweep", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn acceptance_prints_one_line_per_criterion() {
    let o = bin(&["acceptance"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]")).collect();
    assert_eq!(lines.len(), 10, "{text}");
}
