//! End-to-end CLI behavior: subcommand outputs, file formats, the
//! exit-code contract, structured errors, and determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_canardkit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr_json(output: &Output) -> serde_json::Value {
    let text = String::from_utf8(output.stderr.clone()).unwrap();
    serde_json::from_str(text.trim()).unwrap_or_else(|e| {
        panic!("stderr is not one JSON object: {e}\n---\n{text}");
    })
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("canardkit-cli-{}-{}", std::process::id(), name))
}

#[test]
fn expand_gspm_writes_exact_json() {
    let output = run(&["expand", "--method", "gspm", "--order", "2"]);
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(value["method"], "gspm");
    assert_eq!(value["order"], 2);
    assert_eq!(value["mu"][0], "1");
    assert_eq!(value["mu"][1], "-1/8");
    assert_eq!(value["F"][0]["num"], "x^3/3 - x");
    assert_eq!(value["F"][0]["den"], "1");
    assert_eq!(value["F"][1]["num"], "-1");
    assert_eq!(value["F"][1]["den"], "x + 1");
}

#[test]
fn expand_order_zero_is_a_usage_error() {
    let output = run(&["expand", "--method", "gspm", "--order", "0"]);
    assert_eq!(output.status.code(), Some(64));
    let err = stderr_json(&output);
    assert_eq!(err["code"], "usage");
}

#[test]
fn expand_rejects_unknown_method() {
    let output = run(&["expand", "--method", "euler", "--order", "2"]);
    assert_eq!(output.status.code(), Some(64));
    assert_eq!(stderr_json(&output)["code"], "usage");
}

#[test]
fn mu_values_match_series_arithmetic() {
    let output = run(&["mu", "--eps", "0.01", "--order", "2"]);
    assert!(output.status.success());
    let v: f64 = stdout(&output).trim().parse().unwrap();
    assert!((v - 0.998740625).abs() < 1e-12, "got {v}");

    let output = run(&["mu", "--eps", "0", "--order", "3"]);
    let v: f64 = stdout(&output).trim().parse().unwrap();
    assert_eq!(v, 1.0);

    let output = run(&["mu", "--eps", "0.01", "--order", "3"]);
    let v: f64 = stdout(&output).trim().parse().unwrap();
    assert!((v - 0.998740451).abs() <= 1e-7, "got {v}");
}

#[test]
fn fold_flag_selects_the_mirrored_expansion() {
    let output = run(&["expand", "--order", "1", "--fold", "-1"]);
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(value["mu"][0], "-1");
}

#[test]
fn solver_errors_exit_two_with_structured_stderr() {
    // mu-independent slow equation: the fold pole cannot be removed.
    let path = temp_path("nomu.json");
    fs::write(&path, r#"{"name": "nomu", "f": "x + y - x^3/3", "g": "1 - x"}"#).unwrap();
    let output = run(&["expand", "--system", path.to_str().unwrap(), "--order", "1"]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr_json(&output);
    assert_eq!(err["code"], "solver");
    assert!(err["message"].as_str().unwrap().len() > 4);
    fs::remove_file(&path).ok();
}

#[test]
fn parse_errors_exit_two() {
    let path = temp_path("bad.json");
    fs::write(&path, r#"{"name": "bad", "f": "x / y", "g": "mu - x"}"#).unwrap();
    let output = run(&["expand", "--system", path.to_str().unwrap(), "--order", "1"]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(stderr_json(&output)["code"], "solver");
    fs::remove_file(&path).ok();
}

#[test]
fn simulate_emits_csv_and_metadata_sidecar() {
    let path = temp_path("traj.csv");
    let output = run(&[
        "simulate", "--eps", "0.05", "--mu", "1.2", "--tend", "5", "--tol", "1e-9", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{:?}", output);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y"));
    let first = lines.next().unwrap();
    let fields: Vec<&str> = first.split(',').collect();
    assert_eq!(fields.len(), 3);
    // 17 significant digits: mantissa with 16 fractional places.
    assert!(fields[0].contains('e'), "float format: {first}");
    let meta_path = path.with_extension("csv.meta.json");
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&meta_path).unwrap()).unwrap();
    assert_eq!(meta["command"], "simulate");
    assert_eq!(meta["eps"], 0.05);
    assert_eq!(meta["initial"][0], 0.5);
    assert!(meta["version"].as_str().is_some());
    fs::remove_file(&path).ok();
    fs::remove_file(&meta_path).ok();
}

#[test]
fn simulate_rejects_out_of_range_tolerance() {
    let output = run(&[
        "simulate", "--eps", "0.05", "--mu", "1.2", "--tend", "5", "--tol", "0.5",
    ]);
    assert_eq!(output.status.code(), Some(64));
}

#[test]
fn sweep_classifies_rows_in_order() {
    let output = run(&["sweep", "--eps", "0.05", "--mu", "0.9,1.2"]);
    assert!(output.status.success());
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "mu,amplitude_x,period,classification");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].ends_with("relaxation"), "{}", lines[1]);
    assert!(lines[2].ends_with("none"), "{}", lines[2]);
    // The no-cycle row leaves amplitude and period empty.
    assert!(lines[2].contains(",,"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let a = run(&["expand", "--method", "gspm", "--order", "3"]);
    let b = run(&["expand", "--method", "gspm", "--order", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["sweep", "--eps", "0.05", "--mu", "0.9"]);
    let b = run(&["sweep", "--eps", "0.05", "--mu", "0.9"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn check_skip_numeric_passes_quickly() {
    let started = std::time::Instant::now();
    let output = run(&["check", "--skip-numeric"]);
    assert!(output.status.success(), "{:?}", output);
    let text = stdout(&output);
    assert!(text.contains("PASS gspm-fcm-agreement"));
    assert!(text.contains("PASS invariance-order"));
    assert!(text.contains("PASS darboux-oracle"));
    assert!(!text.contains("FAIL"));
    assert!(started.elapsed() < std::time::Duration::from_secs(10));
}

#[test]
fn full_check_passes_including_numeric_items() {
    let output = run(&["check"]);
    assert!(output.status.success(), "{:?}", output);
    let text = stdout(&output);
    assert!(text.contains("PASS series-vs-bisection"));
    assert!(text.contains("PASS jet-consistency"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn explode_prints_mu_star_and_writes_summary() {
    let path = temp_path("explosion.csv");
    let output = run(&[
        "explode", "--eps", "0.05", "--lo", "0.95", "--hi", "1.01", "--resolution", "1e-7",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{:?}", output);
    let mu_star: f64 = stdout(&output).trim().parse().unwrap();
    let series = 1.0 - 0.05 / 8.0 - 3.0 * 0.05 * 0.05 / 32.0;
    assert!((mu_star - series).abs() < 5e-3, "mu_star {mu_star}");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("mu_star,bracket_width,amplitude_below,amplitude_above\n"));
    assert!(path.with_extension("csv.meta.json").exists());
    fs::remove_file(&path).ok();
    fs::remove_file(path.with_extension("csv.meta.json")).ok();
}

#[test]
fn check_against_corrupted_expansion_fails() {
    let good = run(&["expand", "--method", "gspm", "--order", "2"]);
    let mut value: serde_json::Value = serde_json::from_str(&stdout(&good)).unwrap();
    value["mu"][1] = serde_json::json!("1/8"); // sign flip
    let path = temp_path("corrupt.json");
    fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
    let output = run(&[
        "check", "--skip-numeric", "--against", path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout(&output).contains("FAIL against-file"));
    fs::remove_file(&path).ok();
}

#[test]
fn expansion_export_round_trips_through_check() {
    let path = temp_path("good.json");
    let output = run(&[
        "expand", "--method", "gspm", "--order", "2", "--out", path.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let output = run(&[
        "check", "--skip-numeric", "--against", path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stdout(&output));
    assert!(stdout(&output).contains("PASS against-file"));
    fs::remove_file(&path).ok();
}

#[test]
fn max_phi_env_caps_fcm_order() {
    let output = bin()
        .env("CANARDKIT_MAX_PHI", "1")
        .args(["expand", "--method", "fcm", "--order", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = stderr_json(&output);
    assert_eq!(err["code"], "solver");
    assert!(err["message"].as_str().unwrap().contains("maximum"));
}
