use std::process::Command;

use pullin_dyn_cli::record::{config_hash, RunRecord};
use pullin_dyn_cli::run_with_env;
use serde_json::Value;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_env(args: &[&str], env: Option<&str>) -> Output {
    let mut argv = vec!["pullin-dyn"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with_env(&argv, env, &mut out, &mut err);
    Output { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn run(args: &[&str]) -> Output {
    run_env(args, None)
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

/// Data rows of a CSV table as maps from column name to cell.
fn table(csv: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines.map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect()).collect()
}

fn num(cell: &str) -> f64 {
    cell.parse().unwrap_or_else(|_| panic!("not a number: `{cell}`"))
}

#[test]
fn pullin_reports_threshold() {
    let j = json(&["pullin", "--xi", "0", "--kappa", "0"]);
    assert_eq!(j["v_dpi"], 0.5);
    assert_eq!(j["x_dpi"], 0.5);
    assert_eq!(j["convexity_ok"], true);
    let j = json(&["pullin", "--xi", "0", "--kappa", "1"]);
    assert!((j["v_dpi"].as_f64().unwrap() - 0.5339).abs() < 1e-3);
    assert!((j["x_dpi"].as_f64().unwrap() - 0.5596).abs() < 1e-3);
}

#[test]
fn pullin_sensitivity_flag() {
    let j = json(&["pullin", "--kappa", "0.5", "--sensitivity"]);
    assert!(j["dx0_dkappa"].as_f64().unwrap() > 0.0);
    assert!(j["dv_dpi_dkappa"].as_f64().unwrap() > 0.0);
    assert_eq!(j["fd_consistent"], true);
}

#[test]
fn physical_units_route_through_normalization() {
    // k = 1, m = 1, A eps0 = 1, gap = 1, no coating: V* = sqrt(k g^3 / (eps0 A)) / 2 in volts.
    let j = json(&[
        "pullin",
        "--mass",
        "1",
        "--spring-k",
        "1",
        "--area",
        "1",
        "--eps0",
        "1",
        "--eps-r",
        "1",
        "--d0",
        "0",
        "--gap",
        "1",
    ]);
    assert_eq!(j["xi"], 0.0);
    assert!((j["voltage_dpi"].as_f64().unwrap() - 0.5).abs() < 1e-12, "{j}");
    assert!((j["time_scale"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn classify_examples() {
    let j = json(&["classify", "--xi", "0", "--v", "0.4", "--kappa", "0"]);
    assert_eq!(j["regime"], "periodic");
    assert!((j["x_s"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    let j = json(&["classify", "--v", "0.5"]);
    assert_eq!(j["regime"], "critical");
    assert_eq!(j["x_limit"], 0.5);
    let j = json(&["classify", "--v", "0.6"]);
    assert_eq!(j["regime"], "touchdown");
    assert!((j["tc_bound"].as_f64().unwrap() - 6.0303).abs() < 1e-4);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["pullin", "--xi", "0", "--kappa", "6"]).code, 3);
    assert_eq!(run(&["pullin", "--xi", "-1"]).code, 2);
    assert_eq!(run(&["classify", "--xi", "0"]).code, 2);
    assert_eq!(run(&["period", "--v", "0.6"]).code, 5);
    assert_eq!(run(&["bogus"]).code, 2);
    assert_eq!(run(&["pullin", "--precision", "0"]).code, 2);
    assert_eq!(run(&["simulate", "--v", "0.4", "--dt", "-1"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["--version"]).code, 0);
    let o = run(&["period", "--v", "0.6"]);
    assert!(o.stderr.contains("classify"), "{}", o.stderr);
    assert!(o.stdout.is_empty());
}

#[test]
fn energy_bound_failure_exits_4() {
    let o = run(&["simulate", "--v", "0.4", "--t-max", "10", "--dt", "0.01", "--max-energy-drift", "1e-14"]);
    assert_eq!(o.code, 4, "{}", o.stderr);
    assert!(o.stderr.contains("energy drift"));
}

#[test]
fn mixing_physical_and_normalized_flags_exits_2() {
    let o = run(&["classify", "--mass", "1", "--v", "0.4"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("cannot be combined"));
}

#[test]
fn simulate_at_zero_voltage_has_two_rows() {
    let o = run(&["simulate", "--v", "0", "--t-max", "7"]);
    assert_eq!(o.code, 0);
    let rows = table(&o.stdout);
    assert_eq!(rows.len(), 2);
    assert_eq!(num(&rows[0]["t"]), 0.0);
    assert_eq!(num(&rows[1]["t"]), 7.0);
    assert!(rows.iter().all(|r| num(&r["x"]) == 0.0));
}

#[test]
fn simulate_periodic_footer_lists_events_in_order() {
    let o = run(&["simulate", "--v", "0.4", "--t-max", "8", "--sample-every", "50"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("t,x,v,H\n"));
    let events: Vec<&str> = o.stdout.lines().filter(|l| l.starts_with("# event,")).collect();
    assert!(events[0].starts_with("# event,stagnation,"), "{events:?}");
    assert!(events[1].starts_with("# event,return,"), "{events:?}");
    let rows = table(&o.stdout);
    let t: Vec<f64> = rows.iter().map(|r| num(&r["t"])).collect();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    assert!(o.stdout.contains("# terminated_by,horizon"));
}

#[test]
fn simulate_touchdown_respects_bound() {
    let o = run(&["simulate", "--v", "0.6", "--sample-every", "1000"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let last_event = o.stdout.lines().rfind(|l| l.starts_with("# event,")).unwrap();
    let parts: Vec<&str> = last_event.split(',').collect();
    assert_eq!(parts[1], "touchdown");
    let tc = num(parts[2]);
    assert!(tc <= 2.0 / 0.11f64.sqrt());
    assert!((tc - 3.445424885747784).abs() < 1e-6);
    let rows = table(&o.stdout);
    // H is undefined at contact and left empty
    assert_eq!(rows.last().unwrap()["H"], "");
}

#[test]
fn simulate_damped_omits_energy_column() {
    let o = run(&["simulate", "--v", "0.4", "--mu", "0.2", "--t-max", "1"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("t,x,v\n"));
    assert!(!o.stdout.contains("# energy_drift"));
}

#[test]
fn simulate_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let o = run(&["simulate", "--v", "0.3", "--t-max", "1", "--output", path.to_str().unwrap()]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,x,v,H\n"));
}

#[test]
fn period_methods_agree() {
    let j = json(&["period", "--xi", "0", "--v", "0.4", "--kappa", "0", "--method", "both"]);
    assert!(j["discrepancy"].as_f64().unwrap() <= 1e-7);
    let j = json(&["period", "--v", "0.01", "--method", "both"]);
    let t_p = j["quad"]["t_p"].as_f64().unwrap();
    assert!((t_p / (2.0 * std::f64::consts::PI) - 1.0).abs() < 1e-3);
    assert!(j["discrepancy"].as_f64().unwrap() <= 1e-6);
    let j = json(&["period", "--v", "0.4", "--method", "quad"]);
    assert!(j.get("ode").is_none() && j.get("discrepancy").is_none());
}

fn sweep_rows(args: &[&str]) -> Vec<std::collections::HashMap<String, String>> {
    let mut full = vec!["sweep"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert_eq!(o.code, 0, "{}", o.stderr);
    table(&o.stdout)
}

#[test]
fn sweep_stagnation_increases_with_voltage() {
    let rows = sweep_rows(&["--xi", "0", "--kappa", "0", "--v-min", "0.05", "--v-max", "0.45", "--v-steps", "9"]);
    assert_eq!(rows.len(), 9);
    let xs: Vec<f64> = rows.iter().map(|r| num(&r["x_s"])).collect();
    assert!(xs.windows(2).all(|w| w[1] > w[0]), "{xs:?}");
}

#[test]
fn sweep_regime_flips_across_threshold() {
    let rows = sweep_rows(&["--v-min", "0.3", "--v-max", "0.7", "--v-steps", "4"]);
    let regimes: Vec<&str> = rows.iter().map(|r| r["regime"].as_str()).collect();
    assert_eq!(regimes, ["periodic", "periodic", "touchdown", "touchdown"]);
    for r in &rows[2..] {
        assert!(r["x_s"].is_empty() && r["t_p"].is_empty());
        assert!(num(&r["t_c"]) > 0.0);
    }
}

#[test]
fn sweep_stagnation_decreases_with_stiffness() {
    let rows = sweep_rows(&["--v", "0.4", "--kappa", "0:1:3", "--columns", "x_s"]);
    let xs: Vec<f64> = rows.iter().map(|r| num(&r["x_s"])).collect();
    assert_eq!(xs.len(), 3);
    assert!(xs.windows(2).all(|w| w[1] < w[0]), "{xs:?}");
}

#[test]
fn sweep_flags_invalid_rows_and_continues() {
    let rows = sweep_rows(&["--v", "0.4", "--kappa", "5:6:2"]);
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["error"].is_empty());
    assert!(rows[1]["error"].contains("convexity"), "{:?}", rows[1]);
}

#[test]
fn sweep_rejects_bad_specs() {
    assert_eq!(run(&["sweep", "--v-min", "0.4", "--v-max", "0.1", "--v-steps", "3"]).code, 2);
    assert_eq!(run(&["sweep", "--v-min", "0.1", "--v-max", "0.4", "--v-steps", "1"]).code, 2);
    assert_eq!(run(&["sweep", "--v", "0.4", "--columns", "nope"]).code, 2);
    assert_eq!(run(&["sweep"]).code, 2);
    assert_eq!(run(&["sweep", "--v", "0.4", "--v-min", "0.1"]).code, 2);
}

#[test]
fn sweep_header_records_spec() {
    let o = run(&["sweep", "--xi", "0:1:3", "--v", "0.2", "--columns", "regime"]);
    let first = o.stdout.lines().next().unwrap();
    assert_eq!(first, "# sweep xi=0.0:1.0:3 kappa=0.0 v=0.2 columns=regime precision=12");
}

#[test]
fn sweep_output_is_identical_across_job_counts() {
    let args = ["sweep", "--xi", "0:1:4", "--kappa", "0:1:3", "--v-min", "0.1", "--v-max", "1.2", "--v-steps", "7"];
    let serial = run(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(serial.code, 0);
    for jobs in ["2", "4", "0"] {
        let parallel = run(&[&args[..], &["--jobs", jobs]].concat());
        assert_eq!(serial.stdout, parallel.stdout, "jobs = {jobs}");
    }
    let j1 = run(&[&args[..], &["--format", "json", "--jobs", "1"]].concat());
    let j4 = run(&[&args[..], &["--format", "json", "--jobs", "4"]].concat());
    assert_eq!(j1.stdout, j4.stdout);
    let v: Value = serde_json::from_str(&j1.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4 * 3 * 7);
}

#[test]
fn emitted_numbers_round_trip() {
    let j = json(&["period", "--v", "0.37", "--method", "quad"]);
    let t_p = j["quad"]["t_p"].as_f64().unwrap();
    let direct =
        pullin_dyn::quadrature::period_by_quadrature(&pullin_dyn::model::ModelParams::linear(0.0, 0.37)).unwrap().t_p;
    assert_eq!(t_p, direct);

    let o = run(&["sweep", "--v", "0.37", "--columns", "x_s", "--precision", "9"]);
    let x = num(&table(&o.stdout)[0]["x_s"]);
    let again: f64 = format!("{:.8e}", x).parse().unwrap();
    assert_eq!(x, again);
}

#[test]
fn precision_flag_beats_environment_which_beats_default() {
    let args = ["classify", "--v", "0.3"];
    let full = run_env(&args, None);
    let env6 = run_env(&args, Some("6"));
    let flag3 = run_env(&[&args[..], &["--precision", "3"]].concat(), Some("6"));
    let x = |o: &Output| serde_json::from_str::<Value>(&o.stdout).unwrap()["x_s"].as_f64().unwrap();
    assert_eq!(x(&full), pullin_dyn::analysis::stagnation(&pullin_dyn::model::ModelParams::linear(0.0, 0.3)).unwrap());
    assert_eq!(x(&env6), 0.1);
    assert_eq!(x(&flag3), 0.1);
    let o = run_env(&["classify", "--v", "0.35"], Some("3"));
    assert_eq!(serde_json::from_str::<Value>(&o.stdout).unwrap()["x_s"].as_f64().unwrap(), 0.143);
    assert_eq!(run_env(&args, Some("garbage")).code, 2);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# model\nxi = 0\nv = 0.6\nkappa=0\ncolumns = regime\n").unwrap();
    let cfg = path.to_str().unwrap();
    let j = json(&["--config", cfg, "classify"]);
    assert_eq!(j["regime"], "touchdown");
    let j = json(&["classify", "--config", cfg, "--v", "0.4"]);
    assert_eq!(j["regime"], "periodic");

    std::fs::write(&path, "v = 0.4\nbogus_key = 1\n").unwrap();
    let o = run(&["--config", cfg, "classify"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("bogus-key"));

    std::fs::write(&path, "kappa = 0.5\nsensitivity = true\n").unwrap();
    let j = json(&["--config", cfg, "pullin"]);
    assert!(j.get("dx0_dkappa").is_some());

    assert_eq!(run(&["--config", "/nonexistent/file", "pullin"]).code, 2);
}

#[test]
fn record_sidecar_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("record.json");
    let o = run(&["classify", "--v", "0.4", "--record", path.to_str().unwrap()]);
    assert_eq!(o.code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let rec: RunRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(rec.command, "classify");
    assert_eq!(rec.exit_code, 0);
    assert_eq!(rec.inputs["v"], 0.4);
    assert_eq!(rec.output, Value::String(o.stdout.clone()));
    assert_eq!(rec.config_hash, config_hash("classify", &rec.inputs));
    assert_eq!(serde_json::to_value(&rec).unwrap(), serde_json::from_str::<Value>(&text).unwrap());

    let again = dir.path().join("again.json");
    run(&["classify", "--v", "0.4", "--record", again.to_str().unwrap()]);
    let rec2: RunRecord = serde_json::from_str(&std::fs::read_to_string(&again).unwrap()).unwrap();
    assert_eq!(rec.config_hash, rec2.config_hash);
}

#[test]
fn generic_examples() {
    let j = json(&["generic", "--mu", "1", "--lambda", "4", "--c1", "1", "--c2", "0.5"]);
    assert_eq!(j["guaranteed"], true);
    assert_eq!(j["confirmed"], true);
    assert!(j["t_c"].as_f64().unwrap() <= 1.842);
    let j = json(&["generic", "--mu", "1", "--lambda", "1", "--c1", "1", "--c2", "0.5"]);
    assert_eq!(j["guaranteed"], false);
    assert_eq!(j["classification"], "no-guarantee");
    let j = json(&["generic", "--lambda", "4", "--c1", "1", "--c2", "0.5"]);
    assert!(j["t_c"].as_f64().unwrap() <= 2f64.sqrt());
    // a false bound on |f| is rejected
    assert_eq!(run(&["generic", "--lambda", "4", "--c1", "0.5", "--c2", "0.5"]).code, 2);
    assert_eq!(run(&["generic", "--lambda", "4", "--c1", "1", "--c2", "0.5", "--f", "cubic"]).code, 2);
}

#[test]
fn binary_exit_status_and_environment() {
    let bin = env!("CARGO_BIN_EXE_pullin-dyn");
    let out = Command::new(bin).args(["pullin", "--kappa", "6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(bin).args(["classify", "--v", "0.3"]).env("PULLIN_DYN_PRECISION", "2").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["x_s"], 0.1);
    let out = Command::new(bin).args(["period", "--v", "0.6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(5));
}
