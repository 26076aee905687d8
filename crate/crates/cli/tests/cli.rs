use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

const FLAGSHIP_TRIAD: &str = r#"{"marg":{"U":0.5,"V":0.5,"W":0.5},"cond":[{"event":"V","given":"W","p":0.78},{"event":"U","given":"W","p":0.22},{"event":"not U","given":"V","p":0.22}]}"#;

fn survey_json(pre: f64, angles: [f64; 3]) -> String {
    let q = |l: &str| format!(r#"{{"label":"{l}","yes":0.5,"pre_yes":{pre},"pre_no":{pre}}}"#);
    format!(r#"{{"questions":[{},{},{}],"angles_deg":[{},{},{}]}}"#, q("u"), q("v"), q("w"), angles[0], angles[1], angles[2])
}

fn qmachine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmachine")).args(args).env_remove("QMACHINE_SEED").output().unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    let out = qmachine(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp_file(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| v.to_string().parse().unwrap())
}

#[test]
fn prob_examples() {
    let v = json_ok(&["prob", "--epsilon", "1", "--d", "0", "--theta", "1.5707963"]);
    assert!((num(&v["p1"]) - 0.5).abs() < 1e-6);
    let v = json_ok(&["prob", "--epsilon", "0.5", "--d", "0.2", "--x", "0.4"]);
    assert!((num(&v["p1"]) - 0.7).abs() < 1e-12);
    let v = json_ok(&["--degrees", "prob", "--epsilon", "1", "--theta", "90"]);
    assert!((num(&v["p1"]) - 0.5).abs() < 1e-12);
    let v = json_ok(&["prob", "--epsilon", "1", "--state", "0,0,-1", "--axis", "0,0,1"]);
    assert!(num(&v["p1"]).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qmachine(&["prob", "--epsilon", "2", "--x", "0.1"]).status.code(), Some(2));
    assert_eq!(qmachine(&["prob", "--epsilon", "0.5"]).status.code(), Some(2));
    assert_eq!(qmachine(&["prob", "--epsilon", "0.5", "--state", "1,0"]).status.code(), Some(2));
    assert_eq!(qmachine(&["simulate", "--epsilon", "1", "--theta", "1", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(qmachine(&["conditional", "--epsilon", "0.5", "--alpha", "4"]).status.code(), Some(2));
    assert_eq!(qmachine(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_three() {
    assert_eq!(qmachine(&["check", "hilbert", "--gamma2", "1"]).status.code(), Some(3));
    let bad = temp_file(&survey_json(0.6, [0.0, 60.0, 120.0]));
    assert_eq!(qmachine(&["survey", "--input", bad.path().to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["--degrees", "simulate", "--epsilon", "1", "--theta", "60", "--trials", "1000000", "--seed", "17"];
    let a = qmachine(&args);
    let b = qmachine(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let (p, se) = (num(&v["estimate"]), num(&v["std_error"]));
    assert!((p - 0.75).abs() < 4.0 * se && se < 0.0013);
    assert_eq!(v["metadata"]["seed"], 17);
    assert_eq!(v["metadata"]["trials"], 1_000_000);
    assert!(v["metadata"]["version"].is_string());
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qmachine"));
        c.args(["simulate", "--epsilon", "0.5", "--x", "0.1", "--trials", "100"]);
        if let Some(s) = flag {
            c.args(["--seed", s]);
        }
        match env {
            Some(e) => c.env("QMACHINE_SEED", e),
            None => c.env_remove("QMACHINE_SEED"),
        };
        let v: Value = serde_json::from_slice(&c.output().unwrap().stdout).unwrap();
        v["metadata"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("42"), None), 42);
    assert_eq!(run(Some("42"), Some("7")), 7);
}

#[test]
fn conditional_examples() {
    let v = json_ok(&["conditional", "--epsilon", "0.7071068", "--alpha", "2.0943951", "--method", "quad"]);
    assert!((num(&v["result"]["value"]) - 0.22).abs() < 0.01);
    let v = json_ok(&["conditional", "--epsilon", "0.7071068", "--alpha", "2.0943951", "--method", "formula"]);
    assert_eq!(v["result"]["validity"], "regime-overlap");
    assert!(v["result"]["diagnostics"]["heaviside_args"].is_array());
    let v = json_ok(&["conditional", "--epsilon", "1", "--alpha", "1"]);
    assert!((num(&v["result"]["value"]) - 0.5f64.cos().powi(2)).abs() < 1e-9);
    let v = json_ok(&["conditional", "--epsilon", "0.7071068", "--alpha", "0"]);
    assert!((num(&v["result"]["value"]) - 1.0).abs() < 1e-8);
    let v = json_ok(&["conditional", "--epsilon", "0.5", "--alpha", "1", "--method", "mc", "--trials", "20000", "--seed", "3"]);
    assert_eq!(v["result"]["method"], "montecarlo");
    assert_eq!(v["metadata"]["trials"], 20000);
}

#[test]
fn sweep_csv_contract() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let p = path.to_str().unwrap();
    let summary = json_ok(&["sweep", "--epsilons", "0.000001,0.25,0.5,0.7071068,1", "--alpha-steps", "181", "--out", p]);
    assert_eq!(summary["rows"], 905);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "epsilon,alpha,p_quad,p_closed_form,validity,p_mc,mc_stderr");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 905);
    let key = |r: &Vec<&str>| (r[0].parse::<f64>().unwrap(), r[1].parse::<f64>().unwrap());
    assert!(rows.windows(2).all(|w| key(&w[0]) < key(&w[1])));
    for r in &rows {
        let (eps, alpha) = key(r);
        let p: f64 = r[2].parse().unwrap();
        if eps == 1.0 {
            assert!((p - (alpha / 2.0).cos().powi(2)).abs() < 1e-6);
        }
        if eps == 1e-6 {
            assert!((p - (1.0 - alpha / PI)).abs() < 1e-3);
        }
    }
}

#[test]
fn sweep_independent_of_threads() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qmachine"))
            .args(["sweep", "--epsilons", "0.3,0.9", "--alpha-steps", "9", "--mc-trials", "500", "--seed", "2"])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn check_verdicts() {
    let triad = temp_file(FLAGSHIP_TRIAD);
    let v = json_ok(&["check", "kolmogorov", "--triad", triad.path().to_str().unwrap()]);
    assert_eq!(v["kolmogorov"], "infeasible");
    assert_eq!(v["certificate"]["lower"], "28/100");
    assert_eq!(v["certificate"]["upper"], "11/100");
    assert_eq!(v["certificate"]["atom"], "U^c∩V∩W");
    assert_eq!(v["certificate"]["verified"], true);

    let v = json_ok(&["check", "hilbert", "--gamma2", "0.78"]);
    assert_eq!(v["hilbert"], "infeasible");
    assert_eq!(v["required_cosine_exact"], "-14/11");
    assert!((num(&v["required_cosine"]) + 1.2727).abs() < 1e-4);
    let v = json_ok(&["check", "hilbert", "--gamma2", "0.5"]);
    assert_eq!(v["hilbert"], "feasible");
    assert_eq!(num(&v["required_cosine"]), 0.0);

    let v = json_ok(&["check", "classify", "--triad", triad.path().to_str().unwrap(), "--gamma2", "0.78"]);
    assert_eq!(v["class"], "neither");

    let indep = temp_file(r#"{"marg":{"U":0.5,"V":0.5,"W":0.5},"cond":[{"event":"V","given":"W","p":0.5},{"event":"U","given":"W","p":0.5},{"event":"U^c","given":"V","p":0.5}]}"#);
    let v = json_ok(&["check", "kolmogorov", "--triad", indep.path().to_str().unwrap()]);
    assert_eq!(v["kolmogorov"], "feasible");
    assert_eq!(v["witness"]["U∩V∩W"], "1/8");
}

#[test]
fn malformed_inputs_exit_two() {
    let bad = temp_file(r#"{"marg":{"U":0.5}}"#);
    let out = qmachine(&["check", "kolmogorov", "--triad", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema error"));
    let bad = temp_file("{\"questions\": [");
    let out = qmachine(&["survey", "--input", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema error"));
    let out = qmachine(&["check", "kolmogorov", "--triad", "/nonexistent/triad.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn survey_pipeline() {
    let flagship = temp_file(&survey_json(0.15, [0.0, 60.0, 120.0]));
    let p = flagship.path().to_str().unwrap();
    let v = json_ok(&["survey", "--input", p, "--census-samples", "100000"]);
    assert!((num(&v["model"]["epsilon"]) - 0.7).abs() < 1e-12);
    assert!(num(&v["model"]["questions"][0]["d"]).abs() < 1e-12);
    let v = json_ok(&["survey", "--input", p, "--force-epsilon", "0.7071068", "--census-samples", "100000"]);
    assert_eq!(v["classification"]["class"], "neither");
    assert_eq!(v["census"]["regions"], 13);
    let total: f64 = v["census"]["fractions"].as_array().unwrap().iter().map(|r| num(&r["fraction"])).sum();
    assert!((total - 1.0).abs() < 1e-9);

    let classical = temp_file(&survey_json(0.5, [0.0, 30.0, 60.0]));
    let v = json_ok(&["survey", "--input", classical.path().to_str().unwrap(), "--census-samples", "10000"]);
    assert_eq!(v["classification"]["class"], "kolmogorovian");
}
