//! End-to-end tests of the `belllab` binary: exit codes, wire formats, and
//! reproducibility of file outputs.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn belllab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_belllab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_str(&stdout_of(out)).expect("stdout is JSON")
}

#[test]
fn count_prints_exact_values() {
    assert_eq!(stdout_of(&belllab(&["count", "--lambda", "3", "--l", "2"])).trim(), "6");
    assert_eq!(stdout_of(&belllab(&["count", "--lambda", "1", "--l", "9"])).trim(), "1");
}

#[test]
fn count_rejects_degenerate_arguments() {
    let out = belllab(&["count", "--lambda", "0", "--l", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = belllab(&["count", "--lambda", "2"]);
    assert_eq!(out.status.code(), Some(2)); // missing --l
}

#[test]
fn enumerate_lists_configurations_in_canonical_order() {
    let out = stdout_of(&belllab(&["enumerate", "--lambda", "3", "--l", "1"]));
    assert_eq!(out, "1,0,0\n0,1,0\n0,0,1\n");
    // Budget refusal: V(4, 20) = 1771 > 100.
    let out = belllab(&["enumerate", "--lambda", "4", "--l", "20", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1771"));
}

#[test]
fn finetune_constrained_reports() {
    let v = json_of(&belllab(&[
        "finetune", "--mode", "constrained", "--n", "1", "--lambda", "2", "--l", "2",
    ]));
    assert_eq!(v["mode"], "constrained-closed-form");
    assert_eq!(v["log10_one_minus_F"], 0.0);
    assert_eq!(v["n_f"], "81"); // V(2,2)⁴ = 3⁴
    assert_eq!(v["omega"], "4");

    let v = json_of(&belllab(&[
        "finetune", "--mode", "constrained", "--n", "2", "--lambda", "2", "--l", "2",
    ]));
    let expected = -60.0 * 3f64.log10();
    let got = v["log10_one_minus_F"].as_f64().unwrap();
    assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
}

#[test]
fn finetune_general_reports_and_budget() {
    let v = json_of(&belllab(&[
        "finetune", "--mode", "general", "--kernel", "injective", "--n", "2", "--lambda", "2",
        "--l", "1",
    ]));
    assert_eq!(v["mode"], "general-bruteforce");
    assert_eq!(v["n_f"], "16");
    assert_eq!(v["v"], "2");
    let got = v["log10_one_minus_F"].as_f64().unwrap();
    let expected = 16f64.log10() - 64.0 * 2f64.log10();
    assert!((got - expected).abs() < 1e-6);

    // Work estimate on stderr, exit 3.
    let out = belllab(&[
        "finetune", "--mode", "general", "--kernel", "constant", "--n", "2", "--lambda", "4",
        "--l", "100", "--budget", "1000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));

    // Injective kernel is only defined up to Λ = 4.
    let out = belllab(&[
        "finetune", "--mode", "general", "--kernel", "injective", "--n", "2", "--lambda", "5",
        "--l", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn entropy_reports() {
    let v = json_of(&belllab(&["entropy", "--n", "16", "--n0", "1"]));
    assert_eq!(v["per_run_MI_bits"], 8.0);
    assert_eq!(v["ratio_to_ref"], 100.0);
    assert_eq!(v["W"], "256");

    let v = json_of(&belllab(&["entropy", "--n", "2", "--n0", "3"]));
    assert_eq!(v["delta_S_bits"], -6.0);
    assert_eq!(v["S_bits"], 6.0);

    let v = json_of(&belllab(&["entropy", "--n", "1", "--n0", "5"]));
    assert_eq!(v["delta_S_bits"], 0.0);
    assert_eq!(v["W"], "1");
}

#[test]
fn entropy_accepts_prior_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prior.json");
    // Dense prior over W = 4 sequences (N=2, N₀=1): point mass.
    std::fs::write(&path, r#"{"dense": [1.0, 0.0, 0.0, 0.0]}"#).unwrap();
    let v = json_of(&belllab(&[
        "entropy", "--n", "2", "--n0", "1", "--prior", path.to_str().unwrap(),
    ]));
    assert_eq!(v["S_bits"], 0.0);

    // Unnormalized prior is an argument error.
    std::fs::write(&path, r#"{"dense": [0.5, 0.0, 0.0, 0.0]}"#).unwrap();
    let out = belllab(&[
        "entropy", "--n", "2", "--n0", "1", "--prior", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn make_model(dir: &Path, name: &str, class: &str) -> String {
    let path = dir.join(name);
    let out = belllab(&[
        "make-model",
        "--class", class,
        "--n", "2",
        "--lambda", "4",
        "--l", "4",
        "--kernel", "readout",
        "--tables", "2,1,1,0;1,2,0,1;0,1,2,1;1,0,1,2",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path.to_str().unwrap().to_string()
}

#[test]
fn check_reports_constraints_and_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let constrained = make_model(dir.path(), "constrained.json", "constrained");
    let v = json_of(&belllab(&["check", "--model", &constrained]));
    assert_eq!(v["class"], "superdeterministic");
    assert_eq!(v["constraint_m"], true);
    assert_eq!(v["constraint_n"], true);
    assert_eq!(v["condition_ii"]["holds"], true);

    let demo = make_model(dir.path(), "demo.json", "demo");
    let v = json_of(&belllab(&["check", "--model", &demo]));
    assert_eq!(v["condition_ii"]["holds"], false);
    let witnesses = v["condition_ii"]["witnesses"].as_array().unwrap();
    assert!(!witnesses.is_empty());
    // Witness pairs are same-sector context objects.
    assert!(witnesses[0][0]["alpha"].is_string());
}

#[test]
fn check_rejects_invalid_model_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"class\": \"superdeterministic\"}").unwrap();
    let out = belllab(&["check", "--model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let out = belllab(&["check", "--model", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn simulate_is_reproducible_and_summarized() {
    let dir = tempfile::tempdir().unwrap();
    let model = make_model(dir.path(), "model.json", "constrained");
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    let summary = dir.path().join("summary.json");

    for (csv, seed) in [(&csv_a, "42"), (&csv_b, "42")] {
        let out = belllab(&[
            "simulate",
            "--model", &model,
            "--n0", "5000",
            "--seed", seed,
            "--out-csv", csv.to_str().unwrap(),
            "--out-json", summary.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&csv_a).unwrap();
    let b = std::fs::read(&csv_b).unwrap();
    assert_eq!(a, b, "same seed, byte-identical CSV");
    let header = String::from_utf8(a).unwrap();
    assert!(header.starts_with("run,alpha,beta,gA,gB,MA,MB,lambda,OA,OB\n"));

    let v: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(v["class"], "superdeterministic");
    assert_eq!(v["n_runs"], 5000);
    assert_eq!(v["condition_ii_analytic"], true);
    assert_eq!(v["coincidence_consistent"], true);
    let sectors = v["sectors"].as_array().unwrap();
    assert_eq!(sectors.len(), 4);
    let visits: u64 = sectors.iter().map(|s| s["visits"].as_u64().unwrap()).sum();
    assert_eq!(visits, 5000);
    assert!(sectors[0]["analytic"].is_array());
}

#[test]
fn thread_cap_env_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_belllab"))
        .env("BELLLAB_THREADS", "1")
        .args(["count", "--lambda", "4", "--l", "6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "84");

    let out = Command::new(env!("CARGO_BIN_EXE_belllab"))
        .env("BELLLAB_THREADS", "zero")
        .args(["count", "--lambda", "4", "--l", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
