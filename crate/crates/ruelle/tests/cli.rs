//! End-to-end checks of the command-line interface: interchange schemas,
//! exit codes, and byte-level reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ruelle-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ruelle"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn orbits_default_config_has_period_two_points() {
    let dir = workdir("orbits");
    let catalog_path = dir.join("catalog.json");
    let out = run_ok(&["orbits", "--out", catalog_path.to_str().unwrap()]);
    let envelope: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(envelope["config"]["model.cat"], "2,1,1,1");
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&catalog_path).unwrap()).unwrap();
    // N_2 = 5 fixed points of A^2: sum over period-2 entries of
    // primitive_length * multiplicity equals 5
    let entries = file["entries"].as_array().unwrap();
    let n2: f64 = entries
        .iter()
        .filter(|e| (e["T"].as_f64().unwrap() - 2.0).abs() < 1e-12)
        .map(|e| e["T_prim"].as_f64().unwrap() * e["mult"].as_f64().unwrap())
        .sum();
    assert_eq!(n2, 5.0);
}

#[test]
fn malformed_config_exits_with_code_two() {
    let dir = workdir("badconfig");
    let config_path = dir.join("bad.conf");
    std::fs::write(&config_path, "model.type cat_suspension\n").unwrap();
    let out = bin()
        .args(["orbits", "--config", config_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
}

#[test]
fn unknown_config_key_exits_with_code_two() {
    let dir = workdir("unknownkey");
    let config_path = dir.join("typo.conf");
    std::fs::write(&config_path, "model.tpye = cat_suspension\n").unwrap();
    let out = bin()
        .args(["orbits", "--config", config_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = workdir("determinism");
    let config_path = dir.join("run.conf");
    std::fs::write(&config_path, "numerics.horizon = 12\nmodel.potential = 0.25\n").unwrap();
    let out_a = dir.join("a.json");
    let out_b = dir.join("b.json");
    let run = |path: &PathBuf| {
        run_ok(&[
            "orbits",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
        ])
        .stdout
    };
    let stdout_a = run(&out_a);
    let stdout_b = run(&out_b);
    assert_eq!(stdout_a, stdout_b);
    assert_eq!(std::fs::read(&out_a).unwrap(), std::fs::read(&out_b).unwrap());
}

#[test]
fn zeta_eval_matches_closed_form_through_files() {
    let dir = workdir("zeta");
    let catalog_path = dir.join("catalog.json");
    let config_path = dir.join("run.conf");
    std::fs::write(&config_path, "numerics.horizon = 30\n").unwrap();
    run_ok(&[
        "orbits",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        catalog_path.to_str().unwrap(),
    ]);
    let out = run_ok(&[
        "zeta-eval",
        "--catalog",
        catalog_path.to_str().unwrap(),
        "--z",
        "2,0",
    ]);
    let envelope: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let value_re = envelope["result"]["value_re"].as_f64().unwrap();
    let expected = (1.0 - (-2.0f64).exp()).ln();
    assert!((value_re - expected).abs() < 1e-12);
    assert!(envelope["result"]["tail_bound"].as_f64().unwrap().is_finite());
}

#[test]
fn zeros_then_counting_function() {
    let dir = workdir("zeros");
    let catalog_path = dir.join("catalog.json");
    let resonances_path = dir.join("resonances.json");
    run_ok(&["orbits", "--out", catalog_path.to_str().unwrap()]);
    let out = run_ok(&[
        "zeros",
        "--catalog",
        catalog_path.to_str().unwrap(),
        "--box",
        "-1,1,-10,10",
        "--out",
        resonances_path.to_str().unwrap(),
    ]);
    let envelope: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(envelope["result"]["count"], 3);
    let out = run_ok(&[
        "nr",
        "--resonances",
        resonances_path.to_str().unwrap(),
        "--R",
        "7",
    ]);
    let envelope: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(envelope["result"]["count"], 3);
    let out = run_ok(&[
        "nr",
        "--resonances",
        resonances_path.to_str().unwrap(),
        "--R",
        "1",
    ]);
    let envelope: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(envelope["result"]["count"], 1);
}

#[test]
fn escape_check_reports_spec_fields() {
    let out = run_ok(&["escape-check", "--samples", "400", "--radius-min", "10"]);
    let envelope: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let result = &envelope["result"];
    for key in ["violations_i", "violations_ii", "worst_margin_i", "worst_margin_ii", "fitted_c"] {
        assert!(!result[key].is_null(), "missing field {key}");
    }
    assert_eq!(result["violations_i"], 0);
    assert_eq!(result["violations_ii"], 0);
}

#[test]
fn fbi_pipeline_fit_and_wavefront() {
    let dir = workdir("fbi");
    let csv_path = dir.join("transform.csv");
    run_ok(&[
        "fbi",
        "--s",
        "1",
        "--c",
        "1",
        "--h",
        "0.1",
        "--l-max",
        "40",
        "--xi-max",
        "3.4",
        "--n-xi",
        "32",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("x,xi,re,im,abs"));
    let out = run_ok(&["fbi-fit", "--in", csv_path.to_str().unwrap(), "--s", "1"]);
    let envelope: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(envelope["result"]["slope"].as_f64().unwrap() < 0.0);
    assert!(envelope["result"]["r_squared"].as_f64().unwrap() > 0.95);

    // wavefront input: same signal with an inserted jump
    let wf_path = dir.join("wf.csv");
    run_ok(&[
        "fbi",
        "--s",
        "1",
        "--c",
        "1",
        "--h",
        "0.1",
        "--l-max",
        "24",
        "--xi-max",
        "2.4",
        "--n-xi",
        "24",
        "--jump-at",
        "0.3",
        "--out",
        wf_path.to_str().unwrap(),
    ]);
    let out = run_ok(&["fbi-wf", "--in", wf_path.to_str().unwrap(), "--s", "1"]);
    let envelope: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let detected = envelope["result"]["detected_x"].as_array().unwrap();
    assert!(!detected.is_empty());
    for x in detected {
        assert!((x.as_f64().unwrap() - 0.3).abs() <= 0.1f64.sqrt());
    }
}

#[test]
fn spectra_tiny_disk_is_exact() {
    let dir = workdir("spectra");
    let csv_path = dir.join("stability.csv");
    let out = run_ok(&[
        "spectra",
        "--eps-list",
        "1e-2",
        "--z",
        "10",
        "--R",
        "1",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    let envelope: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(envelope["result"]["rows"][0]["d_zH"], 0.0);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("eps,d_zH,n_eigs_in_disk"));
    assert!(std::fs::read_to_string(dir.join("stability.csv.sectors.json")).is_ok());
}
