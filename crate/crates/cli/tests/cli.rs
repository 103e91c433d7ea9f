//! End-to-end tests of the `cubic5` binary: JSON schemas, exit codes,
//! config-file merging, and output files.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cubic5"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn count_emits_expected_fields() {
    let doc = json_of(&run(&["count", "--form", "1,0,0,1", "--r", "1", "--N", "10"]));
    assert_eq!(doc["schema"], "v1");
    assert_eq!(doc["J"], Value::from(121u64));
    assert_eq!(doc["form"], "1,0,0,1");
    assert_eq!(doc["variant"], "s");
    assert_eq!(doc["degenerate"], false);
    assert!(doc["elapsed_ms"].is_u64());
}

#[test]
fn count_flags_degenerate_forms() {
    let doc = json_of(&run(&["count", "--form", "1,3,3,1", "--r", "1", "--N", "4"]));
    assert_eq!(doc["degenerate"], true);
    assert_eq!(doc["J"], Value::from(25u64));
}

#[test]
fn count_writes_rept_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.rept");
    let doc = json_of(&run(&[
        "count",
        "--form",
        "1,0,0,1",
        "--r",
        "2",
        "--N",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]));
    assert_eq!(doc["J"], Value::from(225u64));
    let mut file = std::fs::File::open(&path).unwrap();
    let parsed = cubic5::lattice::read_rept(&mut file).unwrap();
    assert_eq!(parsed.r, 2);
    assert_eq!(parsed.n, 2);
    assert_eq!(parsed.dim, 5);
    // J recomputed from the exported table
    let j: cubic5::BigUint = parsed.entries.iter().map(|(_, c)| c * c).sum();
    assert_eq!(j, cubic5::BigUint::from(225u32));
    // keys are sorted
    assert!(parsed.entries.windows(2).all(|w| w[0].0 < w[1].0));
}

#[test]
fn exponents_reproduce_the_decoupling_exponent() {
    let doc = json_of(&run(&["exponents", "--p", "9"]));
    assert_eq!(doc["exponent"], "7/9");
    assert_eq!(doc["lambda0"], "7/9");
    assert_eq!(doc["S_w"], "1/1");
    assert_eq!(doc["S_tau"], "2/1");
    assert_eq!(doc["alpha1"], "8/13");
    assert_eq!(doc["domain_check"]["admissible"], true);
}

#[test]
fn exponents_handle_fold_counts_and_rational_p() {
    let doc = json_of(&run(&["exponents", "--r", "5"]));
    assert_eq!(doc["e_low"], 10);
    assert_eq!(doc["e_high"], 11);
    assert_eq!(doc["e_max"], 11);
    assert_eq!(doc["supercritical"], true);

    let doc = json_of(&run(&["exponents", "--p", "19/2", "--r", "1"]));
    assert_eq!(doc["p"], "19/2");
    assert_eq!(doc["e_max"], 2);
}

#[test]
fn transversality_reports_zero_violations_on_sound_forms() {
    let doc = json_of(&run(&[
        "transversality",
        "--form",
        "1,0,0,1",
        "--iota",
        "1",
        "--trials",
        "200",
        "--seed",
        "7",
    ]));
    assert_eq!(doc["violations"], 0);
    assert_eq!(doc["dimV"], "mixed");
    assert_eq!(doc["seed"], 7);
    assert_eq!(doc["iota"], 1);
    assert_eq!(doc["witnesses"].as_array().unwrap().len(), 0);
}

#[test]
fn taylor_reports_the_identity() {
    let doc = json_of(&run(&["taylor", "--form", "1,2,3,4"]));
    assert_eq!(doc["identity"], true);
    assert!(doc["remainder"].as_str().unwrap().contains("dt^3"));
}

#[test]
fn crosscheck_agrees_on_nondegenerate_forms() {
    let doc = json_of(&run(&[
        "crosscheck", "--form", "0,1,1,0", "--r", "2", "--N", "3",
    ]));
    assert_eq!(doc["equal"], true);
    assert_eq!(doc["J_s"], Value::from(496u64));
    assert_eq!(doc["J_sprime"], Value::from(496u64));
}

#[test]
fn fit_runs_a_schedule_and_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("points.dat");
    let doc = json_of(&run(&[
        "fit",
        "--form",
        "1,0,0,1",
        "--r",
        "1",
        "--N-schedule",
        "8,16,32",
        "--out",
        path.to_str().unwrap(),
    ]));
    assert_eq!(doc["verdict"], "consistent");
    assert_eq!(doc["e_max"], 2);
    let slope = doc["slope"].as_f64().unwrap();
    assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
    let data = std::fs::read_to_string(&path).unwrap();
    assert_eq!(data.lines().count(), 3);
    assert!(data.starts_with("8 81\n"));
}

#[test]
fn exit_codes_distinguish_validation_from_budget() {
    // unknown flag: usage error
    let out = run(&["count", "--form", "1,0,0,1", "--nope"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--nope"));

    // domain error: p out of range
    let out = run(&["exponents", "--p", "5"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("must exceed 5"));

    // budget error: impossible memory cap
    let out = run(&[
        "count", "--form", "1,0,0,1", "--r", "2", "--N", "64", "--mem-cap", "1000",
    ]);
    assert_eq!(exit_code(&out), 2);

    // missing required value
    let out = run(&["count", "--form", "1,0,0,1", "--r", "1"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--N"));

    // malformed form
    let out = run(&["count", "--form", "1,2,3", "--r", "1", "--N", "2"]);
    assert_eq!(exit_code(&out), 1);

    // help succeeds
    let out = run(&["--help"]);
    assert_eq!(exit_code(&out), 0);
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.conf");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "# experiment defaults\nform = 1,0,0,1\nr = 1\nN = 10\nvariant = s\n",
    );
    let doc = json_of(&run(&["count", "--config", path.to_str().unwrap()]));
    assert_eq!(doc["J"], Value::from(121u64));

    // a flag beats the config value
    let doc = json_of(&run(&[
        "count",
        "--config",
        path.to_str().unwrap(),
        "--N",
        "3",
    ]));
    assert_eq!(doc["J"], Value::from(16u64));
}

#[test]
fn config_rejects_unknown_keys_and_bad_syntax() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "form = 1,0,0,1\nbogus = 7\n");
    let out = run(&["count", "--config", path.to_str().unwrap(), "--r", "1", "--N", "1"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let path = write_config(dir.path(), "just some text\n");
    let out = run(&["count", "--config", path.to_str().unwrap(), "--r", "1", "--N", "1"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn repeated_runs_are_identical_apart_from_timing() {
    let strip = |mut doc: Value| {
        doc.as_object_mut().unwrap().remove("elapsed_ms");
        serde_json::to_string(&doc).unwrap()
    };
    let args = ["count", "--form", "2,-1,0,3", "--r", "2", "--N", "5"];
    let a = strip(json_of(&run(&args)));
    let b = strip(json_of(&run(&args)));
    assert_eq!(a, b);

    let args = [
        "transversality", "--form", "1,2,-1,3", "--iota", "2", "--trials", "64", "--seed", "3",
    ];
    let a = serde_json::to_string(&json_of(&run(&args))).unwrap();
    let b = serde_json::to_string(&json_of(&run(&args))).unwrap();
    assert_eq!(a, b);
}
