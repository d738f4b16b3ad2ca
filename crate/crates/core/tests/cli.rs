use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn ncsim(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncsim")).args(args).env("NCSIM_OUT_DIR", out).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn validator(name: &str) -> jsonschema::Validator {
    jsonschema::validator_for(&json(&manifest(&format!("schemas/{name}")))).expect("schema compiles")
}

fn assert_valid(schema: &jsonschema::Validator, doc: &Value, what: &str) {
    let errors: Vec<String> = schema.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{what}: {errors:?}");
}

/// Validates run.jsonl, summary.json and timings.json in `dir`; returns the summary.
fn check_run(dir: &Path, command: &str) -> Value {
    let header = validator("log-header.schema.json");
    let records = jsonschema::validator_for(&{
        let mut s = json(&manifest("schemas/records.schema.json"));
        s["anyOf"] = Value::Array(vec![serde_json::json!({ "$ref": format!("#/$defs/record-{command}") })]);
        s
    })
    .unwrap();
    let text = fs::read_to_string(dir.join("run.jsonl")).unwrap();
    let mut lines = text.lines();
    let h: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_valid(&header, &h, "header");
    assert_eq!(h["config"]["command"]["name"], command);
    for (i, line) in lines.enumerate().take(2000) {
        assert_valid(&records, &serde_json::from_str(line).unwrap(), &format!("{command} record {i}"));
    }
    let summary = json(&dir.join("summary.json"));
    assert_valid(&validator("summary.schema.json"), &summary, "summary");
    assert_valid(&validator("timings.schema.json"), &json(&dir.join("timings.json")), "timings");
    summary
}

#[test]
fn shipped_inputs_match_their_schemas() {
    let cat = validator("catalogue.schema.json");
    for entry in fs::read_dir(manifest("catalogue")).unwrap() {
        let p = entry.unwrap().path();
        assert_valid(&cat, &json(&p), &p.display().to_string());
    }
    let targets = validator("targets.schema.json");
    assert_valid(&targets, &json(&manifest("data/qubit-targets.json")), "qubit targets");
    assert_valid(&targets, &json(&manifest("data/qubit-povm.json")), "qubit povm");
    assert_valid(&validator("state.schema.json"), &json(&manifest("data/plus-state.json")), "plus state");
    for name in ["decomposition", "model", "run-config"] {
        validator(&format!("{name}.schema.json"));
    }
}

#[test]
fn ks_search_reports_uncolourable() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ncsim(tmp.path(), &["ks", "search", manifest("catalogue/ceg-18-d4.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = check_run(tmp.path(), "ks-search");
    assert_eq!(s["result"]["verdict"], "uncolourable");
}

#[test]
fn ks_check_flags_an_invalid_colouring() {
    let tmp = tempfile::tempdir().unwrap();
    let colouring = tmp.path().join("c.json");
    fs::write(&colouring, serde_json::to_string(&[1u8; 18]).unwrap()).unwrap();
    let out = tmp.path().join("out");
    let o = ncsim(&out, &["ks", "check", "ceg-18-d4", colouring.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = check_run(&out, "ks-check");
    assert_eq!(s["result"]["valid"], false);
    assert_eq!(s["result"]["violated_bases"], 9);
}

#[test]
fn gz_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ncsim(tmp.path(), &["gz", "verify", "--max-component", "1"]);
    assert_eq!(code(&o), 0);
    let s = check_run(tmp.path(), "gz-verify");
    assert_eq!(s["result"]["triads"], 1);
    assert_eq!(s["result"]["violations"], 0);

    let o = ncsim(tmp.path(), &["gz", "colour", "-2/3", "1/3", "2/3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = check_run(tmp.path(), "gz-colour");
    assert_eq!(s["result"]["components"], serde_json::json!([2, -1, -2]));
    assert_eq!(s["result"]["colour"], 0);

    assert_eq!(code(&ncsim(tmp.path(), &["gz", "colour", "1", "1", "0"])), 1);
    assert_eq!(code(&ncsim(tmp.path(), &["gz", "colour", "1", "x", "0"])), 2);
    assert_eq!(code(&ncsim(tmp.path(), &["gz", "verify", "--max-component", "0"])), 2);
}

#[test]
fn ck_build_run_and_breakdown() {
    let tmp = tempfile::tempdir().unwrap();
    let targets = manifest("data/qubit-targets.json");
    let state = manifest("data/plus-state.json");
    let built = tmp.path().join("build");
    let o = ncsim(&built, &["ck", "build", "--targets", targets.to_str().unwrap(), "--epsilon", "0.01"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    check_run(&built, "ck-build");
    let model = built.join("model.json");
    assert_valid(&validator("model.schema.json"), &json(&model), "model");

    let run = tmp.path().join("run");
    let args = [
        "ck",
        "run",
        "--targets",
        targets.to_str().unwrap(),
        "--state",
        state.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--shots",
        "500",
    ];
    assert_eq!(code(&ncsim(&run, &args)), 0);
    let s = check_run(&run, "ck-run");
    assert_eq!(s["result"]["targets"][1]["counts"][0], 500);

    let seq = tmp.path().join("seq");
    let povm = manifest("data/qubit-povm.json");
    let args = [
        "ck",
        "run",
        "--targets",
        povm.to_str().unwrap(),
        "--state",
        state.to_str().unwrap(),
        "--shots",
        "200",
        "--sequential",
    ];
    assert_eq!(code(&ncsim(&seq, &args)), 0);
    check_run(&seq, "ck-run");

    let bd = tmp.path().join("breakdown");
    assert_eq!(code(&ncsim(&bd, &["ck", "breakdown", "--model", model.to_str().unwrap(), "--shots", "1000"])), 0);
    check_run(&bd, "ck-breakdown");
}

#[test]
fn lookup_miss_is_a_domain_error() {
    let tmp = tempfile::tempdir().unwrap();
    let model_dir = tmp.path().join("m");
    let z_only = tmp.path().join("z.json");
    let all: Value = json(&manifest("data/qubit-targets.json"));
    fs::write(&z_only, serde_json::to_string(&[&all[0]]).unwrap()).unwrap();
    assert_eq!(code(&ncsim(&model_dir, &["ck", "build", "--targets", z_only.to_str().unwrap()])), 0);
    let (targets, state, model) =
        (manifest("data/qubit-targets.json"), manifest("data/plus-state.json"), model_dir.join("model.json"));
    let args = [
        "ck",
        "run",
        "--targets",
        targets.to_str().unwrap(),
        "--state",
        state.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
    ];
    let o = ncsim(&tmp.path().join("r"), &args);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
}

#[test]
fn malformed_input_reports_position() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, "{\n  \"dim\": 2,\n  \"amplitudes\": [[1, 0],\n}").unwrap();
    let targets = manifest("data/qubit-targets.json");
    let args = ["ck", "run", "--targets", targets.to_str().unwrap(), "--state", bad.to_str().unwrap()];
    let o = ncsim(tmp.path(), &args);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sbz_and_csv_export() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ncsim(tmp.path(), &["sbz", "run", "--interior", "ck", "--rounds", "3000", "--jitter", "1e-4"]);
    assert_eq!(code(&o), 0);
    let s = check_run(tmp.path(), "sbz-run");
    assert_eq!(s["result"]["verdict"]["verdict"], "sbz-contextual");

    let exp = tmp.path().join("exp");
    assert_eq!(code(&ncsim(&exp, &["exp", "phiplus", "--engine", "ck", "--shots", "2000", "--hlzpg-reduced"])), 0);
    check_run(&exp, "exp-phiplus");
    let mut rdr = csv::Reader::from_path(exp.join("frequencies.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["context", "outcome", "label", "count", "frequency", "expected", "quantum"]
    );
    assert_eq!(rdr.records().count(), 8);
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&ncsim(tmp.path(), &["frobnicate"])), 2);
    assert_eq!(code(&ncsim(tmp.path(), &["ck", "build"])), 2);
    assert_eq!(code(&ncsim(tmp.path(), &["ks", "search", "no-such-entry"])), 2);
    assert_eq!(code(&ncsim(tmp.path(), &["--tol", "-1", "gz", "verify", "--max-component", "2"])), 2);
}

#[test]
fn same_seed_gives_byte_identical_summaries() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let args = ["exp", "phiplus", "--engine", "ck", "--shots", "100000", "--seed", "7"];
    assert_eq!(code(&ncsim(&a, &args)), 0);
    assert_eq!(code(&ncsim(&b, &args)), 0);
    for f in ["summary.json", "run.jsonl", "frequencies.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let c = tmp.path().join("c");
    assert_eq!(code(&ncsim(&c, &["exp", "phiplus", "--engine", "ck", "--shots", "100000", "--seed", "8"])), 0);
    assert_ne!(fs::read(a.join("run.jsonl")).unwrap(), fs::read(c.join("run.jsonl")).unwrap());
}

#[test]
fn replay_accepts_fresh_logs_and_rejects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert_eq!(code(&ncsim(&run, &["sbz", "run", "--interior", "toy", "--rounds", "500", "--seed", "4"])), 0);
    let log = run.join("run.jsonl");
    let log_arg = log.to_str().unwrap();
    let o = ncsim(tmp.path(), &["replay", log_arg]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    for flag in [["--tol", "1e-6"], ["--seed", "5"], ["--shots", "10"]] {
        let o = ncsim(tmp.path(), &["replay", log_arg, flag[0], flag[1]]);
        assert_ne!(code(&o), 0, "override {flag:?} must be refused");
    }

    let text = fs::read_to_string(&log).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let original = lines[7].clone();
    lines[7] = original.replacen("\"bits\":[0", "\"bits\":[1", 1).replacen("\"bits\":[1,", "\"bits\":[0,", 1);
    assert_ne!(lines[7], original);
    fs::write(&log, lines.join("\n") + "\n").unwrap();
    let o = ncsim(tmp.path(), &["replay", log_arg]);
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["first_divergence"]["line"], 8);

    fs::write(&log, text.replacen("\"format_version\":1", "\"format_version\":99", 1)).unwrap();
    let o = ncsim(tmp.path(), &["replay", log_arg]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("version"));
}
