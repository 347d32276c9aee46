use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn vacohom(dir: &Path, args: &[&str]) -> (i32, Value) {
    let out = dir.join("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_vacohom")).args(args).arg("--output").arg(&out).current_dir(dir).output().expect("binary runs");
    let report = serde_json::from_str(&std::fs::read_to_string(&out).expect("report written")).expect("report is JSON");
    (status.status.code().expect("exit code"), report)
}

fn strip_times(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("seconds");
            m.values_mut().for_each(strip_times);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_times),
        _ => {}
    }
}

#[test]
fn sewing_violation_exits_one_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "name = \"too wide\"\nr1 = \"1\"\nr2 = \"1/2\"\nepsilon = \"3/4\"\nx = [\"2\"]\ny = [\"3\"]\n").unwrap();
    let (code, report) = vacohom(dir.path(), &["sew-validate", "bad.toml"]);
    assert_eq!(code, 1);
    assert_eq!(report["passed"], false);
    let text = report["suites"][0]["failures"].to_string();
    assert!(text.contains("|ε| ≤ r1 r2"), "{text}");
}

#[test]
fn valid_sewing_file_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("ok.toml"),
        "name = \"fine\"\nr1 = \"1\"\nr2 = \"1\"\nepsilon = \"1/100\"\nx = [\"1/2\"]\ny = [\"3/10\"]\nprobes = [\"1/10\"]\n",
    )
    .unwrap();
    let (code, report) = vacohom(dir.path(), &["sew-validate", "ok.toml"]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["schema"], "vacohom-report/1");
}

#[test]
fn complex_check_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["check-complex", "--cutoff", "2", "--seed", "7", "--cochains", "3"];
    let (code, mut first) = vacohom(dir.path(), &args);
    assert_eq!(code, 0, "{first}");
    assert_eq!(first["suites"][0]["details"]["runs"].as_array().unwrap().len(), 3);
    let (_, mut second) = vacohom(dir.path(), &args);
    strip_times(&mut first);
    strip_times(&mut second);
    assert_eq!(first, second);
}

#[test]
fn leibniz_at_order_zero_checks_one_coefficient_per_tuple() {
    let dir = tempfile::tempdir().unwrap();
    let (code, report) = vacohom(dir.path(), &["check-leibniz", "--order", "0", "--pairs", "3", "--cutoff", "1"]);
    let leibniz = &report["suites"][0];
    assert_eq!(leibniz["details"]["order"], 0);
    assert_eq!(code == 0, report["passed"] == true);
    for run in leibniz["details"]["runs"].as_array().unwrap() {
        let n = run["pair"].as_str().unwrap();
        let tuples = if n.starts_with("(1, 2) x (0, 3)") || n.ends_with("r = 1") { 4 } else { 8 };
        assert_eq!(run["coefficients"], tuples, "{n}");
    }
}

#[test]
fn config_errors_exit_two_with_a_report() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "cutoff = \"four\"\n").unwrap();
    let (code, report) = vacohom(dir.path(), &["check-complex", "--config", "run.toml"]);
    assert_eq!(code, 2);
    assert!(report["error"].as_str().unwrap().contains("run.toml"));
    let (code, _) = vacohom(dir.path(), &["cohomology", "--n", "1", "--m", "1/2"]);
    assert_eq!(code, 2);
    let (code, _) = vacohom(dir.path(), &["check-complex", "--cutoff", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn config_file_supplies_settings() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "cutoff = 1\nseed = 3\ncochains = 2\n").unwrap();
    let (code, report) = vacohom(dir.path(), &["check-complex", "--config", "run.toml"]);
    assert_eq!(code, 0);
    assert_eq!(report["settings"]["seed"], 3);
    assert_eq!(report["suites"][0]["details"]["input_cutoff"], 1);
}
