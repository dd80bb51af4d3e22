use frobstrat::cli::{run, RunOutput, EXIT_INVALID, EXIT_OK};
use serde_json::Value;

const EXAMPLE: &str = r#"{"p":3,"m":1,"g":2,"f":[-1,-1,-1,-1,-1]}"#;

fn cli(args: &[&str]) -> RunOutput {
    run(std::iter::once("frobstrat").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = vec!["--json"];
    a.extend_from_slice(args);
    let out = cli(&a);
    let v: Value = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
    (out.code, v)
}

fn statuses(doc: &Value) -> Vec<String> {
    doc["checks"].as_array().unwrap().iter().map(|c| c["status"].as_str().unwrap().to_string()).collect()
}

#[test]
fn info_on_the_example_curve() {
    let (code, doc) = json(&["info", "--curve", EXAMPLE]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["command"], "info");
    assert_eq!(doc["results"]["genus"], 2);
    assert_eq!(doc["results"]["smooth"], true);
    assert_eq!(doc["results"]["hasse_witt"]["p_rank"], 1);
    assert!(statuses(&doc).iter().all(|s| s == "PASS"));
    for key in ["command", "curve", "results", "checks"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn line_bundle_example() {
    let (code, doc) = json(&["line-bundle", "--curve", r#"{"p":3,"m":1,"g":2,"f":[1,1,0,1,-1]}"#]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["results"]["h1_str"], 0);
}

#[test]
fn singular_input_is_rejected() {
    let (code, doc) = json(&["info", "--curve", r#"{"p":3,"m":1,"g":2,"f":[0,1,1,1,1]}"#]);
    assert_eq!(code, EXIT_INVALID);
    assert_eq!(doc["error"]["kind"], "NotSmooth");
    let out = cli(&["info", "--curve", r#"{"p":3,"m":1,"g":2,"f":[0,1,1,1,1]}"#]);
    assert_eq!(out.code, EXIT_INVALID);
    assert!(out.stderr.contains("NotSmooth"));
}

#[test]
fn malformed_input_reports_a_position() {
    let out = cli(&["info", "--curve", r#"{"p":3,"g":2,"f":[1,2,}"#]);
    assert_eq!(out.code, EXIT_INVALID);
    assert!(out.stderr.contains("column"), "{}", out.stderr);
    assert_eq!(cli(&["frobnicate"]).code, EXIT_INVALID);
    assert_eq!(cli(&["info", "--curve", EXAMPLE, "--curve-file", "x.json"]).code, EXIT_INVALID);
    assert_eq!(cli(&["--p", "4", "appendix"]).code, EXIT_INVALID);
    assert_eq!(cli(&["--tower-depth", "99", "tower", "--curve", EXAMPLE]).code, EXIT_INVALID);
    assert_eq!(cli(&["scan", "--p", "3", "--range", "2:1"]).code, EXIT_INVALID);
    assert_eq!(cli(&["--help"]).code, EXIT_OK);
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    for args in [
        vec!["--json", "info", "--curve", EXAMPLE],
        vec!["--json", "tower", "--curve", EXAMPLE],
        vec!["--json", "scan", "--p", "3", "--genus", "2", "--threads", "3"],
    ] {
        let a = cli(&args);
        let b = cli(&args);
        assert_eq!(a.code, EXIT_OK);
        assert_eq!(a.stdout, b.stdout);
    }
    let one = cli(&["--json", "scan", "--p", "3", "--genus", "2", "--threads", "1"]);
    let many = cli(&["--json", "scan", "--p", "3", "--genus", "2", "--threads", "5"]);
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn tower_and_nilpotency_commands() {
    let (code, doc) = json(&["--tower-depth", "4", "nilpotency", "--curve", EXAMPLE]);
    assert_eq!(code, EXIT_OK, "{doc}");
    assert!(statuses(&doc).iter().all(|s| s == "PASS"));
    let (code, doc) = json(&["h1str", "--level", "2", "--curve", EXAMPLE]);
    assert_eq!(code, EXIT_OK, "{doc}");
    let (code, _) = json(&["tower", "--curve", r#"{"p":3,"m":1,"g":2,"f":[1,1,0,1,-1]}"#]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn appendix_default_run() {
    let (code, doc) = json(&["appendix"]);
    assert_eq!(code, EXIT_OK);
    let s = statuses(&doc);
    assert!(!s.iter().any(|s| s == "FAIL"));
    assert_eq!(s.iter().filter(|s| *s == "SKIPPED").count(), 2);
}

#[test]
fn appendix_with_deeper_tower() {
    let (code, doc) = json(&["--tower-depth", "5", "appendix"]);
    assert_eq!(code, EXIT_OK);
    let ids: Vec<&str> = doc["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    for n in 1..=5 {
        assert!(ids.iter().any(|id| id.starts_with(&format!("E{n}: nilpotency order at least"))), "E{n}");
    }
}

#[test]
fn appendix_in_characteristic_five() {
    let (code, doc) = json(&["--p", "5", "appendix"]);
    assert_eq!(code, EXIT_OK);
    let checks = doc["checks"].as_array().unwrap();
    for c in checks {
        let id = c["id"].as_str().unwrap();
        let status = c["status"].as_str().unwrap();
        if id.contains("pairing") || id.contains("<Fe, μ>") {
            assert_eq!(status, "PASS", "{id}");
        }
        assert_ne!(status, "FAIL", "{id}");
    }
    assert!(checks.iter().any(|c| c["status"] == "NOT-APPLICABLE"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_frobstrat");
    let ok = std::process::Command::new(bin).args(["info", "--curve", EXAMPLE]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("genus 2"));
    let bad = std::process::Command::new(bin)
        .args(["info", "--curve", r#"{"p":3,"m":1,"g":2,"f":[0,-1,-1,-1,-1]}"#])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INVALID));
}
