use std::path::Path;
use std::process::{Command, Output};

use gwis::data::{DataFiles, EQUATIONS_FILE};

fn gwis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn canon_plain() {
    let o = gwis(&["canon", "<j a b><x b a><i^1>_2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "<x d1 d2><j d1 d2><i^1>_2\n");
}

#[test]
fn canon_reads_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.gwis");
    std::fs::write(&path, "2*<x nu mu><mu nu^1>_2 - <x a b><a b^1>_2\n").unwrap();
    let o = gwis(&[
        "canon",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "latex",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "\\< \\partial^x \\partial^{d1} \\partial^{d2} \\> \\< \\partial^{d1} \\partial^{d2}_1 \\>_2\n"
    );
}

#[test]
fn parse_defaults_to_json() {
    let o = gwis(&["parse", "--input", "-1/2*<x^3>_3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["terms"][0]["scalar"]["const"], "-1/2");
    assert_eq!(v["terms"][0]["correlators"][0]["genus"], 3);
    assert_eq!(v["terms"][0]["correlators"][0]["insertions"][0]["psi"], 3);
}

#[test]
fn syntax_error_goes_to_stderr() {
    let o = gwis(&["parse", "<x"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    assert!(!stderr(&o).is_empty());
}

#[test]
fn verify_json_is_stable_and_reports_residuals() {
    let a = gwis(&["verify", "--format", "json"]);
    let b = gwis(&["verify", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["equations"], 49);
    assert_eq!(v["residuals"].as_object().unwrap().len(), 49);
    let pass = v["pass"].as_bool().unwrap();
    assert_eq!(a.status.code(), Some(if pass { 0 } else { 1 }));
}

#[test]
fn solve_json_keys_in_index_order() {
    let o = gwis(&["solve", "--format", "json"]);
    match o.status.code() {
        Some(0) => {
            let text = stdout(&o);
            let keys: Vec<&str> = text
                .lines()
                .filter_map(|l| l.trim().strip_prefix('"'))
                .map(|l| l.split('"').next().unwrap())
                .collect();
            let expected: Vec<String> = (1..=30).map(|k| format!("c{k}")).collect();
            assert_eq!(keys, expected);
        }
        Some(1) => assert!(stderr(&o).contains("solve failed")),
        other => panic!("unexpected exit {other:?}"),
    }
}

#[test]
fn emit_json_from_table() {
    let o = gwis(&["emit", "--use-table", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rhs"].as_array().unwrap().len(), 29);
    assert_eq!(v["rhs"][28]["coefficient"], "1/53760");
    assert_eq!(v["sign_flips"].as_array().unwrap().len(), 14);
}

fn write_data(dir: &Path, equations: &str) {
    std::fs::write(dir.join(EQUATIONS_FILE), equations).unwrap();
}

#[test]
fn truncated_equation_file_is_a_data_error() {
    let mut eqs: Vec<serde_json::Value> =
        serde_json::from_str(&DataFiles::embedded().equations).unwrap();
    eqs.remove(10);
    let dir = tempfile::tempdir().unwrap();
    write_data(dir.path(), &serde_json::to_string(&eqs).unwrap());
    let o = gwis(&["verify", "--data-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("expected 49 equations, found 48"));
}

#[test]
fn data_dir_without_overrides_matches_embedded() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(
        gwis(&["rank", "--data-dir", d]).stdout,
        gwis(&["rank"]).stdout
    );
}
