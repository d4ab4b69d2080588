use std::path::Path;
use std::process::{Command, Output};

fn domlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn gen_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let p = path.to_str().unwrap();
    let o = domlab(&["gen", "--n", "4", "--p", "0.5", "--seed", "42", "--out", p]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "4 3\n0 3\n1 3\n2 3\n");

    let o = domlab(&["solve", p, "--k", "1", "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], ["4", "1", "1", "0"]);
    assert_eq!(row[5], "UNIQUE_DOM");

    let o = domlab(&["solve", p, "--k", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["classification"]["class"], "UNIQUE_DOM");
    assert_eq!(v["classification"]["set"], serde_json::json!([3]));
}

#[test]
fn gen_is_reproducible_on_stdout() {
    let a = domlab(&["gen", "--n", "30", "--p", "0.3", "--seed", "7", "--stream", "2"]);
    let b = domlab(&["gen", "--n", "30", "--p", "0.3", "--seed", "7", "--stream", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn moments_and_calibrate() {
    let o = domlab(&["moments", "--n", "20", "--k", "3", "--p", "0.3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["e_x"]["log"].is_f64());

    let o = domlab(&["calibrate", "--n", "100", "--delta", "0.3", "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "5");
    let e_x: f64 = row[4].parse().unwrap();
    assert!((e_x - 0.3).abs() <= 1e-9 * 0.3);
}

#[test]
fn map_on_corpus_instance() {
    let dir = tempfile::tempdir().unwrap();
    let after = dir.path().join("after.txt");
    let o = domlab(&[
        "map",
        &corpus("forward_unique_pair_n8.txt"),
        "--k",
        "2",
        "--h",
        "1",
        "--out",
        after.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cert: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["direction"], "FORWARD");
    assert_eq!(cert["flipped"], true);
    let o = domlab(&["solve", after.to_str().unwrap(), "--k", "2", "--format", "csv"]);
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",0,"));
}

#[test]
fn map_without_applicable_swap_is_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k5.txt");
    std::fs::write(&path, "5 10\n0 1\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n").unwrap();
    let o = domlab(&["map", path.to_str().unwrap(), "--k", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["certificate"].is_null());
}

#[test]
fn experiments_write_reports_and_rerun_identically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = domlab(&[
            "irreducibility", "--n", "20", "--k", "3", "--trials", "200", "--seed", "3",
            "--out", dir.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).contains("[PASS] forward_degree_preserved"));
    }
    for name in [
        "irreducibility_trials.csv",
        "irreducibility_certificates.jsonl",
        "irreducibility_summary.json",
    ] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }

    let o = domlab(&["sandwich", "--n", "14", "--k", "2", "--trials", "100", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 101);
}

#[test]
fn audit_passes_and_reports_rows() {
    let o = domlab(&["audit", "--n-max", "4", "--p", "0.3,0.6", "--extra", "5:2:0.4", "--format", "csv"]);
    assert!(o.status.success());
    // 10 (n, k) pairs times 2 p values, one extra point, one header
    assert_eq!(stdout(&o).lines().count(), 22);
}

#[test]
fn bad_input_exits_nonzero() {
    assert!(!domlab(&["solve", "/definitely/not/here"]).status.success());
    assert!(!domlab(&["gen", "--n", "5", "--p", "2"]).status.success());
    assert!(!domlab(&["sandwich", "--n", "10", "--k", "10"]).status.success());
    assert!(!domlab(&["audit", "--extra", "oops"]).status.success());
}
