use std::path::Path;
use std::process::{Command, Output};

use ftmbar::QMatrix;

fn ftmbar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftmbar")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = ftmbar(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn first_line(args: &[&str]) -> String {
    stdout(args).lines().next().unwrap_or_default().to_string()
}

fn golden(name: &str) -> QMatrix {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/golden").join(name);
    QMatrix::from_csv(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn graph_counts() {
    assert_eq!(first_line(&["graphs", "1", "4", "--edges", "2"]), "9");
    assert_eq!(first_line(&["graphs", "1", "4", "--edges", "1"]), "4");
    assert_eq!(first_line(&["graphs", "0", "3", "--edges", "0"]), "1");
    let text = stdout(&["graphs", "1", "4", "--edges", "2"]);
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn graphs_as_json() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&["graphs", "1", "2", "--edges", "1", "--labeled", "--format", "json"])).unwrap();
    assert_eq!(v["count"], v["graphs"].as_array().unwrap().len());
    assert_eq!(v["labeled"], true);
}

#[test]
fn betti_numbers() {
    assert_eq!(stdout(&["betti", "1", "4", "2"]).trim(), "12");
    assert_eq!(stdout(&["betti", "1", "4", "4"]).trim(), "23");
    assert_eq!(stdout(&["betti", "0", "4", "0"]).trim(), "1");
}

#[test]
fn ft_row_dims() {
    let text = stdout(&["ft", "1", "4", "--row", "4"]);
    let dims: Vec<&str> = text.lines().skip(1).take_while(|l| !l.starts_with('#')).collect();
    assert_eq!(dims, vec!["0,4,23", "1,4,60", "2,4,36"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&["ft", "1", "4", "--row", "2", "--format", "json"])).unwrap();
    let dims: Vec<u64> = v["bidegrees"].as_array().unwrap().iter().map(|b| b["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![12, 60, 91, 46]);
}

#[test]
fn qcomplex_tables_equal_golden_files() {
    let t1 = QMatrix::from_csv(&stdout(&["qcomplex", "--table", "q6q5"])).unwrap();
    let t2 = QMatrix::from_csv(&stdout(&["qcomplex", "--table", "q5q4"])).unwrap();
    assert_eq!(t1, golden("q6_q5.csv"));
    assert_eq!(t2, golden("q5_q4_transpose.csv"));
    // Both at once, separated by comment lines.
    let both = stdout(&["qcomplex"]);
    assert_eq!(both.lines().filter(|l| l.starts_with('#')).count(), 2);
    assert_eq!(both.lines().filter(|l| !l.starts_with('#')).count(), 13);
}

#[test]
fn verify_single_check_passes() {
    let out = ftmbar(&["verify", "--check", "normlem"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS  normlem"));
}

#[test]
fn verify_everything_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = ftmbar(&["verify", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), stdout(&["verify", "--list"]).lines().count());
    for c in checks {
        assert_eq!(c["status"], "pass", "{c}");
        for key in ["check", "residue", "millis"] {
            assert!(c.get(key).is_some());
        }
    }
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["verify", "--check", "no_such_check"][..],
        &["betti", "2", "1", "0"],
        &["ft", "1", "5"],
        &["ft", "1", "4", "--row", "3"],
        &["graphs", "1", "4", "--bogus"],
        &["graphs", "0", "2"],
    ] {
        assert_eq!(ftmbar(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    for args in [&["ft", "1", "3", "--format", "json"][..], &["verify"], &["graphs", "1", "3", "--edges", "2", "--labeled"]] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}
