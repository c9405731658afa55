use std::process::{Command, Output};

use kohnen::eisenstein::QExpansion;

fn kohnen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kohnen")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SQRT10_TRIVIAL: &str = "\
# G_{5/2}(z, chi_0) (trace <= 14, scaled by 60)
0\t1577
1\t70
2\t264
4\t3850
5\t3144
6\t8640
7-2√10\t744
7+2√10\t744
";

#[test]
fn sqrt10_table_through_the_binary() {
    let o = kohnen(&["eisenstein", "--field", "40", "--kappa", "2", "--chi", "0", "--trace-bound", "14", "--scale", "60", "--format", "table"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), SQRT10_TRIVIAL);

    let o = kohnen(&["eisenstein", "--field", "40", "--kappa", "2", "--chi", "1", "--trace-bound", "14", "--scale", "60"]);
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(String::from).collect();
    assert_eq!(
        rows,
        ["0\t1577", "1\t24", "2\t490", "4\t2184", "5\t8470", "6\t8160", "7-2√10\t1750", "7+2√10\t1750"]
    );
}

#[test]
fn cohen_example() {
    let o = kohnen(&["cohen", "--r", "2", "--n-max", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let vals: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split('\t').nth(1).unwrap().to_string()).collect();
    assert_eq!(vals, ["1/120", "-1/12", "0", "0", "-7/12", "-2/5"]);
}

#[test]
fn output_is_deterministic() {
    let args = ["eisenstein", "--field", "5", "--kappa", "3", "--trace-bound", "12", "--format", "json"];
    assert_eq!(kohnen(&args).stdout, kohnen(&args).stdout);
    let args = ["classgroup", "--field", "316"];
    assert_eq!(kohnen(&args).stdout, kohnen(&args).stdout);
}

#[test]
fn json_round_trip() {
    // complex class characters give cyclotomic values
    for (field, chi) in [("40", "1"), ("316", "1")] {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        let o = kohnen(&[
            "eisenstein", "--field", field, "--kappa", "2", "--chi", chi, "--trace-bound", "8", "--scale", "60",
            "--format", "json", "--output", path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
        let text = std::fs::read_to_string(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let q = QExpansion::from_json(&v).unwrap();
        assert_eq!(q.to_json(60), v);
        let mut again = serde_json::to_string_pretty(&q.to_json(60)).unwrap();
        again.push('\n');
        assert_eq!(again, text);
    }
}

#[test]
fn bad_arguments_exit_2() {
    let cases: &[&[&str]] = &[
        &["eisenstein", "--field", "40", "--kappa", "2"],
        &["eisenstein", "--field", "10", "--kappa", "2", "--trace-bound", "5"],
        &["eisenstein", "--field", "-4", "--kappa", "2", "--trace-bound", "5"],
        &["eisenstein", "--field", "40", "--kappa", "2", "--chi", "2", "--trace-bound", "5"],
        &["eisenstein", "--field", "40", "--kappa", "0", "--trace-bound", "5"],
        &["eisenstein", "--field", "40", "--kappa", "2", "--trace-bound", "5", "--scale", "0"],
        &["eisenstein", "--field", "40", "--kappa", "2", "--trace-bound", "5", "--format", "xml"],
        &["hecke", "--field", "40", "--kappa", "2", "--alpha", "1/2", "--trace-bound", "3"],
        &["verify", "everything"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = kohnen(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn weight_three_halves_over_q_exits_3() {
    let o = kohnen(&["eisenstein", "--field", "1", "--kappa", "1", "--trace-bound", "10"]);
    assert_eq!(o.status.code(), Some(3));
    // the same weight is fine over a real quadratic field
    let o = kohnen(&["eisenstein", "--field", "40", "--kappa", "1", "--trace-bound", "6"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn field_and_lvalue_queries() {
    let o = kohnen(&["field", "--field", "40", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["fundamental_unit"], "3+√10");
    assert_eq!(v["unit_norm"], -1);

    let o = kohnen(&["lvalue", "--field", "40", "--kappa", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exact"], "1577/60");

    let o = kohnen(&["lvalue", "--field", "1", "--kappa", "2", "--twist", "5", "--numeric-terms", "10000"]);
    let s = stdout(&o);
    assert!(s.starts_with("L(1-2, chi_0·(5/.)) over Q = -2/5\n"), "{s}");
    assert!(s.contains("agrees"), "{s}");
}

#[test]
fn hecke_reports_the_eigenvalue() {
    let o = kohnen(&["hecke", "--field", "1", "--kappa", "2", "--alpha", "3", "--trace-bound", "8", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["eigenvalue"], "28");
    assert_eq!(v["predicted_eigenvalue"], "28");
}

#[test]
fn verify_subset_passes() {
    let o = kohnen(&["verify", "paper-example", "--only", "1,2,9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.contains("PASS")).count(), 3);
}

#[test]
fn help_exits_0() {
    let o = kohnen(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("eisenstein"));
}
