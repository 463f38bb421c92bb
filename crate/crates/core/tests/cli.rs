use std::process::{Command, Output};

fn quditbv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quditbv"))
        .args(args)
        .env_remove("QUDITBV_AMPLITUDE_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn run_both_json() {
    let out = quditbv(&[
        "run", "--d", "3", "--n", "2", "--secret", "1,2", "--mode", "both",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["mode"], "quantum");
    assert_eq!(rows[0]["oracle_queries"], 1);
    assert_eq!(rows[1]["mode"], "classical");
    assert_eq!(rows[1]["oracle_queries"], 2);
    assert_eq!(rows[1]["peak_probability"], 1.0);
    for row in rows {
        assert_eq!(row["secret"], serde_json::json!([1, 2]));
        assert_eq!(row["recovered"], serde_json::json!([1, 2]));
        assert_eq!(row["seed"], 0);
    }
}

#[test]
fn large_dimension_renders_digits_as_integers() {
    let out = quditbv(&["run", "--d", "12", "--n", "3", "--secret", "11,10,0"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows[0]["recovered"], serde_json::json!([11, 10, 0]));
}

#[test]
fn csv_output() {
    let out = quditbv(&[
        "run",
        "--d",
        "2",
        "--n",
        "3",
        "--secret",
        "1,0,1",
        "--format",
        "csv",
        "--mode",
        "classical",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "mode,d,n,secret,recovered,oracle_queries,peak_probability,seed\nclassical,2,3,1-0-1,1-0-1,3,1,0\n"
    );
}

#[test]
fn seeded_secret_is_reproducible() {
    let a = quditbv(&["run", "--d", "2", "--n", "3", "--seed", "7"]);
    let b = quditbv(&["run", "--d", "2", "--n", "3", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["run", "--d", "3", "--n", "2", "--secret", "1,3"],
        vec!["run", "--d", "3", "--n", "2", "--unknown"],
        vec!["run", "--d", "3"],
        vec![],
    ] {
        let out = quditbv(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn capacity_error_exit_3() {
    let out = quditbv(&["run", "--d", "2", "--n", "24"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("capacity"));
}

#[test]
fn budget_override_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_quditbv"))
        .args(["run", "--d", "3", "--n", "2"])
        .env("QUDITBV_AMPLITUDE_BUDGET", "26")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = Command::new(env!("CARGO_BIN_EXE_quditbv"))
        .args(["run", "--d", "3", "--n", "2"])
        .env("QUDITBV_AMPLITUDE_BUDGET", "27")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let out = Command::new(env!("CARGO_BIN_EXE_quditbv"))
        .args(["run", "--d", "3", "--n", "2"])
        .env("QUDITBV_AMPLITUDE_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_text_table() {
    let out = quditbv(&["sweep", "--d", "2-3", "--n", "1-3", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    for line in &lines[1..] {
        let cols: Vec<_> = line.split_whitespace().collect();
        assert_eq!(cols[2], "1");
        assert_eq!(cols[3], cols[1]);
    }
}

#[test]
fn selfcheck_passes() {
    let out = quditbv(&["selfcheck"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.lines().count() >= 14);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));

    let out = quditbv(&["selfcheck", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rows.as_array().unwrap().iter().all(|r| r["passed"] == true));
}

#[test]
fn help_exits_zero() {
    let out = quditbv(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("selfcheck"));
}
