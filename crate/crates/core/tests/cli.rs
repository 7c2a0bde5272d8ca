//! End-to-end runs of the `bjweyl` binary.

use std::path::Path;
use std::process::{Command, Output};

use bjweyl::cli::{parse_table, Cell, SCHEMA_LINE};

const SMALL: &str = r#"
seed = 3
n = 30
[family]
name = "random"
d = 2
len = 30
[grid]
lambda_min = -1.0
lambda_max = 1.0
lambda_steps = 5
eps = [0.3, 0.1]
jl_eps = [0.1, 0.05]
z = [[0.0, 1.0]]
t_max = 200.0
t_steps = 20
k_max = 4
n_list = [5, 10]
"#;

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_bjweyl")).arg("--config").arg(&path).args(args).output().unwrap()
}

fn column(out: &Output, name: &str) -> Vec<Cell> {
    let t = parse_table(&String::from_utf8_lossy(&out.stdout)).unwrap();
    let i = t.column(name).unwrap_or_else(|| panic!("no column {name}"));
    t.rows.iter().map(|r| r[i].clone()).collect()
}

#[test]
fn every_command_runs_on_a_small_config() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [
        "validate",
        "polys",
        "transfer-check",
        "weyl",
        "weyl-scan",
        "measure",
        "cauchy-check",
        "jl",
        "nonsub",
        "report",
    ] {
        let out = run(dir.path(), SMALL, &["--command", cmd]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with(SCHEMA_LINE), "{cmd}");
        let table = parse_table(&text).unwrap();
        assert!(!table.rows.is_empty(), "{cmd}");
        assert_eq!(table.error_count(), 0, "{cmd}");
    }
}

#[test]
fn json_and_csv_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let csv = run(dir.path(), SMALL, &["--command", "weyl"]);
    let json = run(dir.path(), SMALL, &["--command", "weyl", "--format", "json"]);
    assert!(String::from_utf8_lossy(&json.stdout).trim_start().starts_with('['));
    assert_eq!(column(&csv, "w_00_im"), column(&json, "w_00_im"));
}

#[test]
fn output_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("scan.csv");
    let out = run(
        dir.path(),
        SMALL,
        &[
            "--command",
            "weyl-scan",
            "--out",
            target.to_str().unwrap(),
            "--lambda-min",
            "-0.5",
            "--lambda-max",
            "0.5",
            "--lambda-steps",
            "3",
            "--eps-ladder",
            "0.2,0.1",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let table = parse_table(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let lam = table.column("lambda").unwrap();
    let mut lambdas: Vec<f64> =
        table.rows.iter().filter_map(|r| if let Cell::Num(x) = r[lam] { Some(x) } else { None }).collect();
    lambdas.dedup();
    assert_eq!(lambdas, vec![-0.5, 0.0, 0.5]);
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        "bogus_key = 1\n",
        "[family]\nname = \"no_such_family\"\n",
        "[family]\nname = \"free\"\nd = 0\n",
        "command = \"nope\"\n",
        "[family]\nname = \"explicit\"\na_list = [[[0.0]]]\nb_list = [[[0.0]]]\n",
        "[grid]\neps = [0.01, 0.1]\n",
        "this is not toml",
    ] {
        let out = run(dir.path(), bad, &[]);
        assert_eq!(out.status.code(), Some(1), "config {bad:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
    let out = run(dir.path(), "", &["--format", "xml"]);
    assert_eq!(out.status.code(), Some(1));
    let missing =
        Command::new(env!("CARGO_BIN_EXE_bjweyl")).args(["--config", "/nonexistent/run.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn all_rows_failing_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "command = \"weyl\"\nn = 1\n[family]\nname = \"free\"\nd = 1\n[grid]\nz = [[0.0, 0.0]]\n";
    let out = run(dir.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    let errors = column(&out, "error");
    assert!(errors.iter().all(|c| matches!(c, Cell::Text(s) if !s.is_empty())));
}

#[test]
fn default_run_reports_validation() {
    let out = Command::new(env!("CARGO_BIN_EXE_bjweyl")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with(SCHEMA_LINE));
}
