use std::process::Command as Process;

use slidewin::ProblemCase;
use slidewin_cli::{
    run, AsymptoticResult, CliError, Command, OptimizeResult, OracleResult, OutputFormat, Report, SimulateResult,
    SolveResult, TableResult,
};

fn run_ok(args: &[&str]) -> String {
    let mut out = Vec::new();
    let argv = std::iter::once("slidewin").chain(args.iter().copied());
    run(argv, &mut out).unwrap_or_else(|e| panic!("{args:?} failed: {e}"));
    String::from_utf8(out).unwrap()
}

fn run_err(args: &[&str]) -> CliError {
    let mut out = Vec::new();
    let argv = std::iter::once("slidewin").chain(args.iter().copied());
    run(argv, &mut out).expect_err("command should fail")
}

fn binary(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_slidewin")).args(args).output().unwrap()
}

#[test]
fn solve_examples() {
    let json = run_ok(&["solve", "--case", "best1", "--n", "6", "--k", "2", "--d", "1", "--format", "json"]);
    let report: Report<SolveResult> = serde_json::from_str(&json).unwrap();
    assert_eq!(report.config.command, Command::Solve);
    assert_eq!(report.result.thresholds, vec![1]);
    assert!((report.result.p_win - 404.0 / 720.0).abs() < 1e-12);

    let text = run_ok(&["solve", "--case", "best2", "--n", "4", "--k", "2", "--d1", "1", "--d2", "1"]);
    assert!(text.contains("p_win = 0.9167"), "{text}");
    let text = run_ok(&["solve", "--case", "best1", "--n", "5", "--k", "5", "--d", "0"]);
    assert!(text.contains("p_win = 1.0000"), "{text}");
}

#[test]
fn oracle_and_simulate_examples() {
    assert_eq!(run_ok(&["oracle", "--case", "best1", "--n", "6", "--k", "2", "--d", "1"]), "404/720 = 0.561111\n");

    let args = ["simulate", "--case", "twochoice", "--n", "10", "--k", "5", "--d1", "0", "--d2", "5"];
    let json = run_ok(&[&args[..], &["--trials", "1000", "--seed", "7", "--format", "json"]].concat());
    let report: Report<SimulateResult> = serde_json::from_str(&json).unwrap();
    assert_eq!(report.result.estimate.p_hat, 1.0);
    assert_eq!(report.result.estimate.wins, 1000);
    assert_eq!(json, run_ok(&[&args[..], &["--trials", "1000", "--seed", "7", "--format", "json"]].concat()));
}

#[test]
fn json_round_trips() {
    let json = run_ok(&["oracle", "--case", "best2", "--n", "5", "--k", "2", "--d1", "1", "--d2", "2", "--format", "json"]);
    let report: Report<OracleResult> = serde_json::from_str(&json).unwrap();
    assert_eq!(report.result.exact.to_f64(), 0.8833333333333333);
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", json);

    let json = run_ok(&["optimize", "--case", "best1", "--n", "10", "--k", "5", "--format", "json"]);
    let report: Report<OptimizeResult> = serde_json::from_str(&json).unwrap();
    assert_eq!(report.result.best_policies.len(), 2);

    let json = run_ok(&["asymptotic", "--case", "best1", "--w", "0.2,0.5", "--format", "json"]);
    let report: Report<AsymptoticResult> = serde_json::from_str(&json).unwrap();
    assert_eq!(report.config.w_grid.as_deref(), Some(&[0.2, 0.5][..]));
    assert!((report.result.points[0].rho_star[0] - 0.2635).abs() < 2e-3);

    let json = run_ok(&["table", "--case", "twochoice", "--n-min", "4", "--n-max", "5", "--format", "json"]);
    let report: Report<TableResult> = serde_json::from_str(&json).unwrap();
    assert_eq!(report.config.output_format, OutputFormat::Json);
    assert_eq!(report.result.case, ProblemCase::TwoChoice);
}

#[test]
fn csv_layout() {
    let csv = run_ok(&["solve", "--case", "best1", "--n", "6", "--k", "2", "--d", "1", "--format", "csv"]);
    assert_eq!(csv, "n,k,case,thresholds,p_win\n6,2,best1,1,0.5611\n");
    let csv = run_ok(&["asymptotic", "--case", "best1", "--w", "0.5", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("case,w,rho1,rho2,p_win"));
    assert!(lines.next().unwrap().starts_with("best1,0.5000,0.0000,,"));
    assert!(!csv.contains('\r'));
}

#[test]
fn twochoice_table_saturates() {
    let csv = run_ok(&["table", "--case", "twochoice", "--n-min", "4", "--n-max", "10"]);
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (n, k): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        if 2 * k >= n {
            assert_eq!(f[3], "1.0000", "{line}");
        }
    }
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# Best-1 example\ncase = best1\nn = 6\nk = 2\nd = 1\nformat = csv\n").unwrap();
    let path = path.to_str().unwrap();
    assert_eq!(run_ok(&["solve", "--config", path]), "n,k,case,thresholds,p_win\n6,2,best1,1,0.5611\n");
    let csv = run_ok(&["solve", "--config", path, "--k", "3", "--d", "0"]);
    assert_eq!(csv, "n,k,case,thresholds,p_win\n6,3,best1,0,0.7167\n");
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let stdout = run_ok(&["optimize", "--case", "best1", "--n", "10", "--k", "5", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert!(stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), "n,k,case,thresholds,p_win\n10,5,best1,0;1,0.7544\n");
}

#[test]
fn check_oracle_attaches_exact_value() {
    let args = ["solve", "--case", "twochoice", "--n", "7", "--k", "2", "--d1", "1", "--d2", "3", "--check-oracle"];
    let json = run_ok(&[&args[..], &["--format", "json"]].concat());
    let report: Report<SolveResult> = serde_json::from_str(&json).unwrap();
    let exact = report.result.oracle.expect("oracle ran");
    assert!((exact.to_f64() - report.result.p_win).abs() < 1e-12);
    // Above the cross-check size the flag is a no-op.
    let args = ["solve", "--case", "best1", "--n", "12", "--k", "3", "--d", "2", "--check-oracle", "--format", "json"];
    let report: Report<SolveResult> = serde_json::from_str(&run_ok(&args)).unwrap();
    assert!(report.result.oracle.is_none());
}

#[test]
fn error_kinds() {
    assert_eq!(run_err(&["solve", "--case", "best1", "--n", "6", "--k", "2"]).exit_code(), 1);
    assert_eq!(run_err(&["solve", "--case", "best1", "--n", "6", "--k", "7", "--d", "0"]).exit_code(), 1);
    assert_eq!(run_err(&["table", "--case", "best1", "--n-min", "6", "--n-max", "40"]).exit_code(), 2);
    assert_eq!(run_err(&["oracle", "--case", "best1", "--n", "12", "--k", "2", "--d", "1"]).exit_code(), 2);
    assert_eq!(CliError::Disagreement(String::new()).exit_code(), 3);
}

#[test]
fn binary_exit_codes() {
    let ok = binary(&["solve", "--case", "best1", "--n", "6", "--k", "2", "--d", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "best1 n=6 k=2 thresholds=1: p_win = 0.5611\n");

    let usage = binary(&["solve", "--case", "best1", "--n", "6", "--k", "2"]);
    assert_eq!(usage.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("--d"));

    let resource = binary(&["table", "--case", "best2", "--n-min", "4", "--n-max", "31"]);
    assert_eq!(resource.status.code(), Some(2));
    assert!(resource.stdout.is_empty());

    assert_eq!(binary(&["--help"]).status.code(), Some(0));
    assert_eq!(binary(&["frobnicate"]).status.code(), Some(1));
}
