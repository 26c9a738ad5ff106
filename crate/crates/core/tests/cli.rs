use std::process::{Command, Output};

use schmidt_core::cli::{execute, Cli, Report};
use schmidt_core::coeffs::table_for;
use schmidt_core::verify::verify_lemma;
use schmidt_core::{ExactInt, PowerIndex};

use clap::Parser;

fn schmidt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schmidt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn schmidt_number() {
    let o = schmidt(&["s", "--r", "2", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "73\n");
}

#[test]
fn c_implicit_csv() {
    let o = schmidt(&[
        "c", "--r", "2", "--k-max", "3", "--method", "implicit", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "k,value\n0,1\n1,2\n2,10\n3,56\n");
}

#[test]
fn c_methods_agree() {
    for r in ["1", "2", "3", "4", "5"] {
        let table = schmidt(&[
            "c", "--r", r, "--k-max", "12", "--method", "table", "--format", "csv",
        ]);
        let implicit = schmidt(&[
            "c", "--r", r, "--k-max", "12", "--method", "implicit", "--format", "csv",
        ]);
        assert_eq!(stdout(&table), stdout(&implicit), "r = {r}");
    }
}

#[test]
fn verify_kernel_json() {
    let o = schmidt(&["verify", "kernel", "--k", "1", "--i", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["degree_bound"], 4);
    assert_eq!(v["points_checked"], 5);
    assert_eq!(v["identity"], "kernel");
}

#[test]
fn table_csv_header_and_big_values() {
    let o = schmidt(&["table", "--r", "6", "--k-max", "20", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,j,value"));
    // diagonal entry a(6; 20, 20) = C(40, 20)^5, far beyond 64 bits
    let want = format!("20,20,{}", ExactInt::from(137846528820u64).pow(5));
    assert!(text.lines().any(|l| l == want));
}

#[test]
fn big_values_are_json_strings() {
    let o = schmidt(&["s", "--r", "4", "--n", "30", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["value"].is_string());
    assert_eq!(v["r"], 4);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("row.json");
    let o = schmidt(&[
        "c",
        "--r",
        "3",
        "--k-max",
        "2",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["values"], serde_json::json!(["1", "4", "68"]));
    assert_eq!(v["method"], "column_sum");
}

#[test]
fn usage_errors() {
    let o = schmidt(&["c", "--r", "0", "--k-max", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert!(o.stdout.is_empty());
    assert_eq!(schmidt(&["nope"]).status.code(), Some(2));
    assert_eq!(
        schmidt(&["verify", "lemma", "--r", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        schmidt(&["s", "--r", "2", "--n", "1", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn guess_commands() {
    let o = schmidt(&[
        "guess",
        "solve-kernel",
        "--k",
        "1",
        "--j",
        "2",
        "--r-max",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "k,j,i,value\n1,2,1,4\n1,2,2,6\n");

    let o = schmidt(&["guess", "fit"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "C(k+i,i)*C(k,j-i)*C(j,k)"));

    let o = schmidt(&[
        "guess",
        "solve-kernel",
        "--k",
        "1",
        "--j",
        "4",
        "--r-max",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("needs r_max >= 4"));
}

#[test]
fn verify_all_small_box() {
    let o = schmidt(&[
        "verify",
        "all",
        "--lemma-r-max",
        "2",
        "--lemma-k-max",
        "3",
        "--kernel-max",
        "4",
        "--r-max",
        "3",
        "--n-max",
        "6",
        "--explicit-n-max",
        "8",
        "--format",
        "text",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("PASS\n"));
}

fn report_for(args: &[&str]) -> Report {
    let cli = Cli::try_parse_from(std::iter::once("schmidt").chain(args.iter().copied())).unwrap();
    execute(&cli.command).unwrap()
}

#[test]
fn json_reports_roundtrip() {
    use schmidt_core::cli::*;
    use schmidt_core::guess::KernelValues;
    use schmidt_core::oracle::ImplicitSolveReport;
    use schmidt_core::verify::*;
    use schmidt_core::SchmidtRow;

    fn check<T: serde::Serialize + serde::de::DeserializeOwned>(json: &str) {
        let parsed: T = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string_pretty(&parsed).unwrap(), json);
    }

    let cases: &[&[&str]] = &[
        &["s", "--r", "3", "--n", "7"],
        &["poly", "--r", "2", "--n", "3", "--x", "-5/7"],
        &["c", "--r", "4", "--k-max", "6"],
        &["table", "--r", "3", "--k-max", "3"],
        &["verify", "lemma", "--r", "3", "--k", "2"],
        &["verify", "integrality", "--r-max", "3", "--n-max", "5"],
        &["verify", "explicit", "--n-max", "5"],
        &[
            "verify",
            "all",
            "--lemma-r-max",
            "2",
            "--lemma-k-max",
            "2",
            "--kernel-max",
            "2",
            "--r-max",
            "2",
            "--n-max",
            "3",
            "--explicit-n-max",
            "3",
        ],
        &[
            "guess",
            "solve-kernel",
            "--k",
            "2",
            "--j",
            "4",
            "--r-max",
            "5",
        ],
        &[
            "guess", "fit", "--k-max", "2", "--j-max", "3", "--r-max", "6",
        ],
    ];
    for args in cases {
        let report = report_for(args);
        let json = report.to_json().unwrap();
        match &report {
            Report::Number(_) => check::<NumberReport>(&json),
            Report::Poly(_) => check::<PolyReport>(&json),
            Report::Row(_) => check::<SchmidtRow>(&json),
            Report::Implicit(_) => check::<ImplicitSolveReport>(&json),
            Report::Table(_) => check::<TableDump>(&json),
            Report::Identity(_) => check::<IdentityCheckResult>(&json),
            Report::Integrality(_) => check::<IntegralityReport>(&json),
            Report::Explicit(_) => check::<ExplicitCheckReport>(&json),
            Report::All(_) => check::<AllChecksReport>(&json),
            Report::Kernel(_) => check::<KernelValues>(&json),
            Report::Fit(_) => check::<FitReport>(&json),
        }
    }
}

#[test]
fn failing_checks_map_to_status_one() {
    let t = table_for(PowerIndex::new(2).unwrap(), 3);
    let bad = t.with_entry_replaced(3, 4, t.entry(3, 4) + 1u8).unwrap();
    let report = Report::Identity(verify_lemma(&bad, 3));
    assert!(!report.passed());
    assert!(report.to_text().contains("FAIL"));
}
