use std::process::{Command, Output};

use serde_json::Value;

fn qbern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbern"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn default_verify_passes_matches_schema_and_repeats() {
    let a = qbern(&["verify"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = qbern(&["verify"]);
    assert_eq!(a.stdout, b.stdout);

    let single = Command::new(env!("CARGO_BIN_EXE_qbern"))
        .arg("verify")
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, single.stdout);

    let schema: Value =
        serde_json::from_str(include_str!("../../../docs/report.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let report = json(&a);
    let errors: Vec<String> = validator
        .iter_errors(&report)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{errors:?}");
    assert_eq!(report["summary"]["fail"], 0);
    assert_eq!(report["convention"]["pinned_confirmed"], true);

    let ids: Vec<&str> = report["errata"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["id"].as_str().unwrap())
        .collect();
    for want in [
        "carlitz_beta3",
        "amn_index_convention",
        "same_q_symmetry",
        "series_constant",
        "genfun_constant_term",
        "genfun_exponent",
    ] {
        assert!(ids.contains(&want), "missing erratum {want}");
    }
}

#[test]
fn suite_filter_keeps_only_selected_reports() {
    let o = qbern(&[
        "verify",
        "--suite",
        "integral-identity",
        "--max-m",
        "1",
        "--max-n",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let reports = r["reports"].as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|x| x["identity"]
        .as_str()
        .unwrap()
        .starts_with("integral_identity")));
    assert!(r.get("convention").is_none());
}

#[test]
fn csv_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = qbern(&[
        "verify",
        "--suite",
        "valuation,symmetry",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("identity,m,n,p,q,agreement,verdict"));
    assert!(lines.all(|l| l.starts_with("valuation_bound,")
        || l.starts_with("symmetry_")
        || l.starts_with("euler_analogue,")));
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        &["amn", "--q", "1/0"][..],
        &["verify", "--p", "4"],
        &["verify", "--q", "2"],
        &["verify", "--suite", "nope"],
        &["verify", "--format", "xml"],
        &["volkenborn", "--fn", "sin(x)"],
        &["beta", "--kind", "euler"],
        &["verify", "--precision", "abc"],
    ] {
        let o = qbern(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn level_beyond_cap_exits_3() {
    let o = qbern(&["volkenborn", "--p", "3", "--q", "4", "--level", "30"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

#[test]
fn beta_tables() {
    let o = qbern(&[
        "beta",
        "--kind",
        "classical",
        "--max-n",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0);
    let values: Vec<String> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().to_string())
        .collect();
    assert_eq!(values, ["1", "-1/2", "1/6", "0"]);

    let rows = json(&qbern(&[
        "beta", "--kind", "carlitz", "--q", "2", "--max-n", "2",
    ]));
    let values: Vec<&str> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["value"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["1", "-1/3", "2/21"]);

    let rows = json(&qbern(&[
        "beta", "--kind", "modified", "--q", "6", "--max-n", "1",
    ]));
    assert_eq!(rows[1]["value"], "-1/5 + 1/25·L");
    assert_eq!(rows[1]["padic"]["valuation"], 0);
}

#[test]
fn volkenborn_profiles() {
    let r = json(&qbern(&[
        "volkenborn",
        "--p",
        "3",
        "--q",
        "4",
        "--level",
        "5",
        "--fn",
        "bracket^1",
    ]));
    assert_eq!(r["rows"].as_array().unwrap().len(), 5);
    assert_eq!(r["delta_valuations"].as_array().unwrap().len(), 4);

    let r = json(&qbern(&[
        "volkenborn",
        "--p",
        "3",
        "--q",
        "4",
        "--fn",
        "character(0)",
    ]));
    assert!(r["delta_valuations"]
        .as_array()
        .unwrap()
        .iter()
        .all(Value::is_null));
    assert_eq!(r["integral"], "1");
}

#[test]
fn amn_grid() {
    let o = qbern(&[
        "amn", "--p", "3", "--q", "4", "--max-m", "2", "--max-n", "2",
    ]);
    assert_eq!(code(&o), 0);
    let rows = json(&o);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows
        .iter()
        .all(|r| r["agrees"] == true && r["valuation_ok"] == true));
    let r01 = rows.iter().find(|r| r["m"] == 0 && r["n"] == 1).unwrap();
    // 1/2 = ...1112 in base 3
    let digits: Vec<u64> = r01["direct"]["digits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_u64().unwrap())
        .collect();
    assert_eq!(digits[0], 2);
    assert!(digits[1..].iter().all(|&d| d == 1));
}
