use std::process::Command;

use umbral::cli::run;

fn umbral(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("umbral").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn eta_gives_pentagonal_exponents() {
    let (code, out, _) = umbral(&["expand", "--function", "eta", "--qorder", "15", "--format", "csv"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "q,y,coefficient");
    // q^(1/24) (1 - q - q^2 + q^5 + q^7 - q^12), q^(1/24 + 15) is past the order
    let expected = ["1/24,0,1", "25/24,0,-1", "49/24,0,-1", "121/24,0,1", "169/24,0,1", "289/24,0,-1"];
    assert_eq!(&rows[1..], &expected);
}

#[test]
fn theta_mr_json_round_trips() {
    let (code, out, _) = umbral(&["expand", "--function", "theta_mr", "--m", "5/2", "--r", "-3/2", "--qorder", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["terms"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn h_table_csv() {
    let (code, out, _) = umbral(&["h-table", "--lambency", "10+5", "--class", "1A", "--terms", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("r,q,coefficient"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 15);
    let labels: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(labels.into_iter().collect::<Vec<_>>(), ["-1", "-3", "1", "3", "5"]);
    assert!(rows.contains(&vec!["1", "-1/40", "-2"]));
    assert!(rows.contains(&vec!["-1", "-1/40", "2"]));
}

#[test]
fn usage_errors_name_the_flag() {
    for (args, flag) in [
        (&["expand", "--function", "eta", "--qorder", "-1"][..], "--qorder"),
        (&["expand", "--function", "theta_mr", "--qorder", "2"][..], "--m"),
        (&["trace", "--lambency", "12+6", "--class", "1A", "--qorder", "1"][..], "--lambency"),
        (&["trace", "--lambency", "10+5", "--class", "7A", "--qorder", "1"][..], "--class"),
        (
            &["split", "--lambency", "10+5", "--class", "1A", "--qorder", "2", "--yfloor", "-10", "--yfloor2", "-4"][..],
            "--yfloor2",
        ),
        (
            &["trace", "--lambency", "10+5", "--class", "1A", "--route", "enumerate", "--qorder", "2", "--budget", "10"][..],
            "--budget",
        ),
        (&["verify", "--suite", "nonsense"][..], "--suite"),
    ] {
        let (code, _, err) = umbral(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(err.contains(flag), "{args:?}: {err}");
    }
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(umbral(&["--help"]).0, 0);
    let (code, out, _) = umbral(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("umbral "));
}

#[test]
fn split_reports_the_residue() {
    let (code, out, _) = umbral(&[
        "split", "--lambency", "14+7", "--class", "1A", "--qorder", "4", "--yfloor", "-14", "--yfloor2", "-21",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["residue"], "-6");
    assert_eq!(v["h"].as_object().unwrap().len(), 7);
}

#[test]
fn split_mismatch_exits_one() {
    let (code, out, _) = umbral(&["split", "--lambency", "22+11", "--class", "2A", "--qorder", "6", "--yfloor", "-22"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert_eq!(v["status"], "mismatch");
    assert_eq!(v["mismatch"]["class"], "2A");
}

#[test]
fn verify_passes_and_fails_with_exit_codes() {
    let (code, out, _) = umbral(&["verify", "--suite", "residue", "--lambency", "10+5", "--qorder", "4"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("PASS residue"));

    let (code, out, _) = umbral(&["verify", "--suite", "theorems", "--lambency", "14+7", "--qorder", "3", "--format", "json"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["passed"], false);
    assert!(!v[0]["mismatches"].as_array().unwrap().is_empty());
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_umbral");
    let ok = Command::new(bin).args(["verify", "--suite", "orbits"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["expand", "--function", "nope", "--qorder", "1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
