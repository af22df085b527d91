use std::process::Command;

use gapcert::cli::run;
use gapcert::gaps::{HypothesisMargin, MinimalK};
use gapcert::mk::MkCertificate;
use gapcert::shift::ShiftResult;
use gapcert::tuples::{is_admissible, parse_tuple};

fn gapcert(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gapcert"))
        .args(args)
        .env_remove("GAPCERT_DATA_DIR")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn inadmissible_tuple_reports_witness() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "t.txt", "0\n2\n4\n");
    let (code, stdout, _) = gapcert(&["tuple", "check", &file]);
    assert_eq!(code, 1);
    assert!(stdout.contains("witness p = 3"), "{stdout}");
    let (code, stdout, _) = gapcert(&["tuple", "check", &file, "--format", "json"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["witness"]["prime"], 3);
}

#[test]
fn admissible_tuple_passes() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "t.txt", "0 2 6\n");
    let (code, stdout, _) = gapcert(&["tuple", "check", &file]);
    assert_eq!(code, 0);
    assert!(stdout.contains("k = 3, diameter = 6"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let (code, _, stderr) = gapcert(&["tuple", "check", "--nope"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("Usage"));
    let (code, _, _) = gapcert(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn missing_file_is_rejected() {
    let (code, _, stderr) = gapcert(&["tuple", "check", "/nonexistent/tuple.txt"]);
    assert_eq!(code, 1);
    assert!(stderr.starts_with("error:"));
}

#[test]
fn mk_bound_text_and_json_round_trip() {
    let args = ["mk", "bound", "--k", "5229", "--beta", "0.973", "--theta-poly", "0.9650"];
    let (code, text, _) = gapcert(&args);
    assert_eq!(code, 0);
    let cert = MkCertificate::from_text(&text).unwrap();
    assert!(cert.bound >= 5.9484);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let (code, json, _) = gapcert(&json_args);
    assert_eq!(code, 0);
    let from_json: MkCertificate = serde_json::from_str(&json).unwrap();
    from_json.verify().unwrap();
    assert_eq!(from_json, cert);
}

#[test]
fn mk_bound_precondition_failure() {
    let (code, _, stderr) = gapcert(&["mk", "bound", "--k", "2", "--beta", "0.6", "--theta-poly", "0.965"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("k*mu < 1 - T"), "{stderr}");
}

#[test]
fn tuple_make_and_narrow() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("made.txt");
    let (code, stdout, _) = gapcert(&["tuple", "make", "--k", "100", "--output", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let made = is_admissible(&parse_tuple(&std::fs::read_to_string(&out).unwrap()).unwrap()).unwrap();
    assert_eq!(made.k(), 100);
    let (code, stdout, _) = gapcert(&["tuple", "narrow", out.to_str().unwrap(), "--k", "40", "--window"]);
    assert_eq!(code, 0);
    let narrowed = is_admissible(&parse_tuple(&stdout).unwrap()).unwrap();
    assert_eq!(narrowed.k(), 40);
    let (code, stdout, _) = gapcert(&["tuple", "narrow", out.to_str().unwrap(), "--k", "40"]);
    assert_eq!(code, 0);
    let prefix = is_admissible(&parse_tuple(&stdout).unwrap()).unwrap();
    assert!(narrowed.diameter() <= prefix.diameter());
    let (code, _, _) = gapcert(&["tuple", "narrow", out.to_str().unwrap(), "--k", "101"]);
    assert_eq!(code, 1);
}

#[test]
fn shift_commands() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "t.txt", "0 2\n");
    let (code, stdout, _) = gapcert(&["shift", "find", &file, "--delta", "13", "--format", "json"]);
    assert_eq!(code, 0);
    let r: ShiftResult = serde_json::from_str(&stdout).unwrap();
    assert_eq!(r.l, 5);
    let (code, stdout, _) = gapcert(&["shift", "find", &file, "--delta", "5"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("no shift"), "{stdout}");
    let (code, stdout, _) = gapcert(&["shift", "stats", &file, "--delta", "13"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("H = "));
    let (code, _, stderr) = gapcert(&["shift", "find", &file, "--delta", "-12"]);
    assert_eq!(code, 1, "{stderr}");
    assert!(stderr.contains("validation"), "{stderr}");
}

#[test]
fn solve_and_margin_json_reparse() {
    let (code, stdout, _) = gapcert(&["solve", "k", "--m", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let res: MinimalK = serde_json::from_str(&stdout).unwrap();
    assert!(res.margin_at_k > 0.0);
    let (code, stdout, _) = gapcert(&["margin", "--a", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let m: HypothesisMargin = serde_json::from_str(&stdout).unwrap();
    assert!(m.dominates);
    let (code, _, _) = gapcert(&["margin", "--a", "2"]);
    assert_eq!(code, 1);
}

#[test]
fn report_is_deterministic_across_thread_counts() {
    let (code, a, _) = gapcert(&["report", "hm"]);
    assert_eq!(code, 0);
    assert!(a.contains("H_2 <= 264"));
    assert!(a.contains("H_3 <= 49,342"));
    assert!(a.contains("1/theta = 1.98276"));
    let (_, b, _) = gapcert(&["report", "hm", "--threads", "1"]);
    assert_eq!(a, b);
    let (_, j1, _) = gapcert(&["--format", "json", "report", "hm"]);
    let (_, j2, _) = gapcert(&["--format", "json", "report", "hm", "--threads", "3"]);
    assert_eq!(j1, j2);
    let v: serde_json::Value = serde_json::from_str(&j1).unwrap();
    assert_eq!(v["claims"][0]["tuple_diameter"], 264);
}

#[test]
fn library_entry_point_matches_binary() {
    let lib = run(["gapcert", "mk", "asymptotic", "--k", "5229"]);
    let (code, stdout, _) = gapcert(&["mk", "asymptotic", "--k", "5229"]);
    assert_eq!(lib.code, code);
    assert_eq!(lib.stdout, stdout);
}
