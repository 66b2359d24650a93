use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_duality-lab"));
    c.env_remove("DUALITY_LAB_SEED");
    c
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn tor_of_zp2_is_residue_field() {
    let module = data("zp2.json");
    let out = run(&[
        "compute",
        "tor",
        "--seq",
        "P1",
        "--module",
        module.to_str().unwrap(),
        "--q",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["factors"], serde_json::json!([2]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("factors [2]"));
}

#[test]
fn verify_writes_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let args = [
        "verify",
        "koszul-selfduality",
        "--p",
        "2",
        "--d",
        "3",
        "--trials",
        "20",
        "--seed",
        "7",
        "--out",
    ];
    let out = bin().args(args).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS koszul-selfduality seed=7"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "PASS");
    assert_eq!(report["seed"], 7);
}

#[test]
fn unknown_id_lists_all_ids() {
    let out = run(&["verify", "no-such-id"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for id in duality_lab::theorems::THEOREM_IDS {
        assert!(err.contains(id), "{id} missing from: {err}");
    }
}

#[test]
fn negative_control_exits_one() {
    let out = run(&["verify", "ext-tor-duality", "--negative"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["verdict"], "FAIL");
}

#[test]
fn seed_from_environment() {
    let out = bin()
        .args(["verify", "pont-involution", "--trials", "3"])
        .env("DUALITY_LAB_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["seed"], 42);
    let out = bin()
        .args(["verify", "pont-involution", "--trials", "3", "--seed", "5"])
        .env("DUALITY_LAB_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["seed"], 5);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["verify", "matlis-commutation", "--trials", "10", "--seed", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn parse_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        "{\n \"ambient\": {\"p\": 2, \"a\": 2, \"t\": 1, \"s\": 0},\n \"factors\": [4]\n}",
    )
    .unwrap();
    let out = bin().args(["compute", "dual", "--module"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("operators.X1: missing"));

    std::fs::write(&path, "{\n \"ambient\": 3\n}").unwrap();
    let out = bin().args(["compute", "dual", "--module"]).arg(&path).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn torus_computations() {
    let module = data("z4_torus.json");
    let m = module.to_str().unwrap();
    let out = run(&["compute", "group-cohomology", "--module", m, "--q", "1"]);
    assert_eq!(stdout_json(&out)["result"]["factors"], serde_json::json!([2]));
    let out = run(&["compute", "d-functor", "--module", m, "--q", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_json(&out)["result"]["certificate"]["stable_index"].is_number());
    let out = run(&["compute", "regularity", "--module", m, "--seq", "P1,G1:0"]);
    assert_eq!(stdout_json(&out)["result"]["certified"], true);
}

#[test]
fn missing_flag_is_an_error() {
    let out = run(&["compute", "tor", "--module", data("zp2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seq"));
}
