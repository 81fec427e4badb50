use std::process::{Command, Output};

use serde_json::Value;

fn wheelkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wheelkit"))
        .args(args)
        .env_remove("WHEELKIT_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bernoulli_table() {
    let o = wheelkit(&["bernoulli", "--n", "3"]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines[0], "n,b_2n,f_n");
    assert_eq!(lines[2], "1,1/48,1/24");
    assert_eq!(lines[3], "2,-1/5760,1/1920");
    assert_eq!(lines[4], "3,1/362880,1/322560");
}

#[test]
fn dims_in_degree_zero() {
    let o = wheelkit(&["dims", "--degree", "0"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dims"][0]["legged"], 1);
    assert_eq!(v["dims"][0]["total"], 1);
}

#[test]
fn dims_agree_across_skeletons() {
    let star = wheelkit(&["dims", "--max-degree", "3", "--format", "csv"]);
    let interval = wheelkit(&["dims", "--max-degree", "3", "--format", "csv", "--skeleton", "interval"]);
    assert_eq!(stdout(&star), stdout(&interval));
    assert_eq!(stdout(&star).lines().nth(4), Some("3,3,3,10"));
}

#[test]
fn appendix_suite_passes() {
    let o = wheelkit(&["suite", "appendix"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "wheelkit-report/1");
    assert_eq!(v["status"], "PASS");
}

#[test]
fn suite_report_to_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let cache = dir.path().join("cache");
    for p in [&a, &b] {
        let o = wheelkit(&[
            "suite",
            "delta-omega",
            "--max-degree",
            "3",
            "--format",
            "csv",
            "--cache-dir",
            cache.to_str().unwrap(),
            "--output",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("suite,check,degree,expect,observed,status\n"));
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(wheelkit(&["suite", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(wheelkit(&["--max-degree", "7", "dims"]).status.code(), Some(2));
    assert_eq!(wheelkit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(wheelkit(&["reduce", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn omega_pair_and_reduce() {
    let dir = tempfile::tempdir().unwrap();
    let omega = dir.path().join("omega.json");
    let o = wheelkit(&["omega", "--max-degree", "2", "--output", omega.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&omega).unwrap()).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);

    let strut = dir.path().join("strut.json");
    std::fs::write(
        &strut,
        r#"{"degree":1,"skeleton":[{"kind":"star","label":"x","legs":[0,1]}],"vertices":[],"edges":[[0,1]]}"#,
    )
    .unwrap();
    // <Omega, strut> = 1/4
    let o = wheelkit(&["pair", omega.to_str().unwrap(), strut.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "1/4");

    let theta = dir.path().join("theta.json");
    std::fs::write(
        &theta,
        r#"{"degree":1,"skeleton":[],"vertices":[{"id":0,"rot":[0,1,2]},{"id":1,"rot":[3,4,5]}],"edges":[[0,3],[1,5],[2,4]]}"#,
    )
    .unwrap();
    let o = wheelkit(&["reduce", theta.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "6");
    let o = wheelkit(&["reduce", strut.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cache_build_list_clear() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(wheelkit(&["cache", "build", "--max-degree", "2", "--cache-dir", d]).status.success());
    let listed = stdout(&wheelkit(&["cache", "list", "--cache-dir", d]));
    assert!(listed.lines().count() > 0);
    assert!(listed.lines().all(|l| l.ends_with(".wkq")));
    assert!(wheelkit(&["cache", "clear", "--cache-dir", d]).status.success());
    assert_eq!(stdout(&wheelkit(&["cache", "list", "--cache-dir", d])), "");
    assert_eq!(wheelkit(&["cache", "list"]).status.code(), Some(2));
}
