use std::process::{Command, Output};

fn coxprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxprop")).args(args).env_remove("COXPROP_OUT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn count_proper_h3() {
    let o = coxprop(&["--threads", "1", "count-proper", "--group", "H3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().last().unwrap() == "proper 48", "{out}");
    assert_eq!(out.lines().filter(|l| l.trim_start().starts_with(char::is_numeric)).count(), 16);
}

#[test]
fn maxw0_b5() {
    let o = coxprop(&["maxw0", "--group", "B5", "--x", "3"]);
    assert_eq!(stdout(&o).trim(), "9");
    let o = coxprop(&["maxw0", "--group", "E8", "--brute-force"]);
    assert_eq!(stdout(&o).lines().last().unwrap(), "8 120");
    let o = coxprop(&["maxw0", "--matrix", "1,3;3,1"]);
    assert_eq!(stdout(&o).lines().last().unwrap(), "2 3");
}

#[test]
fn verify_cross_check() {
    let o = coxprop(&["verify", "--group", "A4", "--cross-check"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("120 elements: pass"));
    let o = coxprop(&["verify", "--group", "F4"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    assert_eq!(coxprop(&["maxw0", "--group", "Q9"]).status.code(), Some(2));
    assert_eq!(coxprop(&["maxw0", "--group", "B5", "--x", "6"]).status.code(), Some(2));
    assert_eq!(coxprop(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(coxprop(&["count-proper", "--group", "E8"]).status.code(), Some(5));
    assert_eq!(coxprop(&["spherical", "--group", "A2", "--word", "1 2", "--subset", "2"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(coxprop(&["enumerate", "--group", "A3", "--out", d]).status.success());
    assert_eq!(coxprop(&["enumerate", "--group", "A3", "--out", d]).status.code(), Some(2));
    assert!(coxprop(&["enumerate", "--group", "A3", "--out", d, "--force"]).status.success());
    std::fs::write(dir.path().join("A3/2.txt"), "1 5\n").unwrap();
    assert_eq!(coxprop(&["count-proper", "--dir", &format!("{d}/A3")]).status.code(), Some(4));
    std::fs::write(dir.path().join("A3/manifest.json"), "[").unwrap();
    assert_eq!(coxprop(&["count-proper", "--dir", &format!("{d}/A3")]).status.code(), Some(3));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_coxprop"))
        .args(["enumerate", "--group", "B2"])
        .env("COXPROP_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("B2/4.txt")).unwrap().lines().count(), 1);
}

#[test]
fn sample_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("est.csv");
    let manifest = dir.path().join("run.json");
    let o = coxprop(&[
        "--manifest",
        manifest.to_str().unwrap(),
        "sample",
        "--family",
        "A,B,D",
        "--n",
        "16,32,64,128",
        "--samples",
        "200",
        "--seed",
        "5",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert_eq!(text.lines().next().unwrap(), "family,n,samples,hits,estimate,ci_low,ci_high,seed,bound");
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["seeds"][0], 5);
    assert!(m["rng"].as_str().unwrap().contains("ChaCha8Rng"));
    assert_eq!(m["status"], "ok");
}

#[test]
fn element_queries() {
    let o = coxprop(&["proper", "--group", "A2", "--word", "1 2 1"]);
    assert!(stdout(&o).contains("proper"));
    let o = coxprop(&["proper", "--family", "B", "--perm", "-2 -1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("length 3  descents 1"), "{}", stdout(&o));
    let o = coxprop(&["spherical", "--group", "A2", "--word", "1 2 1", "--subset", ""]);
    assert!(stdout(&o).contains("not spherical"), "{}", stdout(&o));
    let o = coxprop(&["construct", "--n", "9", "--q", "6", "--s", "4", "--list"]);
    let out = stdout(&o);
    assert!(out.contains("4 5 3 2 1 6 7 8 9\n"));
    assert!(out.contains("4 5 3 2 6 1 7 8 9\n"));
}
