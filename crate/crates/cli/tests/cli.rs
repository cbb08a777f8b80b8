use std::process::{Command, Output};

fn drw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drw")).args(args).output().unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn witt_teichmuller_sum() {
    let out = drw(&["witt", "[x]+[y]", "--p", "2", "--r", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // S_1 = -x y, which is x y in characteristic 2
    assert!(text.starts_with("coordinates: (x + y, x*y)"), "{text}");
}

#[test]
fn usage_errors_exit_64() {
    for args in [&["compute", "--p", "4"][..], &["compute", "--r", "0"], &["verify", "--checks", "nope"], &["compute", "--crystal", "nope"]] {
        let out = drw(args);
        assert_eq!(out.status.code(), Some(64), "{args:?}");
        assert_eq!(stderr_json(&out)["error"], "InvalidJob");
    }
    assert_eq!(drw(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn compute_json_and_csv() {
    let out = drw(&["compute", "--p", "2", "--r", "2", "--crystal", "gm-kummer:c=-1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "drw/1");
    assert_eq!(v["levels"].as_array().unwrap().len(), 2);

    let out = drw(&["compute", "--p", "3", "--csv", "--crystal", "a1-trivial"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,degree,weight,total_weight,divisors,stable_from"));
    // weight 0 in degree 0 is Z/3 at level 1
    assert!(lines.any(|l| l.starts_with("1,0,\"0\",0,3,")), "{text}");
}

#[test]
fn missing_file_is_io_error() {
    let out = drw(&["compute", "--crystal", "/nonexistent/crystal.json"]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(stderr_json(&out)["error"], "Io");
}
