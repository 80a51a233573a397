use std::process::{Command, Output};

use serde_json::Value;

fn qspinor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qspinor")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn normalize_reorders_and_reduces() {
    let out = qspinor(&["normalize", "d*a", "--spec", "sl"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "a*d + (-q + q^-1)*b*c");
    let out = qspinor(&["normalize", "a*d - q*b*c", "--spec", "sl", "--reduce"]);
    assert_eq!(stdout(&out).trim(), "1");
}

#[test]
fn normalize_rejects_bad_input() {
    let out = qspinor(&["normalize", "a + zz", "--spec", "sl"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("zz"));
    assert_eq!(code(&qspinor(&["normalize", "a", "--spec", "nope"])), 2);
}

#[test]
fn spin_half_is_the_generator_matrix() {
    let out = qspinor(&["emit", "dmatrix", "--j", "1/2", "--q", "1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["j"], "1/2");
    let names: Vec<&str> = (0..2)
        .flat_map(|r| (0..2).map(move |c| (r, c)))
        .map(|(r, c)| v["entries"][r][c][0]["word"][0].as_str().unwrap())
        .collect();
    assert_eq!(names, ["a", "b", "c", "d"]);
}

#[test]
fn eta_text_is_exact() {
    let out = qspinor(&["emit", "eta"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].contains("1/2*q + 1/2*q^-1"));
    assert!(rows[3].starts_with("[  1/2*q - 1/2*q^-1"));
    let derived = stdout(&qspinor(&["emit", "eta", "--derived"]));
    assert!(derived.lines().nth(4).unwrap().starts_with("[ -1/2*q + 1/2*q^-1"));
}

#[test]
fn sigma_at_one_is_pauli() {
    let out = qspinor(&["emit", "sigma", "--q", "1", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let m = &v["matrices"];
    assert_eq!(m[0], serde_json::json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]));
    assert_eq!(m[1], serde_json::json!([[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]));
    assert_eq!(m[2], serde_json::json!([[[0.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [0.0, 0.0]]]));
    assert_eq!(m[3], serde_json::json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]));
}

#[test]
fn emit_is_deterministic() {
    for args in [
        &["emit", "barsigma", "--q", "0.7"][..],
        &["emit", "dmatrix", "--j", "1", "--format", "json"],
    ] {
        assert_eq!(qspinor(args).stdout, qspinor(args).stdout);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(code(&qspinor(&["verify", "epsilon"])), 0);
    assert_eq!(code(&qspinor(&["verify", "sigma"])), 1);
    assert_eq!(code(&qspinor(&["verify", "epsilon", "--mutate", "eps:0,1"])), 1);
    assert_eq!(code(&qspinor(&["verify", "epsilon", "--mutate", "eps:5,5"])), 2);
    assert_eq!(code(&qspinor(&["verify", "bogus"])), 2);
    assert_eq!(code(&qspinor(&["emit", "dmatrix"])), 2);
    assert_eq!(code(&qspinor(&["emit", "dmatrix", "--j", "4"])), 2);
    assert_eq!(code(&qspinor(&["emit", "eta", "--q", "-1"])), 2);
    assert_eq!(code(&qspinor(&["emit", "tensor"])), 2);
    assert_eq!(code(&qspinor(&["frobnicate"])), 2);
}

#[test]
fn verify_prints_one_line_per_check() {
    let text = stdout(&qspinor(&["verify", "epsilon"]));
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 4);
}
