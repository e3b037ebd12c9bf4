use std::io::Write;
use std::process::{Command, Stdio};

use painted_operad::cli::{run_capture, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn lines(out: &str) -> Vec<Value> {
    out.lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn ok(args: &[&str], stdin: &str) -> Vec<Value> {
    let (code, out, err) = run_capture(args, stdin);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    lines(&out)
}

fn temp_file(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("painted-operad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn betti_and_tree_counts() {
    assert_eq!(ok(&["betti", "--whites", "6"], "")[0]["dims"], serde_json::json!([1, 16, 16, 1]));
    assert_eq!(ok(&["betti", "--whites", "2", "--blacks", "3"], "")[0]["dims"], serde_json::json!([1, 4, 1]));
    let (_, out, _) = run_capture(&["trees", "--whites", "5", "--edges", "1", "--count"], "");
    assert_eq!(out.trim(), "10");
    assert_eq!(ok(&["partitions", "--whites", "2", "--blacks", "2"], "").len(), 2);
}

#[test]
fn ring_check_and_pairing() {
    assert_eq!(ok(&["ring-check", "--whites", "5"], "")[0]["status"], "pass");
    let (code, csv, _) = run_capture(&["pairing", "--whites", "5", "--degree", "1"], "");
    assert_eq!(code, EXIT_OK);
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    for r in 0..5 {
        for c in 0..5 {
            assert_eq!(rows[r][c], rows[c][r]);
        }
    }
}

#[test]
fn normal_form_and_product() {
    let x = r#"{"grade":1,"terms":[{"tree":[{"part":["w1","w2"]}],"coeff":"1"}]}"#;
    let nf = ok(&["normalform", "--whites", "4"], x);
    assert_eq!(nf[0]["grade"], 1);
    let both = format!(r#"{{"x":{x},"y":{x}}}"#);
    let prod = ok(&["multiply", "--whites", "5"], &both);
    assert_eq!(prod[0]["grade"], 2);
    // Degree 2 lies above the top degree of M(0,4).
    let prod = ok(&["multiply", "--whites", "4"], &both);
    assert_eq!(prod[0]["terms"], serde_json::json!([]));
}

#[test]
fn lalgebra_pipeline() {
    let l = ok(&["gen-lalg", "--dimt", "1", "--dimf", "2", "--order", "4", "--seed", "5"], "");
    let l_text = l[0].to_string();
    let v = ok(&["lalg-verify"], &l_text);
    assert_eq!(v.last().unwrap()["status"], "pass");
    let b = ok(&["comm-fromlalg"], &l_text);
    let b_text = b[0].to_string();
    assert_eq!(ok(&["comm-check", "--in", "-"], &b_text)[0]["status"], "pass");
    let back = ok(&["comm-tolalg"], &b_text);
    assert_eq!(back[0], l[0]);

    let path = temp_file("l.json", &l_text);
    let t = ok(&["tensor", "--left", &path, "--right", &path], "");
    assert_eq!(ok(&["lalg-verify"], &t[0].to_string()).last().unwrap()["status"], "pass");

    let generic = ok(&["gen-lalg", "--dimt", "0", "--dimf", "2", "--order", "3", "--seed", "1", "--kind", "generic"], "");
    let (code, out, _) = run_capture(&["lalg-verify"], &generic[0].to_string());
    assert_eq!(code, EXIT_FAILED);
    assert!(out.contains("violation"));
}

#[test]
fn evaluate_one_vertex_tree() {
    let l = r#"{"dimT":0,"dimF":1,"order":3,"correlators":[{"indices":["f1"],"matrix":[["3"]]},{"indices":["f1","f1"],"matrix":[["7"]]}]}"#;
    let path = temp_file("tree.json", r#"{"whites":3,"blacks":0,"tree":[],"inputs":{"w2":["2"],"w3":["5"]}}"#);
    let out = ok(&["lalg-eval", "--tree", &path], l);
    // The special slot w2 carries 2 and the free argument w3 is 5·f1, so only
    // ⟨f1⟩ = 3 contributes: 3 · 5 · 2.
    assert_eq!(out[0]["value"], serde_json::json!(["30"]));
}

#[test]
fn series_commands() {
    let a = r#"{"vars":["t0","t1"],"order":5,"components":[[{"exp":{"t0":2},"coeff":"1/2"},{"exp":{"t1":3},"coeff":"1/6"}],[{"exp":{"t0":1,"t1":1},"coeff":"1"}]]}"#;
    let assoc = ok(&["assoc-check", "--identity", "0"], a);
    assert_eq!(assoc[0]["status"], "pass");
    let b = ok(&["assoc-tocomm"], a);
    assert_eq!(ok(&["comm-check"], &b[0].to_string())[0]["status"], "pass");
    let back = ok(&["comm-toassoc", "--h", "1,0"], &b[0].to_string());
    assert_eq!(back[0]["vars"], serde_json::json!(["t0", "t1"]));

    let base = temp_file("base.json", r#"{"vars":["t"],"order":4,"dimF":1,"dimT":1,"terms":[{"exp":{"t":1},"matrix":[["1"]]}]}"#);
    let total = temp_file(
        "total.json",
        r#"{"vars":["t","θ"],"order":4,"dimF":1,"dimT":1,"terms":[{"exp":{"t":1},"matrix":[["1"]]},{"exp":{"θ":1},"matrix":[["1"]]},{"exp":{"t":1,"θ":1},"matrix":[["1"]]}]}"#,
    );
    let p = ok(&["project", "--base", &base, "--total", &total], "");
    assert_eq!(p[0]["unique"], true);
    assert_eq!(p[0]["lambda"][0]["series"], "1 + t");

    let b2 = temp_file("b2.json", r#"{"vars":["θ"],"order":4,"dimF":1,"terms":[{"exp":{"θ":1},"matrix":[["1"]]},{"exp":{"θ":2},"matrix":[["1/2"]]}]}"#);
    let g = ok(&["glue", "--b1", &base, "--b2", &b2, "--h", "1"], "");
    assert_eq!(g[0]["dimT"], 1);
    assert_eq!(ok(&["comm-check"], &g[0].to_string())[0]["status"], "pass");

    let m = ok(&["maximality", "--order", "3"], &std::fs::read_to_string(&base).unwrap());
    assert_eq!(m[0]["verdict"], "strict");
}

#[test]
fn failure_exit_codes() {
    let bad = r#"{"vars":["x1","x2"],"order":3,"dimF":2,"terms":[{"exp":{"x1":1},"matrix":[["1","0"],["0","0"]]},{"exp":{"x2":1},"matrix":[["0","1"],["0","0"]]}]}"#;
    let (code, out, _) = run_capture(&["comm-check"], bad);
    assert_eq!(code, EXIT_FAILED);
    let v = &lines(&out)[0];
    assert_eq!(v["witness"]["matrix"], serde_json::json!([["0", "1"], ["0", "0"]]));

    assert_eq!(run_capture(&["no-such-command"], "").0, EXIT_USAGE);
    assert_eq!(run_capture(&["betti", "--whites", "9"], "").0, EXIT_USAGE);
    assert_eq!(run_capture(&["comm-check"], "not json").0, EXIT_USAGE);
}

#[test]
fn binary_exit_code_propagates() {
    let bad = r#"{"vars":["x1","x2"],"order":3,"dimF":2,"terms":[{"exp":{"x1":1},"matrix":[["1","0"],["0","0"]]},{"exp":{"x2":1},"matrix":[["0","1"],["0","0"]]}]}"#;
    let mut child = Command::new(env!("CARGO_BIN_EXE_painted-operad"))
        .args(["comm-check", "--in", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(bad.as_bytes()).unwrap();
    let status = child.wait_with_output().unwrap().status;
    assert_eq!(status.code(), Some(EXIT_FAILED));
}
