use std::process::{Command, Output};

fn vtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vtree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn encode_and_decode() {
    let o = vtree(&["encode", "14", "--code", "ci"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0001001\n");
    let o = vtree(&["decode", "0001001011", "--code", "ci"]);
    assert_eq!(stdout(&o), "14 2\n");
    assert_eq!(vtree(&["decode", "0001", "--code", "ci"]).status.code(), Some(1));
    assert_eq!(vtree(&["decode", "01", "--code", "cu'"]).status.code(), Some(1));
}

#[test]
fn qmf_reports_address_and_dyadic() {
    let o = vtree(&["qmf", "38/51"]);
    let out = stdout(&o);
    assert!(out.contains("address 110011110"));
    assert!(out.contains("dyadic 829/1024"));
    let o = vtree(&["--json", "--no-timing", "qmf", "38/51"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["codeword"], "110011110100");
    assert_eq!(v["result"]["pds"], serde_json::json!(["1", "2", "1", "12"]));
    assert_eq!(v["input"], serde_json::json!(["--json", "--no-timing", "qmf", "38/51"]));
    assert_eq!(stdout(&vtree(&["qmf-inv", "110011110"])), "38/51\n");
    assert_eq!(stdout(&vtree(&["qmf-inv", "829/2^10"])), "38/51\n");
}

#[test]
fn verify_exit_codes() {
    let o = vtree(&["verify", "determinants", "--kind", "v10", "--depth", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 failures"));
    let o = vtree(&["--json", "verify", "parabola", "--k", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], false);
    assert!(!v["result"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn usage_and_domain_errors() {
    assert_eq!(vtree(&["nonsense"]).status.code(), Some(2));
    assert_eq!(vtree(&["tree", "--kind", "v10"]).status.code(), Some(2));
    assert_eq!(vtree(&["tree", "--kind", "xyz", "--depth", "2"]).status.code(), Some(2));
    assert_eq!(vtree(&["measure", "integral", "--k", "24"]).status.code(), Some(2));
    let o = vtree(&["qmf", "5/3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside the open unit interval"));
    assert_eq!(vtree(&["tree", "--kind", "v10", "--depth", "7", "--format", "dot"]).status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["--json", "--no-timing", "verify", "determinants", "--kind", "v10", "--depth", "10"];
    assert_eq!(vtree(&args).stdout, vtree(&args).stdout);
    let args = ["plotdata", "--k", "6"];
    let a = vtree(&args);
    assert_eq!(a.stdout, vtree(&args).stdout);
    let csv = stdout(&a);
    assert!(csv.starts_with("x,qmf_bar,deviation\n"));
    assert_eq!(csv.lines().count(), 1 + 65);
}

#[test]
fn tree_formats() {
    let dot = stdout(&vtree(&["tree", "--kind", "sb", "--depth", "2", "--format", "dot"]));
    assert!(dot.starts_with("digraph"));
    let csv = stdout(&vtree(&["tree", "--kind", "v10", "--depth", "1", "--format", "csv"]));
    assert_eq!(csv, "index,address,depth,label\n1,,0,1/2\n2,0,1,1/4\n3,1,1,2/3\n");
    let seq = stdout(&vtree(&["seq", "--kind", "v1", "-n", "4"]));
    assert_eq!(seq, "1/1, 1/2, 2/1, 1/4\n");
}

#[test]
fn measures_and_probe() {
    let o = vtree(&["--json", "measure", "entropy", "--code", "sb"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["value"]["kind"], "divergent");
    assert!(v["elapsed_ms"].is_number());
    let o = vtree(&["--json", "--no-timing", "probe-derivative", "38/51", "--side", "left", "--n", "24"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["predicted_limit"], "2601/8192");
    assert!(v["result"]["relative_error"].as_f64().unwrap() < 1e-4);
}
