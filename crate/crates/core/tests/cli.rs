use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_integrality"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn spec(name: &str) -> String {
    format!("{}/specs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn gen_table_contains_third_term() {
    let o = bin(&["gen", "--spec", &spec("u-rec1.spec"), "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("3 ")).unwrap();
    assert!(row.ends_with("-20*b^3 + 160*b^2 + 12*b*c - 240*b - 40*c"), "{row}");
}

#[test]
fn gen_zero_is_a_single_row() {
    let o = bin(&["gen", "--spec", &spec("u-rec1.spec"), "--n", "0", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["terms"].as_array().unwrap().len(), 1);
    assert_eq!(v["terms"][0]["value"], "1");
}

#[test]
fn malformed_spec_exits_two_with_position() {
    let path = format!("{}/tests/fixtures/malformed.spec", env!("CARGO_MANIFEST_DIR"));
    let o = bin(&["gen", "--spec", &path]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains(":3:"), "{err}");
}

#[test]
fn io_errors_exit_three() {
    assert_eq!(bin(&["certify", "--spec", "/definitely/missing.spec"]).status.code(), Some(3));
    let o = bin(&["gen", "--spec", &spec("u-rec1.spec"), "--n", "1", "--out", "/definitely/missing/out.txt"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let o = bin(&["gen", "--spec", &spec("u-rec1.spec"), "--n", "2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(path).unwrap(),
        "n,value\n0,1\n1,-2*b\n2,6*b^2 - 12*b - 2*c\n"
    );
}

#[test]
fn verify_exit_codes() {
    assert_eq!(bin(&["verify", "id3", "--n", "40"]).status.code(), Some(0));
    assert_eq!(bin(&["verify", "inv", "--n", "25"]).status.code(), Some(0));
    assert_eq!(bin(&["verify", "derivation", "--order", "12"]).status.code(), Some(0));
    assert_eq!(bin(&["verify", "bogus"]).status.code(), Some(2));
}

#[test]
fn verify_json_record() {
    let v = json(&bin(&["verify", "hg-c0", "--n", "20", "--format", "json"]));
    assert_eq!(v["identity"], "hg-c0");
    assert_eq!(v["passed"], true);
    assert!(v["first_mismatch"].is_null());
}

#[test]
fn brackets_examples() {
    let o = bin(&["brackets", "t^3", "--bound", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let values: Vec<&str> = v["entries"].as_array().unwrap().iter().map(|e| e["value"].as_str().unwrap()).collect();
    assert_eq!(values, vec!["1", "1/8*x1^2", "27/128*x1^4"]);
    let defects: Vec<u64> = v["certification"]["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["max_v2_defect"].as_u64().unwrap())
        .collect();
    assert_eq!(defects, vec![0, 3, 7]);
    assert_eq!(bin(&["brackets", "t^2"]).status.code(), Some(2));
    assert_eq!(bin(&["brackets", "t^2", "--permissive", "--bound", "3"]).status.code(), Some(0));
    assert_eq!(bin(&["brackets", "t^2, t", "--permissive"]).status.code(), Some(1));
    assert_eq!(bin(&["--jobs", "2", "brackets", "t, t^3", "--bound", "5"]).status.code(), Some(0));
}

#[test]
fn certify_corpus() {
    let v = json(&bin(&["certify", "--spec", &spec("u-rec1.spec"), "--n", "60", "--format", "json"]));
    assert_eq!(v["theorem2_applicable"], true);
    assert_eq!(v["flags"]["in_z"], true);
    assert_eq!(v["flags"]["in_z_half"], true);

    let o = bin(&["certify", "--spec", &spec("w-rec1.spec"), "--n", "50", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["theorem2_applicable"], false);
    assert_eq!(v["flags"]["in_z_half"], false);
    assert_eq!(v["offenders"][0]["even_part"], "-t^2 + b + 1/4");

    let o = bin(&["certify", "--spec", &spec("apery.spec"), "--n", "30", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["pipeline"], "plain");
    assert_eq!(v["flags"]["in_z"], true);

    for name in ["odd-cubic.spec", "odd-mixed.spec", "odd-quintic.spec"] {
        let o = bin(&["certify", "--spec", &spec(name), "--n", "40", "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let v = json(&o);
        assert_eq!(v["theorem2_applicable"], true, "{name}");
        assert_eq!(v["flags"]["in_z_half"], true, "{name}");
    }
}

#[test]
fn certify_is_byte_deterministic() {
    for format in ["json", "csv", "table"] {
        let a = bin(&["certify", "--spec", &spec("odd-mixed.spec"), "--n", "15", "--format", format]);
        let b = bin(&["certify", "--spec", &spec("odd-mixed.spec"), "--n", "15", "--format", format]);
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
}

#[test]
fn expand_examples() {
    let o = bin(&["expand", "--spec", &spec("u-rec1.spec"), "--n", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let terms: Vec<&str> = v["report"]["contributions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["term"].as_str().unwrap())
        .collect();
    assert_eq!(terms, vec!["-2*b - 1/2", "1/2"]);
    assert_eq!(v["direct"], "-2*b");
    assert_eq!(bin(&["expand", "--spec", &spec("u-rec1.spec"), "--n", "8"]).status.code(), Some(0));
    assert_eq!(bin(&["expand", "--spec", &spec("odd-quintic.spec"), "--n", "6"]).status.code(), Some(0));
    assert_eq!(bin(&["expand", "--spec", &spec("w-rec1.spec")]).status.code(), Some(2));
    assert_eq!(bin(&["expand", "--spec", &spec("apery.spec")]).status.code(), Some(2));
}
