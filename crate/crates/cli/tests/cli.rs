use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn demo(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demos").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chabauty-lab"))
        .args(args)
        .env_remove("CHABAUTY_LAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn error_kind(o: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).expect("error object on stderr");
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn transit_demo_certifies() {
    let o = run(&["transit", demo("paired_clopen.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let cert = &v["result"]["certificate"];
    assert_eq!(cert["pairs"].as_array().unwrap().len(), 2);
    assert!(cert["conjugator"].as_str().unwrap().len() <= 12);
    assert_eq!(v["provenance"]["tool"], "chabauty-lab");
}

#[test]
fn negative_control_is_a_verified_failure() {
    let o = run(&["transit", demo("negative_control.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["result"]["certificate"].is_null());
    assert_eq!(v["result"]["obstruction"]["forced"], "b");
}

#[test]
fn index_counts_are_divisor_sums() {
    let o = run(&["zd", "--enumerate", "2", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows = body(&text);
    assert_eq!(rows[0], "index,count");
    for (n, row) in (1u64..).zip(&rows[1..]) {
        let sigma: u64 = (1..=n).filter(|a| n % a == 0).sum();
        assert_eq!(*row, format!("{n},{sigma}"));
    }
    assert_eq!(rows.len(), 13);
}

#[test]
fn witness_rows_are_nontrivial() {
    let o = run(&["witness", demo("cyclic_a.json").to_str().unwrap(), "--radius", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows = body(&text);
    assert_eq!(rows[0], "n,distance_exponent,exact,nontrivial");
    assert_eq!(rows.len(), 9);
    assert!(rows[1..].iter().all(|r| r.ends_with(",true")));
    let exponents: Vec<usize> = rows[1..].iter().map(|r| r.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(exponents.iter().enumerate().all(|(i, &e)| e > i + 1));
}

#[test]
fn reports_are_deterministic() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let o = run(&["--out", d.path().to_str().unwrap(), "transit", demo("single_pair.json").to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    for name in ["transit.json", "transit.md"] {
        let a = fs::read(dirs[0].path().join(name)).unwrap();
        assert_eq!(a, fs::read(dirs[1].path().join(name)).unwrap());
    }
}

#[test]
fn report_reads_convergence_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(&["--out", out, "witness", demo("lattice_2x3.json").to_str().unwrap()]).status.code(), Some(4));
    assert_eq!(run(&["--out", out, "witness", demo("lattice_line.json").to_str().unwrap()]).status.code(), Some(0));
    let o = run(&["report", dir.path().join("convergence.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("every term nontrivial: true"));
}

#[test]
fn error_taxonomy() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"context": {"kind": "free", "rank": 2}, "generators": ["c"]}"#).unwrap();
    let o = run(&["stallings", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "input");
    let o = run(&["stallings", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!((o.status.code(), error_kind(&o).as_str()), (Some(2), "io"));
    let o = run(&["--budget-vertices", "10", "schreier", demo("kernel_to_z.json").to_str().unwrap()]);
    assert_eq!((o.status.code(), error_kind(&o).as_str()), (Some(3), "budget"));
    let o = Command::new(env!("CARGO_BIN_EXE_chabauty-lab"))
        .args(["schreier", demo("kernel_to_z.json").to_str().unwrap()])
        .env("CHABAUTY_LAB_BUDGET", "vertices=10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["witness", demo("index_two.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn graph_commands_write_all_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "--out",
        out,
        "stallings",
        demo("rank_two.json").to_str().unwrap(),
        "--contains",
        "bab",
        "--with",
        demo("index_two.json").to_str().unwrap(),
        "--complete",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("stallings.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["memberships"][0]["member"], true);
    assert_eq!(v["result"]["completion"]["covering"], true);
    assert!(fs::read_to_string(dir.path().join("stallings.dot")).unwrap().contains("digraph"));
    let o = run(&[
        "--out",
        out,
        "--radius",
        "10",
        "schreier",
        demo("kernel_to_z.json").to_str().unwrap(),
        "--fibers",
        demo("preimage_2z.json").to_str().unwrap(),
        "--line",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("schreier.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["ends_estimate"], 2);
    assert_eq!(v["result"]["line"]["consistent_with"], "z");
    for f in ["schreier.dot", "growth.csv", "ends.csv", "schreier.md"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
}

#[test]
fn chabauty_and_folner() {
    let o = run(&["chabauty", demo("cyclic_a.json").to_str().unwrap(), demo("rank_two.json").to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["distance"]["exponent"], 3);
    assert_eq!(v["result"]["witness"], "bab");
    let o = run(&["chabauty", demo("cyclic_a.json").to_str().unwrap(), demo("lattice_2x3.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["folner", "--index", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"][0]["all_within"], true);
}

#[test]
fn suite_subset_passes() {
    let o = run(&["suite", "--only", "7", "--only", "8", "--only", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains("| pass |")).count(), 3);
    assert_eq!(run(&["suite", "--only", "11"]).status.code(), Some(2));
}
