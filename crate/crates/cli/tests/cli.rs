//! Drives the `vw` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn vw(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vw"));
    cmd.args(args).env_remove("VW_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("VW_CACHE_DIR", dir);
    }
    cmd.output().expect("run vw")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn rank_one_refined_series() {
    let out = vw(&["compute-q", "--surface", "p2", "--rank", "1", "--nmax", "2", "--mode", "refined"], None);
    let v = json(&out);
    let terms = &v["runs"][0]["series"]["terms"];
    assert_eq!(terms[1][2], "(1 + 1*v^2 + 1*v^4)/(1*v^2)");
    assert_eq!(terms[2][2], "(1 + 2*v^2 + 3*v^4 + 2*v^6 + 1*v^8)/(1*v^4)");
}

#[test]
fn trivial_rank_two_at_zero() {
    let out = vw(&["compute-q", "--surface", "p1xp1", "--rank", "2", "--beta", "trivial", "--nmax", "0", "--mode", "both"], None);
    let v = json(&out);
    for run in v["runs"].as_array().unwrap() {
        assert_eq!(run["records"][0]["value"], "(1)/(1)");
    }
}

#[test]
fn reruns_are_byte_identical_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compute-q", "--surface", "p2", "--rank", "2", "--beta", "K", "--nmax", "2", "--mode", "both"];
    let first = vw(&args, Some(dir.path()));
    assert!(first.status.success());
    let entries = walk(dir.path());
    assert_eq!(entries, 12);
    let second = vw(&args, Some(dir.path()));
    assert_eq!(first.stdout, second.stdout);
    let uncached = vw(&[&args[..], &["--no-cache", "--workers", "1"]].concat(), None);
    assert_eq!(first.stdout, uncached.stdout);
}

fn walk(p: &Path) -> usize {
    let mut n = 0;
    for e in std::fs::read_dir(p).unwrap().flatten() {
        if e.path().is_dir() {
            n += walk(&e.path());
        } else if e.path().extension().is_some_and(|x| x == "json") {
            n += 1;
        }
    }
    n
}

#[test]
fn csv_output() {
    let out = vw(&["compute-q", "--surface", "p2", "--nmax", "1", "--mode", "unrefined", "--format", "csv"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("section,name,exponent,coefficient"));
    assert!(text.contains("series,unrefined,1,(3)/(1)"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "surface = p1xp1\nnmax = 1\nmode = unrefined\nseed = 17\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&vw(&["compute-q", "--config", c], None));
    assert_eq!(v["config"]["surface"], "p1xp1");
    assert_eq!(v["config"]["seed"], 17);
    assert_eq!(v["runs"][0]["series"]["terms"][1][2], "(4)/(1)");
    let v = json(&vw(&["compute-q", "--config", c, "--surface", "p2", "--seed", "3"], None));
    assert_eq!(v["config"]["surface"], "p2");
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["runs"][0]["series"]["terms"][1][2], "(3)/(1)");
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(vw(&["compute-q", "--surface", "p3"], None).status.code(), Some(2));
    assert_eq!(vw(&["compute-q", "--surface", "p2", "--rank", "2", "--beta", "K;K"], None).status.code(), Some(2));
    assert_eq!(vw(&["extract", "--rank", "2"], None).status.code(), Some(2));
    assert_eq!(vw(&["verify", "--k3", "--theorem-bprime"], None).status.code(), Some(2));
}

#[test]
fn extract_zero_depth() {
    let v = json(&vw(&["extract", "--rank", "3", "--nmax", "0"], None));
    let entries = v["extraction"]["universal"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 7);
    for e in entries {
        assert_eq!(e["series"]["terms"], serde_json::json!([[0, 1, "(1)/(1)"]]));
    }
    assert_eq!(v["assembled"]["c"].as_array().unwrap().len(), 3);
}

#[test]
fn k3_identity() {
    let out = vw(&["verify", "--k3", "--rank", "2", "--order", "6"], None);
    let v = json(&out);
    assert_eq!(v["report"]["all_congruent"], true);
}

#[test]
fn verify_from_file_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    let out = vw(&["extract", "--rank", "2", "--nmax", "2", "--output", path.to_str().unwrap()], None);
    assert!(out.status.success());
    let ok = vw(&["verify", "--conjecture", "gk-rank2", "--order", "3", "--input", path.to_str().unwrap()], None);
    assert_eq!(ok.status.code(), Some(0));
    let assembled = vw(&["assemble", "--input", path.to_str().unwrap()], None);
    let a = json(&assembled);
    assert_eq!(a["rank"], 2);

    // perturb the q-coefficient of the K² series
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let entries = v["extraction"]["universal"]["entries"].as_array_mut().unwrap();
    let k2 = entries.iter_mut().find(|e| e["label"] == "K^2").unwrap();
    k2["series"]["terms"][1][2] = Value::String("(7)/(1)".into());
    std::fs::write(&path, serde_json::to_vec(&v).unwrap()).unwrap();
    let bad = vw(&["verify", "--conjecture", "gk-rank2", "--order", "3", "--input", path.to_str().unwrap()], None);
    assert_eq!(bad.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&bad.stdout).unwrap();
    let b = report["report"]["series"].as_array().unwrap().iter().find(|s| s["name"] == "B").unwrap().clone();
    assert_eq!(b["first_mismatch"]["relative_exponent"], "1");
    // too shallow for the requested order
    let shallow = vw(&["verify", "--conjecture", "gk-rank2", "--order", "5", "--input", path.to_str().unwrap()], None);
    assert_eq!(shallow.status.code(), Some(1));
}

#[test]
fn theorem_bprime_rank_two() {
    let out = vw(&["verify", "--theorem-bprime", "--rank", "2", "--order", "3"], None);
    assert_eq!(json(&out)["report"]["all_congruent"], true);
}

#[test]
fn cache_gc_drops_corrupt_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = vw(&["compute-q", "--surface", "p2", "--nmax", "1", "--cache-dir", dir.path().to_str().unwrap()], None);
    assert!(out.status.success());
    let shard = std::fs::read_dir(dir.path().join("v1")).unwrap().flatten().next().unwrap().path();
    let entry = std::fs::read_dir(&shard).unwrap().flatten().next().unwrap().path();
    std::fs::write(&entry, "{").unwrap();
    let v = json(&vw(&["cache-gc", "--cache-dir", dir.path().to_str().unwrap()], None));
    assert_eq!(v["corrupt"], 1);
    assert_eq!(v["kept"], 1);
    assert_eq!(vw(&["cache-gc"], None).status.code(), Some(2));
}
