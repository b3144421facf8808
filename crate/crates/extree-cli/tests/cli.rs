use std::path::Path;
use std::process::{Command, Output};

fn extree(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extree")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn complete_graph_file(dir: &Path, n: usize) -> String {
    let mut s = format!("{n} {}\n", n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            s += &format!("{u} {v}\n");
        }
    }
    let p = dir.join(format!("k{n}.txt"));
    std::fs::write(&p, s).unwrap();
    p.display().to_string()
}

fn config(dir: &Path, text: &str) -> String {
    let p = dir.join("exp.conf");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn experiment_writes_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "host_n = 200..240\ntree = caterpillar\ntree_every = 5\ntrials = 3\n");
    let out = dir.path().join("out");
    let o = extree(&["experiment", "--config", &cfg, "--seed", "5", "--out", out.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("trials.csv")).unwrap();
    assert!(csv.starts_with("trial,seed,case,n,d,delta,success,verified,millis\n"));
    assert_eq!(csv.lines().count(), 4);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["aggregate"]["trials"], 3);
}

#[test]
fn experiment_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "host_n = 200\ntrials = 2\n");
    let a = extree(&["experiment", "--config", &cfg, "--seed", "9"], dir.path());
    let b = extree(&["experiment", "--config", &cfg, "--seed", "9"], dir.path());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn embed_prints_ordered_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "host_n = 220\ntree = pendant\ntree_every = 4\n");
    let o = extree(&["embed", "--config", &cfg, "--seed", "3"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    let pos: Vec<usize> = ["\"case\"", "\"seed\"", "\"phases\"", "\"map\"", "\"verified\""].iter().map(|k| s.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["case"], "CASE_C");
    assert_eq!(v["verified"], true);
}

#[test]
fn strict_embed_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "host_n = 200\n");
    let o = extree(&["embed", "--config", &cfg, "--mode", "strict"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fails"));
}

#[test]
fn cover_on_complete_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = complete_graph_file(dir.path(), 30);
    let o = extree(&["cover", "--graph", &g, "--pairs", "0-1,2-3,4-5", "--ell", "10"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verified"], true);
    assert_eq!(v["paths"].as_array().unwrap().len(), 3);
    // 3 paths on 10 vertices use 30 vertices: the arithmetic must match.
    let bad = extree(&["cover", "--graph", &g, "--pairs", "0-1,2-3,4-5", "--ell", "11"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn certify_complete_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = complete_graph_file(dir.path(), 17);
    let out = dir.path().join("c");
    let o = extree(&["certify", "--graph", &g, "--out", out.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("certificate.json")).unwrap()).unwrap();
    let kinds: Vec<&str> = v["certificates"].as_array().unwrap().iter().map(|c| c["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["eigenvalue-route", "exact"]);
    // K_17 has λ = 1, so the eigenvalue route claims d/(2λ) = 8.
    let d = v["certificates"][0]["claim"]["d"].as_f64().unwrap();
    assert!((d - 8.0).abs() < 1e-9, "{d}");
}

#[test]
fn decompose_reports_case() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "tree = path\n");
    let o = extree(&["decompose", "--config", &cfg, "--n", "300"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["case"], "CASE_A");
    assert_eq!(v["levels"]["sizes"], serde_json::json!([300, 298, 296, 294]));
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "colour = blue\n");
    let o = extree(&["experiment", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));
}
