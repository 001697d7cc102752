use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_schursample"));
    c.env_clear();
    c
}

struct Files {
    dir: tempfile::TempDir,
}

impl Files {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

const TRIANGLE: &str = "# weighted triangle\n0 1 1\n1 2 2\n2 0 3\n";

fn k4() -> String {
    let mut s = String::new();
    for i in 0..4 {
        for j in i + 1..4 {
            s.push_str(&format!("{i} {j} 1\n"));
        }
    }
    s
}

fn path_graph(n: usize) -> String {
    (1..n).map(|i| format!("{} {} 1\n", i - 1, i)).collect()
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn args(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn triangle_single_tree() {
    let f = Files::new();
    let g = f.write("g.txt", TRIANGLE);
    let o = run(bin().args(["sample", args(&g), "--trees", "1", "--seed", "7"]));
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    let v: Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 2);
    assert_eq!(v["seed"], 7);
    assert!(v["climb_hist"].is_array());
    assert!(v["root_fallbacks"].is_u64());
    let keys: Vec<&str> = text.split('"').skip(1).step_by(2).filter(|k| k.chars().all(|c| c == '_' || c.is_ascii_lowercase())).collect();
    assert_eq!(keys, vec!["edges", "seed", "climb_hist", "root_fallbacks"]);
}

#[test]
fn sample_is_reproducible_and_thread_independent() {
    let f = Files::new();
    let g = f.write("g.txt", &k4());
    let a = run(bin().args(["sample", args(&g), "--trees", "40", "--seed", "11"]));
    let b = run(bin().args(["sample", args(&g), "--trees", "40", "--seed", "11", "--threads", "3"]));
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<Value> = stdout(&a).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    for (i, l) in lines.iter().enumerate() {
        assert_eq!(l["seed"].as_u64().unwrap(), 11 ^ i as u64);
    }
    let c = run(bin().args(["sample", args(&g), "--trees", "40", "--seed", "12"]));
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn env_overrides_flags() {
    let f = Files::new();
    let g = f.write("g.txt", &k4());
    let a = run(bin().args(["sample", args(&g), "--trees", "5", "--seed", "99"]));
    let b = run(bin().args(["sample", args(&g)]).env("SCHURSAMPLE_SEED", "99").env("SCHURSAMPLE_TREES", "5"));
    assert_eq!(a.stdout, b.stdout);
    let d = run(bin().args(["sample", args(&g), "--trees", "1"]));
    let v: Value = serde_json::from_str(stdout(&d).trim()).unwrap();
    assert_eq!(v["seed"], 0xC0FFEE);
}

#[test]
fn exact_k4_trees_validate() {
    let f = Files::new();
    let g = f.write("g.txt", &k4());
    let trees = run(bin().args(["sample", args(&g), "--trees", "32000", "--eps-mode", "exact"]));
    assert!(trees.status.success());
    let mut child = bin()
        .args(["validate", args(&g)])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&trees.stdout).unwrap();
    let o = child.wait_with_output().unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["trees"], 32000);
    assert_eq!(v["distribution"]["dof"], 15);
    assert!(v["distribution"]["pass"].as_bool().unwrap(), "{v}");
    assert!(o.status.success());
}

#[test]
fn biased_trees_fail_validation() {
    let f = Files::new();
    let g = f.write("g.txt", TRIANGLE);
    let trees = f.write("t.jsonl", &"{\"edges\":[1,2]}\n".repeat(3000));
    let o = run(bin().args(["validate", args(&g), args(&trees)]));
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], false);
    let bad = f.write("bad.jsonl", "{\"edges\":[0]}\n");
    let o = run(bin().args(["validate", args(&g), args(&bad)]));
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["invalid_trees"], 1);
}

#[test]
fn reff_path_endpoints() {
    let f = Files::new();
    let g = f.write("p.txt", &path_graph(100));
    let pairs = f.write("pairs.txt", "0 99\n");
    let o = run(bin().args(["reff", args(&g), args(&pairs), "--eps", "0.1"]));
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = v[0]["reff"].as_f64().unwrap();
    assert!((89.6..=109.4).contains(&r), "{r}");
    assert_eq!((v[0]["u"].as_u64(), v[0]["v"].as_u64()), (Some(0), Some(99)));
}

#[test]
fn reff_empty_and_duplicate_pairs() {
    let f = Files::new();
    let g = f.write("g.txt", &k4());
    let empty = f.write("e.txt", "# nothing\n");
    let o = run(bin().args(["reff", args(&g), args(&empty)]));
    assert!(o.status.success());
    assert_eq!(serde_json::from_slice::<Value>(&o.stdout).unwrap(), Value::Array(vec![]));
    let dup = f.write("d.txt", "0 1\n0 1\n");
    let o = run(bin().args(["reff", args(&g), args(&dup), "--exact"]));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    for row in v.as_array().unwrap() {
        assert!((row["reff"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn schur_exact_of_path_middle() {
    let f = Files::new();
    let g = f.write("g.txt", "10 20 1\n20 30 1\n");
    let keep = f.write("k.txt", "10\n30\n");
    let o = run(bin().args(["schur", args(&g), args(&keep), "--exact"]));
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 1);
    let f3: Vec<&str> = lines[0].split_whitespace().collect();
    assert_eq!((f3[0], f3[1]), ("10", "30"));
    assert!((f3[2].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn schur_output_is_a_graph_file() {
    let f = Files::new();
    let g = f.write("g.txt", &k4());
    let keep = f.write("k.txt", "0\n1\n2\n");
    let out = f.dir.path().join("s.txt");
    let o = run(bin().args(["schur", args(&g), args(&keep), "--eps", "0.25", "-o", args(&out)]));
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let pairs = f.write("p.txt", "0 1\n");
    let o = run(bin().args(["reff", args(&out), args(&pairs), "--exact"]));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = v[0]["reff"].as_f64().unwrap();
    assert!((r / 0.5).ln().abs() <= 0.25, "{r}");
}

#[test]
fn bench_report_shape() {
    let o = run(bin().args(["bench", "--sizes", "8,12", "--trees", "2"]));
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 4);
    let modes: Vec<&str> = runs.iter().map(|r| r["mode"].as_str().unwrap()).collect();
    assert_eq!(modes, vec!["exact", "auto", "exact", "auto"]);
    for r in runs {
        assert_eq!(r["node_bound_ok"], true);
        assert!(r.get("wall_ms").is_none());
    }
    let o = run(bin().args(["bench", "--sizes", "8", "--trees", "1", "--timings"]));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["runs"][0]["wall_ms"].is_f64());
}

#[test]
fn exit_codes() {
    let f = Files::new();
    let g = f.write("g.txt", TRIANGLE);
    let garbage = f.write("bad.txt", "0 1 one\n");
    assert_eq!(run(bin().args(["sample", args(&garbage)])).status.code(), Some(2));
    let negative = f.write("neg.txt", "0 1 -1\n");
    assert_eq!(run(bin().args(["sample", args(&negative)])).status.code(), Some(2));
    let split = f.write("split.txt", "0 1 1\n2 3 1\n");
    let o = run(bin().args(["sample", args(&split)]));
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    let missing = f.write("m.txt", "0 7\n");
    assert_eq!(run(bin().args(["reff", args(&g), args(&missing)])).status.code(), Some(5));
    let same = f.write("s.txt", "1 1\n");
    assert_eq!(run(bin().args(["reff", args(&g), args(&same)])).status.code(), Some(5));
    assert_eq!(
        run(bin().args(["sample", args(&g), "--delta", "2"])).status.code(),
        Some(2)
    );
    assert_eq!(
        run(bin().args(["sample", f.dir.path().join("nope").to_str().unwrap()])).status.code(),
        Some(2)
    );
}
