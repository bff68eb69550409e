use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gmkp::io::write_instance;
use gmkp::Instance;
use serde_json::Value;

fn gmkp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmkp"))
        .args(args)
        .env_remove("GMKP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = gmkp(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Twelve groups on three knapsacks of capacity 20.
fn twelve_groups(dir: &Path) -> PathBuf {
    let groups = vec![
        (9, vec![5, 4]),
        (7, vec![7]),
        (12, vec![6, 6]),
        (4, vec![3, 1]),
        (10, vec![8, 2]),
        (6, vec![6]),
        (11, vec![9, 2]),
        (3, vec![3]),
        (8, vec![4, 4]),
        (5, vec![5]),
        (13, vec![11, 3]),
        (2, vec![2]),
    ];
    let file = dir.join("twelve.json");
    write_instance(&file, &Instance::from_groups(vec![20, 20, 20], groups)).unwrap();
    file
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    rows.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
    rows
}

#[test]
fn generate_writes_files_and_manifest_deterministically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        ok(&["generate", "--count", "3", "--seed", "7", "--reward-scheme", "R2", "--max-knapsacks", "4", "--out", path(dir.path())]);
    }
    for name in ["inst_7_0.json", "inst_7_1.json", "inst_7_2.json", "manifest.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    assert_eq!(fs::read_dir(a.path()).unwrap().count(), 4);
    let manifest: Value = serde_json::from_slice(&fs::read(a.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema"], "gmkp-manifest/1");
    assert_eq!(manifest["reward_scheme"], "R2");
    assert_eq!(manifest["instances"].as_array().unwrap().len(), 3);
}

#[test]
fn solve_reports_metrics_and_timings() {
    let dir = tempfile::tempdir().unwrap();
    let file = twelve_groups(dir.path());
    let v: Value = serde_json::from_str(&ok(&["solve", path(&file), "--algo", "3mkp", "--swap-opt"])).unwrap();
    assert_eq!(v["schema"], "gmkp-result/1");
    assert_eq!(v["algorithm"], "3mkp");
    assert!(v["reward"].as_u64().unwrap() > 0);
    assert!(v["max_exceeded"].is_i64());
    assert_eq!(v["swap_opt_applied"], true);
    for stage in ["selection_ms", "assignment_ms", "swap_opt_ms", "total_ms"] {
        assert!(v["timings"][stage].is_f64(), "{stage}");
    }
}

#[test]
fn out_dir_variable_is_the_default_destination() {
    let dir = tempfile::tempdir().unwrap();
    let file = twelve_groups(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_gmkp"))
        .args(["solve", path(&file), "--algo", "kp"])
        .env("GMKP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&fs::read(dir.path().join("twelve_kp.json")).unwrap()).unwrap();
    assert_eq!(v["algorithm"], "kp");
}

#[test]
fn best_is_tagged_with_the_winner() {
    let dir = tempfile::tempdir().unwrap();
    let file = twelve_groups(dir.path());
    let v: Value = serde_json::from_str(&ok(&["solve", path(&file), "--algo", "best"])).unwrap();
    let tag = v["algorithm"].as_str().unwrap();
    assert!(tag.starts_with("best(") && tag.ends_with(')'), "{tag}");
}

#[test]
fn threshold_list_reproduces_hundred_mkp() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen");
    ok(&["generate", "--count", "1", "--seed", "3", "--max-knapsacks", "3", "--max-load", "2", "--out", path(&gen)]);
    let file = gen.join("inst_3_0.json");
    let list: Vec<String> = (2..=100).map(|q| format!("100/{q}")).collect();
    let d: Value = serde_json::from_str(&ok(&["solve", path(&file), "--algo", "mkpd", "--d-set", &list.join(",")])).unwrap();
    let q: Value = serde_json::from_str(&ok(&["solve", path(&file), "--algo", "100mkp"])).unwrap();
    for field in ["selection", "reward", "max_exceeded", "loads"] {
        assert_eq!(d[field], q[field], "{field}");
    }
}

#[test]
fn feasible_result_fits() {
    let dir = tempfile::tempdir().unwrap();
    let file = twelve_groups(dir.path());
    let v: Value = serde_json::from_str(&ok(&["feasible", path(&file), "--algo", "2mkp"])).unwrap();
    assert_eq!(v["feasible"], true);
    assert!(v["max_exceeded"].as_i64().unwrap() <= 0);
}

#[test]
fn sweep_emits_eleven_rows_with_frontier_flags() {
    let dir = tempfile::tempdir().unwrap();
    let file = twelve_groups(dir.path());
    let rows = csv_rows(&ok(&["sweep", path(&file), "--algo", "2mkp"]));
    let header = &rows[0];
    for col in ["schema", "factor", "reward", "max_exceeded", "dominated"] {
        assert!(header.iter().any(|h| h == col), "{col}");
    }
    assert_eq!(rows.len(), 12);
    let dominated = header.iter().position(|h| h == "dominated").unwrap();
    assert!(rows[1..].iter().any(|r| r[dominated] == "false"));
}

#[test]
fn exact_bounds_every_feasible_solve() {
    let dir = tempfile::tempdir().unwrap();
    let file = twelve_groups(dir.path());
    let exact: Value = serde_json::from_str(&ok(&["exact", path(&file)])).unwrap();
    assert_eq!(exact["schema"], "gmkp-exact/1");
    let v_star = exact["optimum"].as_u64().unwrap();
    for algo in ["lp", "kp", "2mkp", "3mkp", "100mkp", "mkp-prime"] {
        let r: Value = serde_json::from_str(&ok(&["solve", path(&file), "--algo", algo, "--swap-opt"])).unwrap();
        if r["feasible"] == true {
            assert!(r["reward"].as_u64().unwrap() <= v_star, "{algo}");
        }
        assert!(r["reward"].as_u64().unwrap() >= v_star, "{algo} below the optimum");
    }
    let f: Value = serde_json::from_str(&ok(&["feasible", path(&file)])).unwrap();
    assert!(f["reward"].as_u64().unwrap() <= v_star);
}

#[test]
fn bench_is_identical_serial_and_parallel() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen");
    ok(&["generate", "--count", "4", "--seed", "11", "--max-knapsacks", "4", "--max-load", "2", "--out", path(&gen)]);
    let run = |workers: &str| {
        let summary = dir.path().join(format!("summary_{workers}.csv"));
        let rows = csv_rows(&ok(&[
            "bench", path(&gen), "--algos", "kp,2mkp,3mkp", "--workers", workers, "--summary", path(&summary),
        ]));
        let time = rows[0].iter().position(|h| h == "time_ms").unwrap();
        let rows: Vec<Vec<String>> = rows
            .into_iter()
            .map(|mut r| {
                r.remove(time);
                r
            })
            .collect();
        (rows, fs::read_to_string(summary).unwrap())
    };
    let (serial, summary) = run("1");
    let (parallel, _) = run("4");
    assert_eq!(serial.len(), 1 + 4 * 3);
    assert_eq!(serial, parallel);
    assert!(summary.lines().next().unwrap().contains("p99"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(gmkp(&["solve", path(&missing)]).status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = gmkp(&["solve", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));

    let file = twelve_groups(dir.path());
    assert_eq!(gmkp(&["exact", path(&file), "--budget", "1"]).status.code(), Some(3));
    assert_eq!(gmkp(&["solve", path(&file), "--algo", "nope"]).status.code(), Some(2));
}
