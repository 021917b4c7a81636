use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn splitflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    let text = std::fs::read_to_string(dir.join("report.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap())
        .collect()
}

fn repo_file(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn ramp_split_has_zero_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ramp");
    let o = splitflow(&[
        "split",
        "--family",
        "ramp",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["result"]["residual"], 0);
    assert_eq!(r["result"]["sf_total"], 2);
    // stdout carries the same report.
    let printed: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed, r);
}

#[test]
fn aps_compare_writes_decay_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("decay");
    let o = splitflow(&[
        "aps-compare",
        "--spectrum",
        &repo_file("configs/circle_k64.json"),
        "--f-pairs",
        "1,4,9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["stabilizes"], true);
    assert_eq!(r["rank_bound"], 6);
    assert_eq!(r["rank_bound_holds"], true);
    let table = rows(&out.join("decay.csv"));
    let ks: std::collections::BTreeSet<&str> = table.iter().map(|r| r.get(0).unwrap()).collect();
    assert_eq!(
        ks.into_iter().collect::<Vec<_>>(),
        ["128", "16", "32", "64"]
    );
    // One row per singular value: 2K of them at each order.
    assert_eq!(table.len(), 2 * (16 + 32 + 64 + 128));
}

#[test]
fn invalid_config_is_a_usage_error_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"command": "maslov", "seed": 1, "paths": 3, "out": {:?}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = splitflow(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown field `paths`"));
    assert!(!out.exists());

    let o = splitflow(&["reduce", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn solver_failure_leaves_a_failure_record() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("short.json");
    std::fs::write(
        &spec,
        r#"{"K": 2, "entries": [[1, 1.0], [-1, -1.0], [2, 2.0], [-2, -2.0]]}"#,
    )
    .unwrap();
    let out = dir.path().join("fail");
    let o = splitflow(&[
        "aps-compare",
        "--spectrum",
        spec.to_str().unwrap(),
        "--orders",
        "2,4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["status"], "error");
    assert_eq!(r["failure"]["kind"], "invalid-input");
    assert!(r["failure"]["message"]
        .as_str()
        .unwrap()
        .contains("cannot be extended"));
}

#[test]
fn same_seed_gives_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = splitflow(&[
            "sweep",
            "--verification",
            "maslov",
            "--seed",
            "99",
            "--count",
            "24",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        (
            std::fs::read(out.join("paths.csv")).unwrap(),
            std::fs::read(out.join("report.json")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn fifty_instance_split_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = splitflow(&[
        "sweep",
        "--verification",
        "split",
        "--seed",
        "2024",
        "--count",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let table = rows(&out.join("instances.csv"));
    assert_eq!(table.len(), 50);
    assert!(table.iter().all(|r| &r[4] == "0" && &r[6] == "pass"));
    let rejected: usize = table.iter().map(|r| r[5].parse::<usize>().unwrap()).sum();
    assert!(rejected > 0, "this seed draws a few degenerate families");
    assert_eq!(report(&out)["rejections"], rejected);
    assert_eq!(rows(&out.join("timings.csv")).len(), 50);
}

#[test]
fn reduce_runs_from_config_with_relative_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("spec.json"),
        r#"{"K": 16, "N0": 1, "law": "linear"}"#,
    )
    .unwrap();
    let cfg = dir.path().join("reduce.json");
    std::fs::write(
        &cfg,
        r#"{"command": "reduce", "seed": 4, "count": 6, "spectrum": "spec.json", "out": "res"}"#,
    )
    .unwrap();
    let o = splitflow(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = rows(&dir.path().join("res/reductions.csv"));
    assert_eq!(table.len(), 6);
    assert!(table.iter().all(|r| &r[4] == "0"));
}

#[test]
fn asymmetry_of_mirrored_family_vanishes() {
    let o = splitflow(&[
        "asymmetry",
        "--family",
        "mirrored",
        "--seed",
        "3",
        "--t",
        "0.4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["symmetric"], true);
    assert_eq!(r["result"]["value"], 0);
}

#[test]
fn left_closed_convention_is_selectable() {
    let o = splitflow(&[
        "aps-split",
        "--family",
        "random-loop",
        "--seed",
        "12",
        "--convention",
        "left-closed",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["convention"], "left-closed");
    assert_eq!(r["result"]["hormander_minus"], 0);
    assert_eq!(r["result"]["hormander_plus"], 0);
}
