use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use softcache::formats::{read_placement, read_runs, read_trace};

const SMALL: &str = r#"{
  "seed": 3,
  "catalog": {"kind": "zipf", "contents": 120, "alpha": 1.0},
  "contact": {"kind": "exponential", "users": 20, "cells": 6, "lambda": 0.002, "horizon": 20000},
  "ttl": [60, 300],
  "capacity": [3],
  "seeds": [1, 2, 3],
  "requests_per_seed": 400,
  "figures": {
    "density": {"degrees": [0, 2], "ttl": 300, "capacity": 3},
    "policy_bars": {"ttls": [300], "capacity": 3},
    "gain_grid": {
      "catalog": {"kind": "synthetic_related", "contents": 200, "alpha": 0.8, "links_per_content": 3,
                  "popular_share": 0.5, "zero_view_share": 0.03},
      "ttls": [60, 300],
      "capacities": [3]
    }
  }
}"#;

fn softcache(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softcache"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = softcache(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.json"), SMALL).unwrap();
    dir
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().into(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = setup();
    ok(dir.path(), &["sweep", "--config", "small.json", "--out", "a"]);
    ok(dir.path(), &["sweep", "--config", "small.json", "--out", "b"]);
    let a = files(&dir.path().join("a"));
    let b = files(&dir.path().join("b"));
    let names: Vec<_> = a.iter().map(|(n, _)| n.to_str().unwrap().to_string()).collect();
    for expected in ["density.csv", "policy_bars.csv", "gain_grid.csv", "manifest.json"] {
        assert!(names.iter().any(|n| n == expected), "{names:?}");
    }
    assert_eq!(a, b);
}

#[test]
fn seed_flag_changes_results_and_manifest() {
    let dir = setup();
    ok(dir.path(), &["simulate", "--config", "small.json", "--out", "a"]);
    ok(
        dir.path(),
        &["simulate", "--config", "small.json", "--seed", "4", "--out", "b"],
    );
    let a = fs::read_to_string(dir.path().join("a/manifest.json")).unwrap();
    let b = fs::read_to_string(dir.path().join("b/manifest.json")).unwrap();
    let ma: serde_json::Value = serde_json::from_str(&a).unwrap();
    let mb: serde_json::Value = serde_json::from_str(&b).unwrap();
    assert_eq!(ma["seed"], 3);
    assert_eq!(mb["seed"], 4);
    assert_ne!(ma["config_hash"], mb["config_hash"]);
    assert_ne!(
        fs::read(dir.path().join("a/runs.csv")).unwrap(),
        fs::read(dir.path().join("b/runs.csv")).unwrap()
    );
}

#[test]
fn manifest_hashes_match_outputs() {
    use sha2::{Digest, Sha256};
    let dir = setup();
    ok(dir.path(), &["solve", "--config", "small.json", "--out", "s"]);
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s/manifest.json")).unwrap()).unwrap();
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 3 * 2 + 1);
    for o in outputs {
        let bytes = fs::read(dir.path().join("s").join(o["file"].as_str().unwrap())).unwrap();
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(o["sha256"], hex.as_str());
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s/solve.json")).unwrap()).unwrap();
    for r in report.as_array().unwrap() {
        for field in ["objective", "rho", "iterations", "kkt_residual"] {
            assert!(r[field].is_number(), "{field}");
        }
    }
    let placement = fs::File::open(dir.path().join("s/placement_sch1_ttl300_q3.csv")).unwrap();
    let p = read_placement(placement, 6, 3).unwrap();
    assert_eq!(p.len(), 120);
    assert!(p.slots() <= 18);
}

#[test]
fn trace_round_trips_through_the_loader() {
    let dir = setup();
    ok(dir.path(), &["gen-trace", "--config", "small.json", "--out", "t"]);
    let text = fs::read_to_string(dir.path().join("t/trace.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap() == "time,user,cell,kind");
    let trace = read_trace(text.as_bytes()).unwrap();
    assert_eq!((trace.users(), trace.cells()), (20, 6));
    let mut again = Vec::new();
    softcache::formats::write_trace(&mut again, &trace).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), text);
}

#[test]
fn trace_file_feeds_simulation() {
    let dir = setup();
    ok(dir.path(), &["gen-trace", "--config", "small.json", "--out", "t"]);
    let cfg = SMALL.replace(
        r#"{"kind": "exponential", "users": 20, "cells": 6, "lambda": 0.002, "horizon": 20000}"#,
        r#"{"kind": "file", "path": "t/trace.csv"}"#,
    );
    fs::write(dir.path().join("from_file.json"), cfg).unwrap();
    ok(dir.path(), &["simulate", "--config", "small.json", "--out", "a"]);
    ok(dir.path(), &["simulate", "--config", "from_file.json", "--out", "b"]);
    assert_eq!(
        fs::read(dir.path().join("a/runs.csv")).unwrap(),
        fs::read(dir.path().join("b/runs.csv")).unwrap()
    );
}

#[test]
fn ingest_and_report() {
    let dir = setup();
    fs::write(dir.path().join("edges.txt"), "# crawl\nv1 v2\nv2 v3\nv4 v5\nv3 v1\n").unwrap();
    fs::write(dir.path().join("pop.txt"), "v1 10\nv2 5\nv3 1\nv4 7\nv5 0\n").unwrap();
    ok(
        dir.path(),
        &[
            "ingest",
            "--edges",
            "edges.txt",
            "--popularity",
            "pop.txt",
            "--out",
            "i",
        ],
    );
    let ids = fs::read_to_string(dir.path().join("i/ids.csv")).unwrap();
    assert_eq!(ids, "id,index\nv1,0\nv2,1\nv3,2\n");
    let graph: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("i/graph.json")).unwrap()).unwrap();
    assert_eq!(graph["symmetric"], true);
    assert_eq!(graph["components"], 1);

    ok(dir.path(), &["simulate", "--config", "small.json", "--out", "s"]);
    ok(dir.path(), &["report", "--runs", "s/runs.csv", "--out", "r"]);
    let gains = fs::read_to_string(dir.path().join("r/gains.csv")).unwrap();
    assert!(gains.starts_with("ttl,capacity,policy,seeds,hit_none"));
    assert_eq!(gains.lines().count(), 1 + 2 * 3);
    let runs = read_runs(fs::File::open(dir.path().join("s/runs.csv")).unwrap()).unwrap();
    assert_eq!(runs.len(), 2 * 3 * 3 * 3);
}

#[test]
fn failures_exit_nonzero_with_stage_tag() {
    let dir = setup();
    let cases: [(&[&str], &str); 4] = [
        (&["simulate", "--config", "missing.json"], "[config]"),
        (
            &["ingest", "--edges", "nope.txt", "--popularity", "nope.txt"],
            "[ingest]",
        ),
        (&["report", "--runs", "nope.csv"], "[report]"),
        (&["solve", "--config", "bad.json"], "[config]"),
    ];
    fs::write(dir.path().join("bad.json"), r#"{"capacity": []}"#).unwrap();
    for (args, tag) in cases {
        let out = softcache(dir.path(), args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(tag), "{args:?}: {err}");
    }
}

#[test]
fn unmatched_runs_are_a_report_error() {
    let dir = setup();
    fs::write(
        dir.path().join("runs.csv"),
        "ttl,mode,policy,seed,requests,full_hits,soft_hits,misses,utility,expensive_accesses\n\
         60,none,base,1,10,5,0,5,5,5\n60,sch1,base,2,10,6,0,4,6,4\n",
    )
    .unwrap();
    let out = softcache(dir.path(), &["report", "--runs", "runs.csv", "--out", "r"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[report]") && err.contains("unmatched"), "{err}");
}

#[test]
fn generators_write_their_files() {
    let dir = setup();
    ok(dir.path(), &["gen-catalog", "--config", "small.json", "--out", "c"]);
    ok(dir.path(), &["gen-graph", "--config", "small.json", "--out", "g"]);
    let pop = fs::read_to_string(dir.path().join("c/popularity.txt")).unwrap();
    assert_eq!(pop.lines().count(), 120);
    let edges = fs::read_to_string(dir.path().join("g/edges.txt")).unwrap();
    assert!(edges.lines().all(|l| l.split(' ').count() == 2));
    // The edge and popularity files feed straight back into ingest.
    ok(
        dir.path(),
        &[
            "ingest",
            "--edges",
            "g/edges.txt",
            "--popularity",
            "g/popularity.txt",
            "--out",
            "i",
        ],
    );
}
