use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dedekind(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dedekind"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn compute_methods() {
    let out = dedekind(&["compute", "--method", "bruteforce", "--n", "3"]);
    assert!(out.status.success());
    assert_eq!(report(&out)["result"], "20");

    let out = dedekind(&["compute", "--method", "nplus2", "--n", "5"]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r["result"], "2414682040998");
    assert_eq!(r["terms"], "7828354");
    assert_eq!(r["method"], "nplus2");

    let out = dedekind(&["compute", "--method", "consistency", "--n", "6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["result"], "7828354");
}

#[test]
fn exit_codes() {
    assert_eq!(dedekind(&["compute", "--method", "nplus3", "--n", "4"]).status.code(), Some(3));
    assert_eq!(
        dedekind(&["compute", "--method", "nplus2", "--n", "2", "--limit", "nplus2=1"]).status.code(),
        Some(3)
    );
    assert_eq!(
        dedekind(&["pcoef", "--n", "2", "--alpha", "{}", "--beta", "{1,12}"]).status.code(),
        Some(2)
    );
    assert_eq!(dedekind(&["compute", "--method", "nplus2", "--n", "1", "--workers", "0"]).status.code(), Some(2));
    assert_eq!(dedekind(&["compute", "--method", "nope", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn tables_and_classes() {
    let out = dedekind(&["tables"]);
    assert!(out.status.success());
    assert_eq!(report(&out)["ok"], true);
    let out = dedekind(&["classes", "--n", "4", "--summary"]);
    assert_eq!(report(&out)["count"], 30);
    let out = dedekind(&["oracle-check", "--n", "1", "--r", "2,3,4"]);
    assert!(out.status.success());
}

fn compute_with_checkpoint(n: &str, path: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "compute",
        "--method",
        "nplus2",
        "--n",
        n,
        "--workers",
        "3",
        "--checkpoint",
        path.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    dedekind(&args)
}

#[test]
fn checkpoint_interrupt_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.ndjson");

    let out = compute_with_checkpoint("4", &path, &["--stop-after-shards", "84"]);
    assert_eq!(out.status.code(), Some(1));
    let lines = std::fs::read_to_string(&path).unwrap().lines().count();
    assert_eq!(lines, 84);

    // a different run must not pick these records up
    let out = compute_with_checkpoint("3", &path, &[]);
    assert_eq!(out.status.code(), Some(2));

    // simulate a torn final write
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("{\"shard_id\": 9");
    std::fs::write(&path, text).unwrap();

    let out = compute_with_checkpoint("4", &path, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["result"], "7828354");
    assert_eq!(r["resumed_shards"], 84);
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 168);

    let empty = dir.path().join("empty.ndjson");
    std::fs::write(&empty, "").unwrap();
    let out = compute_with_checkpoint("4", &empty, &[]);
    let r = report(&out);
    assert_eq!(r["result"], "7828354");
    assert_eq!(r["resumed_shards"], 0);
}
