mod common;

use std::fs;
use std::process::{Command, Output};

fn refmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refmap"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

#[test]
fn all_then_noop() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::bundled_toml();
    let args = [
        "-c",
        cfg.to_str().unwrap(),
        "--workdir",
        dir.path().to_str().unwrap(),
        "all",
    ];
    let out = refmap(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let first = common::outputs(dir.path());
    assert_eq!(first, common::read_tree(&common::golden_dir()));

    let out = refmap(&["-v", args[0], args[1], args[2], args[3], args[4]]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("up to date"));
}

#[test]
fn stage_out_of_order_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::bundled_toml();
    let out = refmap(&[
        "-c",
        cfg.to_str().unwrap(),
        "--workdir",
        dir.path().to_str().unwrap(),
        "report",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ingest/memos.jsonl"), "{stderr}");
    assert!(stderr.contains("run `ingest` first"), "{stderr}");
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("refmap.toml");
    fs::write(&path, "[paths]\ncorpus = 3\n").unwrap();
    let out = refmap(&["-c", path.to_str().unwrap(), "ingest"]);
    assert_eq!(out.status.code(), Some(2));

    let out = refmap(&["-c", dir.path().join("absent.toml").to_str().unwrap(), "ingest"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(common::bundled_toml()).unwrap() + "\n[extra]\nx = 1\n";
    let path = dir.path().join("refmap.toml");
    fs::write(&path, text).unwrap();
    let out = refmap(&["-c", path.to_str().unwrap(), "ingest"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_single_memo() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::bundled_toml();
    let base = ["-c", cfg.to_str().unwrap(), "--workdir", dir.path().to_str().unwrap()];
    assert!(refmap(&[&base[..], &["all"]].concat()).status.success());
    let out = refmap(&[&base[..], &["report", "--memo", "CAG-00085R"]].concat());
    assert!(out.status.success());
    assert!(dir.path().join("report/sankey/CAG-00085R.svg").is_file());
    assert!(!dir.path().join("report/sankey/CAG-00431N.svg").exists());
}
