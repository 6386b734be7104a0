mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn actnet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_actnet"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn with_fixture() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tweets.csv"), common::FIXTURE_CSV).unwrap();
    dir
}

#[test]
fn tokenize_show_spans() {
    let dir = tempfile::tempdir().unwrap();
    let o = actnet(&["tokenize", "--show-spans", "RT @makower: Ted @ UN #rio"], dir.path());
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "word\trt\t0\t2\nmention\tmakower\t3\t11\nword\tted\t13\t16\nword\tun\t19\t21\nhashtag\trio\t22\t26\n"
    );
    let o = actnet(&["tokenize", "--keep-location-at", "--no-rt-mentions", "RT @a x @ y"], dir.path());
    assert_eq!(stdout(&o), "word\trt\nword\tx\nword\tat\nword\ty\n");
}

#[test]
fn run_two_mode_writes_files_and_report() {
    let dir = with_fixture();
    let o = actnet(&["run", "tweets.csv", "--mode", "two-mode", "--out", "out/fx", "--seed", "3"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("lost"));
    let kv = fs::read_to_string(dir.path().join("out/fx_report.kv")).unwrap();
    assert!(kv.lines().any(|l| l == "lost_count=2"));
    assert!(kv.lines().any(|l| l == "whole_lcc=3"));
    assert!(dir.path().join("out/fx.svg").exists());
}

#[test]
fn export_only_requested_format() {
    let dir = with_fixture();
    let o = actnet(&["export", "tweets.csv", "--format", "csv", "--out", "e"], dir.path());
    assert!(o.status.success());
    assert!(dir.path().join("e_edges.csv").exists());
    assert!(!dir.path().join("e.net").exists());
}

#[test]
fn freq_matrix_graph_compare() {
    let dir = with_fixture();
    let o = actnet(&["freq", "tweets.csv"], dir.path());
    assert_eq!(stdout(&o), "#a\t2\n#b\t2\n#c\t1\n#d\t1\n@x\t2\n");
    let o = actnet(&["freq", "tweets.csv", "--min-hashtag", "2"], dir.path());
    assert_eq!(stdout(&o), "#a\t2\n#b\t2\n@x\t2\n");

    let o = actnet(&["matrix", "tweets.csv", "--block", "hashtag,mention"], dir.path());
    assert_eq!(stdout(&o), "#a\t@x\t2\n#b\t@x\t1\n");

    let o = actnet(&["graph", "tweets.csv", "--out", "g.net"], dir.path());
    assert!(o.status.success());
    let net = fs::read_to_string(dir.path().join("g.net")).unwrap();
    assert!(net.starts_with("*Vertices 5\n"));

    let o = actnet(&["compare", "tweets.csv", "--out", "cmp.kv"], dir.path());
    assert!(o.status.success());
    let kv = fs::read_to_string(dir.path().join("cmp.kv")).unwrap();
    assert!(kv.contains("lost=hashtag:c,hashtag:d\n"), "{kv}");

    let o = actnet(&["layout", "g.net", "--out", "laid.net", "--seed", "1"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let laid = fs::read_to_string(dir.path().join("laid.net")).unwrap();
    assert!(laid.lines().nth(1).unwrap().split(' ').count() == 4, "{laid}");
    assert!(dir.path().join("laid.clu").exists());
}

#[test]
fn ingest_filters() {
    let dir = with_fixture();
    let o = actnet(&["ingest", "tweets.csv", "--from", "2012-06-21", "--authors", "carol,dave"], dir.path());
    assert!(stdout(&o).contains("after_filter\t2\n"), "{}", stdout(&o));
    let o = actnet(&["ingest", "tweets.csv", "--lang", "nl"], dir.path());
    assert!(stdout(&o).contains("after_filter\t0\n"));
}

#[test]
fn exit_codes() {
    let dir = with_fixture();
    // usage errors
    assert_eq!(actnet(&["run", "tweets.csv", "--mode", "sideways"], dir.path()).status.code(), Some(2));
    assert_eq!(actnet(&["run", "tweets.csv", "--min-hashtag", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(actnet(&["run", "tweets.csv", "--text-col", "body"], dir.path()).status.code(), Some(2));
    assert_eq!(actnet(&["frobnicate"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("bad.toml"), "mode = [").unwrap();
    assert_eq!(actnet(&["run", "tweets.csv", "--config", "bad.toml"], dir.path()).status.code(), Some(2));
    // runtime errors
    assert_eq!(actnet(&["run", "missing.csv"], dir.path()).status.code(), Some(1));
    fs::write(dir.path().join("broken.net"), "*Vertices 2\n1 \"#a\"\n3 \"#b\"\n").unwrap();
    assert_eq!(actnet(&["layout", "broken.net", "--out", "x.net"], dir.path()).status.code(), Some(1));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = with_fixture();
    fs::write(
        dir.path().join("cfg.toml"),
        "mode = \"two-mode\"\nformats = [\"pajek\"]\n[thresholds]\nhashtag = 2\n",
    )
    .unwrap();
    let o = actnet(&["run", "tweets.csv", "--config", "cfg.toml", "--out", "c", "--min-hashtag", "1"], dir.path());
    assert!(o.status.success());
    let kv = fs::read_to_string(dir.path().join("c_report.kv")).unwrap();
    assert!(kv.contains("selected_hashtag=4\n"), "{kv}");
    assert!(kv.contains("lost_count=2\n"));
}
