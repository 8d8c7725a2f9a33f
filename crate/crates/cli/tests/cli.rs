//! The `tdmap` binary end to end: exit codes, outputs, schemas.

#[path = "../../core/tests/support/gitrepo.rs"]
mod gitrepo;

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use serde_json::Value;
use tdmap_core::report::{DELTA_SCHEMA, REPORT_SCHEMA};

fn mini() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/mini")
}

fn tdmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdmap")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn validate(schema: &str, doc: &Value) {
    let schema: Value = serde_json::from_str(schema).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn analyze_writes_a_schema_valid_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = tdmap(&["analyze", mini().to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    validate(REPORT_SCHEMA, &doc);
    assert_eq!(doc["summary"]["features"], 2);
    assert_eq!(doc["summary"]["findings"], 2);
}

#[test]
fn analyze_is_byte_identical_across_runs() {
    let p = mini();
    let a = tdmap(&["analyze", p.to_str().unwrap()]);
    let b = tdmap(&["analyze", p.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn missing_path_exits_1_and_names_it() {
    let o = tdmap(&["analyze", "/nonexistent/tdmap-src"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.starts_with("error:"), "{e}");
    assert!(e.contains("/nonexistent/tdmap-src"), "{e}");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["frobnicate"][..],
        &["analyze"],
        &["diff", "."],
        &["series", ".", "--from", "2024-13-01", "--to", "2024-03-03", "--interval", "1"],
        &["series", ".", "--from", "2024-03-01", "--to", "2024-03-03", "--interval", "0"],
        &["serve", "r.json", "--port", "http"],
    ] {
        let o = tdmap(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error:"), "{args:?}");
    }
    assert_eq!(tdmap(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("t.toml");
    std::fs::write(&cfg, "[thresholds]\ngod_class_tcc = 7.5\n").unwrap();
    let o = tdmap(&["analyze", mini().to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn analyze_at_a_revision() {
    let repo = gitrepo::planted();
    let p = repo.path().to_str().unwrap();
    let o = tdmap(&["analyze", p, "--rev", &repo.revs[1]]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    validate(REPORT_SCHEMA, &doc);
    assert_eq!(doc["metadata"]["revision"], repo.revs[1].as_str());
    let keys: Vec<String> = doc["findings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| format!("{}|{}", f["type"].as_str().unwrap(), f["entity_key"].as_str().unwrap()))
        .collect();
    assert_eq!(keys, [gitrepo::GOD]);
}

#[test]
fn diff_between_revisions() {
    let repo = gitrepo::planted();
    let p = repo.path().to_str().unwrap();
    let o = tdmap(&["diff", p, "--from", &repo.revs[1], "--to", &repo.revs[2]]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    validate(DELTA_SCHEMA, &doc);
    assert_eq!(doc["inserted"], serde_json::json!([gitrepo::LONG]));
    assert_eq!(doc["paid"], serde_json::json!([gitrepo::GOD]));
    assert_eq!((doc["before"].as_u64(), doc["after"].as_u64()), (Some(1), Some(1)));
    assert_eq!(doc["from_rev"], repo.revs[1].as_str());
    assert_eq!(doc["to_rev"], repo.revs[2].as_str());

    let o = tdmap(&["diff", p, "--from", "nope", "--to", &repo.revs[2]]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope"));
}

#[test]
fn series_prints_the_ledger_csv() {
    let repo = gitrepo::planted();
    let p = repo.path().to_str().unwrap();
    let o = tdmap(&["series", p, "--from", "2024-03-01", "--to", "2024-03-03", "--interval", "1", "--branch", "main"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rev,date,inserted,paid,active");
    let tail: Vec<String> = lines[1..].iter().map(|l| l.split_once(',').unwrap().1.to_string()).collect();
    assert_eq!(tail, ["2024-03-01,0,0,0", "2024-03-02,1,0,1", "2024-03-03,1,1,1"]);

    let o = tdmap(&["series", p, "--from", "2024-03-01", "--to", "2024-03-03", "--interval", "1", "--branch", "ghost"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ghost"));
}

#[test]
fn missing_git_exits_1() {
    let repo = gitrepo::planted();
    let o = Command::new(env!("CARGO_BIN_EXE_tdmap"))
        .args(["diff", repo.path().to_str().unwrap(), "--from", "HEAD~1", "--to", "HEAD"])
        .env("TDMAP_GIT", "/nonexistent/git")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).to_lowercase().contains("git"), "{}", stderr(&o));
}

#[test]
fn not_a_repository_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = tdmap(&["diff", dir.path().to_str().unwrap(), "--from", "HEAD~1", "--to", "HEAD"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

fn report_file(dir: &Path) -> PathBuf {
    let out = dir.join("r.json");
    let o = tdmap(&["analyze", mini().to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    out
}

#[test]
fn serve_on_a_taken_port_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let report = report_file(dir.path());
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let o = tdmap(&["serve", report.to_str().unwrap(), "--port", &port]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(&port), "{}", stderr(&o));
}

#[test]
fn serve_answers_over_http() {
    let dir = tempfile::tempdir().unwrap();
    let report = report_file(dir.path());
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_tdmap"))
        .args(["serve", report.to_str().unwrap(), "--port", &port.to_string()])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(20);
    let mut stream = loop {
        match TcpStream::connect(("127.0.0.1", port)) {
            Ok(s) => break s,
            Err(_) if Instant::now() < deadline => std::thread::sleep(Duration::from_millis(50)),
            Err(e) => {
                let _ = child.kill();
                panic!("server never came up: {e}");
            }
        }
    };
    stream
        .write_all(b"GET /api/features HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n")
        .unwrap();
    let mut resp = String::new();
    stream.read_to_string(&mut resp).unwrap();
    let _ = child.kill();
    let _ = child.wait();
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    let body: Value = serde_json::from_str(resp.split("\r\n\r\n").nth(1).unwrap()).unwrap();
    assert_eq!(body.as_array().unwrap().len(), 2);
}
