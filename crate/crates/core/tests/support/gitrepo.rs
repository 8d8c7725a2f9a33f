//! Scripted repository with planted debt history.
//!
//! rev1: two clean entity classes.
//! rev2: adds GodService (GodClass).
//! rev3: GodService rewritten with higher cohesion (paid) and a long
//!       report method added (inserted).

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub const GOD: &str = "GodClass|gc.GodService";
pub const LONG: &str = "LongMethod|lm.Relatorio#montar(String)";
pub const DATES: [&str; 3] = ["2024-03-01T10:00:00Z", "2024-03-02T10:00:00Z", "2024-03-03T10:00:00Z"];

pub struct PlantedRepo {
    pub dir: tempfile::TempDir,
    /// Commit ids, oldest first.
    pub revs: Vec<String>,
}

impl PlantedRepo {
    pub fn path(&self) -> &Path {
        self.dir.path()
    }
}

fn smells_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/smells")
}

pub fn git(repo: &Path, args: &[&str], date: &str) -> String {
    let out = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(["-c", "user.name=Ana Souza", "-c", "user.email=ana@example.org", "-c", "commit.gpgsign=false"])
        .args(args)
        .env("GIT_AUTHOR_DATE", date)
        .env("GIT_COMMITTER_DATE", date)
        .env("GIT_CONFIG_NOSYSTEM", "1")
        .env("HOME", repo)
        .output()
        .expect("git on PATH");
    assert!(out.status.success(), "git {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().trim().to_string()
}

fn copy(from: &Path, repo: &Path, rel: &str) {
    let dest = repo.join(rel);
    std::fs::create_dir_all(dest.parent().unwrap()).unwrap();
    std::fs::copy(from, dest).unwrap();
}

fn commit(repo: &Path, msg: &str, date: &str) -> String {
    git(repo, &["add", "-A"], date);
    git(repo, &["commit", "-q", "--allow-empty", "-m", msg], date);
    git(repo, &["rev-parse", "HEAD"], date)
}

pub fn init(dir: &Path) {
    git(dir, &["init", "-q", "-b", "main"], DATES[0]);
}

pub fn planted() -> PlantedRepo {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path();
    init(repo);
    let s = smells_dir();
    let mut revs = Vec::new();

    copy(&s.join("positive/god_class/gc/Pedido.java"), repo, "src/gc/Pedido.java");
    copy(&s.join("positive/god_class/gc/Cliente.java"), repo, "src/gc/Cliente.java");
    std::fs::write(repo.join("README.txt"), "not java\n").unwrap();
    revs.push(commit(repo, "Entidades de pedido", DATES[0]));

    copy(&s.join("positive/god_class/gc/GodService.java"), repo, "src/gc/GodService.java");
    revs.push(commit(repo, "Servico central", DATES[1]));

    copy(&s.join("boundary/god_class/gc/GodService.java"), repo, "src/gc/GodService.java");
    copy(&s.join("positive/long_method/lm/Relatorio.java"), repo, "src/lm/Relatorio.java");
    revs.push(commit(repo, "Refatora servico e adiciona relatorio", DATES[2]));

    PlantedRepo { dir, revs }
}
