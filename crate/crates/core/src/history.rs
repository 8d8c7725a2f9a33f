//! Revision mining through the system `git` executable.
//!
//! Snapshots are read straight from the object store (`ls-tree` plus
//! `cat-file --batch`), so the user's work tree is never touched. The
//! executable can be overridden with the `TDMAP_GIT` environment variable.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use chrono::{DateTime, Days, NaiveDate, NaiveTime, TimeZone, Utc};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{analyze_sources, Analysis, AnalysisError, Diagnostic, SourceText};
use crate::config::Config;
use crate::smells::{finding_key, SmellFinding};

pub const GIT_ENV: &str = "TDMAP_GIT";

#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("git executable {0} not found")]
    GitMissing(String),
    #[error("{0} is not a git repository")]
    NotARepo(String),
    #[error("unknown branch {0}")]
    UnknownBranch(String),
    #[error("unknown revision {0}")]
    UnknownRevision(String),
    #[error("git {args} failed: {stderr}")]
    GitFailed { args: String, stderr: String },
    #[error("unexpected git output: {0}")]
    BadOutput(String),
    #[error("sampling interval must be at least one day")]
    BadInterval,
    #[error("i/o error talking to git: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv export failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Revision {
    pub id: String,
    /// Committer time, UTC seconds.
    pub timestamp: i64,
    pub author: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DebtDelta {
    pub from_rev: String,
    pub to_rev: String,
    pub inserted: BTreeSet<String>,
    pub paid: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerRow {
    pub rev: String,
    /// Sample date, `YYYY-MM-DD`.
    pub date: String,
    pub inserted: u64,
    pub paid: u64,
    pub active: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DebtLedger {
    pub interval_days: u32,
    pub rows: Vec<LedgerRow>,
}

/// Inclusive date window; open ends are unbounded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DateWindow {
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
}

fn day_start(d: NaiveDate) -> i64 {
    Utc.from_utc_datetime(&d.and_time(NaiveTime::MIN)).timestamp()
}

fn day_end(d: NaiveDate) -> i64 {
    day_start(d) + 86_399
}

impl DateWindow {
    pub fn contains(&self, ts: i64) -> bool {
        self.from.is_none_or(|f| ts >= day_start(f)) && self.to.is_none_or(|t| ts <= day_end(t))
    }
}

/// Handle on one repository.
#[derive(Debug, Clone)]
pub struct Git {
    exe: PathBuf,
    repo: PathBuf,
}

impl Git {
    /// Uses `$TDMAP_GIT` when set, otherwise `git` from `PATH`. Fails when the
    /// executable is missing or `repo` is not a repository.
    pub fn open(repo: &Path) -> Result<Self, HistoryError> {
        let exe = std::env::var_os(GIT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("git"));
        Self::open_with(exe, repo)
    }

    pub fn open_with(exe: PathBuf, repo: &Path) -> Result<Self, HistoryError> {
        let git = Git {
            exe,
            repo: repo.to_path_buf(),
        };
        if !repo.is_dir() {
            return Err(HistoryError::NotARepo(repo.display().to_string()));
        }
        match git.run(&["rev-parse", "--git-dir"]) {
            Ok(_) => Ok(git),
            Err(HistoryError::GitFailed { .. }) => Err(HistoryError::NotARepo(repo.display().to_string())),
            Err(e) => Err(e),
        }
    }

    fn command(&self, args: &[&str]) -> Command {
        let mut c = Command::new(&self.exe);
        c.arg("-C").arg(&self.repo).args(args);
        c.env("GIT_CONFIG_NOSYSTEM", "1").env("LC_ALL", "C");
        c
    }

    fn spawn_error(&self, e: std::io::Error) -> HistoryError {
        if e.kind() == std::io::ErrorKind::NotFound {
            HistoryError::GitMissing(self.exe.display().to_string())
        } else {
            HistoryError::Io(e)
        }
    }

    fn run(&self, args: &[&str]) -> Result<Vec<u8>, HistoryError> {
        let out = self
            .command(args)
            .stdin(Stdio::null())
            .output()
            .map_err(|e| self.spawn_error(e))?;
        if !out.status.success() {
            return Err(HistoryError::GitFailed {
                args: args.join(" "),
                stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
            });
        }
        Ok(out.stdout)
    }

    fn verify(&self, rev: &str) -> Result<String, HistoryError> {
        let object = format!("{rev}^{{commit}}");
        match self.run(&["rev-parse", "--verify", "--quiet", &object]) {
            Ok(out) => Ok(String::from_utf8_lossy(&out).trim().to_string()),
            Err(HistoryError::GitFailed { .. }) => Err(HistoryError::UnknownRevision(rev.to_string())),
            Err(e) => Err(e),
        }
    }

    /// First-parent history of `branch`, oldest first, filtered to `window`.
    pub fn list_revisions(&self, branch: &str, window: DateWindow) -> Result<Vec<Revision>, HistoryError> {
        let head = self.verify(branch).map_err(|e| match e {
            HistoryError::UnknownRevision(b) => HistoryError::UnknownBranch(b),
            e => e,
        })?;
        let out = self.run(&[
            "log",
            "--first-parent",
            "--reverse",
            "--format=%H%x1f%ct%x1f%an%x1f%s%x1e",
            &head,
        ])?;
        let text = String::from_utf8_lossy(&out);
        let mut revs = Vec::new();
        for rec in text.split('\x1e') {
            let rec = rec.trim_start_matches('\n');
            if rec.is_empty() {
                continue;
            }
            let parts: Vec<&str> = rec.split('\x1f').collect();
            let [id, ts, author, message] = parts[..] else {
                return Err(HistoryError::BadOutput(rec.to_string()));
            };
            let timestamp = ts
                .trim()
                .parse()
                .map_err(|_| HistoryError::BadOutput(rec.to_string()))?;
            if window.contains(timestamp) {
                revs.push(Revision {
                    id: id.to_string(),
                    timestamp,
                    author: author.to_string(),
                    message: message.trim_end().to_string(),
                });
            }
        }
        Ok(revs)
    }

    pub fn revision(&self, rev: &str) -> Result<Revision, HistoryError> {
        let id = self.verify(rev)?;
        let out = self.run(&["show", "-s", "--format=%H%x1f%ct%x1f%an%x1f%s", &id])?;
        let text = String::from_utf8_lossy(&out);
        let parts: Vec<&str> = text.trim_end().split('\x1f').collect();
        let [id, ts, author, message] = parts[..] else {
            return Err(HistoryError::BadOutput(text.to_string()));
        };
        Ok(Revision {
            id: id.to_string(),
            timestamp: ts.parse().map_err(|_| HistoryError::BadOutput(text.to_string()))?,
            author: author.to_string(),
            message: message.to_string(),
        })
    }

    /// Java blobs of `rev` accepted by the config's file filter.
    pub fn snapshot_sources(&self, rev: &str, cfg: &Config) -> Result<(Vec<SourceText>, Vec<Diagnostic>), HistoryError> {
        let id = self.verify(rev)?;
        let filter = cfg.file_filter().map_err(AnalysisError::from)?;
        let listing = self.run(&["ls-tree", "-r", "-z", "--full-tree", &id])?;
        let mut wanted: Vec<(String, String)> = Vec::new();
        for entry in listing.split(|b| *b == 0) {
            if entry.is_empty() {
                continue;
            }
            let entry = String::from_utf8_lossy(entry);
            let (meta, path) = entry
                .split_once('\t')
                .ok_or_else(|| HistoryError::BadOutput(entry.to_string()))?;
            let mut meta = meta.split(' ');
            let (_mode, kind, sha) = (meta.next(), meta.next(), meta.next());
            if kind != Some("blob") || !path.ends_with(".java") || !filter.accepts(path) {
                continue;
            }
            let sha = sha.ok_or_else(|| HistoryError::BadOutput(entry.to_string()))?;
            wanted.push((path.to_string(), sha.to_string()));
        }
        wanted.sort();
        let blobs = self.cat_blobs(wanted.iter().map(|(_, s)| s.as_str()))?;
        let mut sources = Vec::new();
        let mut diags = Vec::new();
        for ((path, _), bytes) in wanted.into_iter().zip(blobs) {
            match SourceText::from_bytes(path, bytes) {
                Ok(s) => sources.push(s),
                Err(d) => diags.push(d),
            }
        }
        Ok((sources, diags))
    }

    fn cat_blobs<'a>(&self, shas: impl Iterator<Item = &'a str>) -> Result<Vec<Vec<u8>>, HistoryError> {
        let input: String = shas.map(|s| format!("{s}\n")).collect();
        if input.is_empty() {
            return Ok(Vec::new());
        }
        let mut child = self
            .command(&["cat-file", "--batch"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| self.spawn_error(e))?;
        let mut stdin = child.stdin.take().ok_or_else(|| HistoryError::BadOutput("no stdin".into()))?;
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let mut out = Vec::new();
        child
            .stdout
            .take()
            .ok_or_else(|| HistoryError::BadOutput("no stdout".into()))?
            .read_to_end(&mut out)?;
        writer
            .join()
            .map_err(|_| HistoryError::BadOutput("writer thread panicked".into()))??;
        let status = child.wait()?;
        if !status.success() {
            return Err(HistoryError::GitFailed {
                args: "cat-file --batch".into(),
                stderr: status.to_string(),
            });
        }
        parse_batch(&out)
    }

    /// Analyze the tree of `rev` without checking it out.
    pub fn snapshot_analyze(&self, rev: &str, cfg: &Config) -> Result<Analysis, HistoryError> {
        let (sources, mut diags) = self.snapshot_sources(rev, cfg)?;
        let mut a = analyze_sources(&sources, cfg)?;
        a.diagnostics.append(&mut diags);
        a.diagnostics.sort();
        Ok(a)
    }

    /// Sample the first-parent history of `branch` every `interval_days`,
    /// counting backwards from the end of `to`, and diff consecutive samples.
    pub fn debt_series(
        &self,
        branch: &str,
        from: NaiveDate,
        to: NaiveDate,
        interval_days: u32,
        cfg: &Config,
    ) -> Result<DebtLedger, HistoryError> {
        if interval_days == 0 {
            return Err(HistoryError::BadInterval);
        }
        let revs = self.list_revisions(branch, DateWindow::default())?;
        let mut samples = Vec::new();
        let mut t = to;
        loop {
            if t < from {
                break;
            }
            samples.push(t);
            match t.checked_sub_days(Days::new(interval_days as u64)) {
                Some(prev) => t = prev,
                None => break,
            }
        }
        samples.reverse();

        let mut picks: Vec<(NaiveDate, &Revision)> = Vec::new();
        for d in samples {
            let end = day_end(d);
            let Some(r) = revs.iter().rev().find(|r| r.timestamp <= end) else {
                continue;
            };
            if picks.last().is_some_and(|(_, p)| p.id == r.id) {
                continue;
            }
            picks.push((d, r));
        }

        let analyzed: Vec<Vec<SmellFinding>> = picks
            .par_iter()
            .map(|(_, r)| self.snapshot_analyze(&r.id, cfg).map(|a| a.findings))
            .collect::<Result<_, _>>()?;

        let mut rows = Vec::new();
        let mut prev: Option<&Vec<SmellFinding>> = None;
        let mut active = 0u64;
        for ((d, r), findings) in picks.iter().zip(&analyzed) {
            let (inserted, paid) = match prev {
                None => {
                    active = findings.len() as u64;
                    (0, 0)
                }
                Some(p) => {
                    let delta = debt_diff(p, findings);
                    let (i, q) = (delta.inserted.len() as u64, delta.paid.len() as u64);
                    active = active + i - q;
                    (i, q)
                }
            };
            rows.push(LedgerRow {
                rev: r.id.clone(),
                date: d.format("%Y-%m-%d").to_string(),
                inserted,
                paid,
                active,
            });
            prev = Some(findings);
        }
        Ok(DebtLedger { interval_days, rows })
    }
}

fn parse_batch(out: &[u8]) -> Result<Vec<Vec<u8>>, HistoryError> {
    let mut blobs = Vec::new();
    let mut pos = 0;
    while pos < out.len() {
        let nl = out[pos..]
            .iter()
            .position(|b| *b == b'\n')
            .ok_or_else(|| HistoryError::BadOutput("truncated cat-file header".into()))?;
        let header = String::from_utf8_lossy(&out[pos..pos + nl]).to_string();
        pos += nl + 1;
        let size: usize = header
            .rsplit(' ')
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| HistoryError::BadOutput(header.clone()))?;
        if header.ends_with(" missing") || pos + size > out.len() {
            return Err(HistoryError::BadOutput(header));
        }
        blobs.push(out[pos..pos + size].to_vec());
        pos += size + 1;
    }
    Ok(blobs)
}

/// Keys present only in `b` were inserted; keys present only in `a` were paid.
pub fn debt_diff(a: &[SmellFinding], b: &[SmellFinding]) -> DebtDelta {
    let ka: BTreeSet<String> = a.iter().map(finding_key).collect();
    let kb: BTreeSet<String> = b.iter().map(finding_key).collect();
    DebtDelta {
        from_rev: String::new(),
        to_rev: String::new(),
        inserted: kb.difference(&ka).cloned().collect(),
        paid: ka.difference(&kb).cloned().collect(),
    }
}

/// `rev,date,inserted,paid,active` with a header row.
pub fn write_ledger_csv<W: Write>(ledger: &DebtLedger, out: W) -> Result<(), HistoryError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rev", "date", "inserted", "paid", "active"])?;
    for r in &ledger.rows {
        w.write_record([
            r.rev.clone(),
            r.date.clone(),
            r.inserted.to_string(),
            r.paid.to_string(),
            r.active.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// RFC 3339 rendering of a UTC timestamp.
pub fn format_timestamp(ts: i64) -> String {
    DateTime::<Utc>::from_timestamp(ts, 0)
        .map(|d| d.to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
        .unwrap_or_default()
}
