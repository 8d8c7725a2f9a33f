//! Argument parsing and the four subcommands.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};
use thiserror::Error;

use tdmap_core::analysis::{analyze_dir, AnalysisError};
use tdmap_core::config::{Config, ConfigError};
use tdmap_core::history::{debt_diff, write_ledger_csv, Git, HistoryError};
use tdmap_core::report::{build_report, export_json, to_json_bytes, DeltaReport};

#[derive(Debug, Parser)]
#[command(name = "tdmap", version, about = "Feature-level technical debt for Java code")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a source tree, or one revision of a repository, into a report.
    Analyze {
        path: PathBuf,
        /// Analyze this revision of the repository at PATH instead of the
        /// files on disk.
        #[arg(long)]
        rev: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Debt inserted and paid between two revisions.
    Diff {
        path: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled debt ledger over a date range, as CSV.
    Series {
        path: PathBuf,
        /// First day, YYYY-MM-DD.
        #[arg(long)]
        from: NaiveDate,
        /// Last day, YYYY-MM-DD.
        #[arg(long)]
        to: NaiveDate,
        /// Days between samples.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        interval: u32,
        #[arg(long, default_value = "HEAD")]
        branch: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve a report over a read-only JSON API.
    Serve {
        report: PathBuf,
        #[arg(long)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Directory of static assets for the browser front end.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read report {path}: {source}")]
    ReadReport {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("report {path} is not JSON: {source}")]
    BadReport {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("server failed: {0}")]
    Serve(std::io::Error),
}

fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    Ok(match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    })
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Write {
            path: p.display().to_string(),
            source,
        }),
        None => std::io::stdout().write_all(bytes).map_err(|source| CliError::Write {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn analyze(path: &Path, rev: Option<&str>, config: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let source = path.display().to_string();
    let report = match rev {
        Some(rev) => {
            let git = Git::open(path)?;
            let revision = git.revision(rev)?;
            let analysis = git.snapshot_analyze(&revision.id, &cfg)?;
            build_report(&analysis, &cfg, &source, Some(&revision), None)
        }
        None => build_report(&analyze_dir(path, &cfg)?, &cfg, &source, None, None),
    };
    for d in &report.diagnostics {
        tracing::warn!(path = %d.path, "skipped: {}", d.message);
    }
    emit(out, &export_json(&report)?)
}

fn diff(path: &Path, from: &str, to: &str, config: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let git = Git::open(path)?;
    let (a, b) = (git.revision(from)?, git.revision(to)?);
    let fa = git.snapshot_analyze(&a.id, &cfg)?.findings;
    let fb = git.snapshot_analyze(&b.id, &cfg)?.findings;
    let mut delta = debt_diff(&fa, &fb);
    delta.from_rev = a.id;
    delta.to_rev = b.id;
    emit(out, &to_json_bytes(&DeltaReport::new(delta, fa.len(), fb.len()))?)
}

struct SeriesArgs<'a> {
    path: &'a Path,
    from: NaiveDate,
    to: NaiveDate,
    interval: u32,
    branch: &'a str,
    config: Option<&'a Path>,
    out: Option<&'a Path>,
}

fn series(a: SeriesArgs<'_>) -> Result<(), CliError> {
    let cfg = load_config(a.config)?;
    let git = Git::open(a.path)?;
    let ledger = git.debt_series(a.branch, a.from, a.to, a.interval, &cfg)?;
    let mut buf = Vec::new();
    write_ledger_csv(&ledger, &mut buf)?;
    emit(a.out, &buf)
}

async fn serve(report: &Path, addr: SocketAddr, static_dir: Option<&Path>) -> Result<(), CliError> {
    let bytes = std::fs::read(report).map_err(|source| CliError::ReadReport {
        path: report.display().to_string(),
        source,
    })?;
    let value: serde_json::Value = serde_json::from_slice(&bytes).map_err(|source| CliError::BadReport {
        path: report.display().to_string(),
        source,
    })?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| CliError::Bind { addr, source })?;
    tracing::info!("serving {} on http://{addr}", report.display());
    axum::serve(listener, crate::api::router(value, static_dir))
        .await
        .map_err(CliError::Serve)
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { path, rev, config, out } => {
            analyze(&path, rev.as_deref(), config.as_deref(), out.as_deref())
        }
        Command::Diff { path, from, to, config, out } => {
            diff(&path, &from, &to, config.as_deref(), out.as_deref())
        }
        Command::Series { path, from, to, interval, branch, config, out } => series(SeriesArgs {
            path: &path,
            from,
            to,
            interval,
            branch: &branch,
            config: config.as_deref(),
            out: out.as_deref(),
        }),
        Command::Serve { report, port, host, static_dir } => {
            let rt = tokio::runtime::Runtime::new().map_err(CliError::Serve)?;
            rt.block_on(serve(&report, SocketAddr::new(host, port), static_dir.as_deref()))
        }
    }
}

/// Parse `args`, run, and map the outcome to 0 (ok), 1 (analysis or I/O
/// failure) or 2 (usage error).
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(1)
        }
    }
}
