//! Artifact rendering and all-or-nothing writing.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::experiments::{Outcome, Table};

pub const MANIFEST: &str = "manifest.json";
pub const SUMMARY: &str = "summary.txt";

/// CSV text with a `# schema:` comment line ahead of the header.
pub fn render_csv(t: &Table) -> Vec<u8> {
    let mut out = format!("# schema: {}\n", t.schema).into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.columns).expect("writing to memory");
    for r in &t.rows {
        w.write_record(r).expect("writing to memory");
    }
    out.extend(w.into_inner().expect("writing to memory"));
    out
}

/// SHA-256 of the git blob object for `data`: `sha256("blob <len>\0" || data)`.
pub fn git_sha256(data: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", data.len()).as_bytes());
    h.update(data);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
struct FileEntry<'a> {
    name: &'a str,
    schema: &'a str,
    rows: usize,
    git_sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    schema: &'static str,
    tool: &'static str,
    experiment: &'static str,
    source: &'a str,
    config: &'a ExperimentConfig,
    files: Vec<FileEntry<'a>>,
}

/// All files of a run, in memory.
pub fn render(cfg: &ExperimentConfig, source: &str, outcome: &Outcome) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = outcome.tables.iter().map(|t| (t.file.clone(), render_csv(t))).collect();
    let entries = outcome
        .tables
        .iter()
        .zip(&files)
        .map(|(t, (_, bytes))| FileEntry {
            name: &t.file,
            schema: &t.schema,
            rows: t.rows.len(),
            git_sha256: git_sha256(bytes),
        })
        .collect();
    let manifest = Manifest {
        schema: "ncmv/manifest/v1",
        tool: concat!("ncmv ", env!("CARGO_PKG_VERSION")),
        experiment: cfg.experiment.name(),
        source,
        config: cfg,
        files: entries,
    };
    let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    json.push(b'\n');
    let mut summary = format!("experiment: {}\nsource: {source}\nseed: {}\ntrials: {}\n", cfg.experiment.name(), cfg.seed, cfg.trials);
    for line in &outcome.summary {
        summary.push_str(line);
        summary.push('\n');
    }
    files.push((MANIFEST.to_string(), json));
    files.push((SUMMARY.to_string(), summary.into_bytes()));
    files
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every file into a staging directory next to `dir`, then moves them
/// into `dir`. On failure the staging directory is removed and `dir` is left
/// untouched, apart from files that were already moved.
pub fn write_all(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(write_err(dir))?;
    let staging = dir.join(format!(".ncmv-staging-{}", std::process::id()));
    let result = (|| {
        fs::create_dir_all(&staging).map_err(write_err(&staging))?;
        for (name, bytes) in files {
            let p = staging.join(name);
            fs::write(&p, bytes).map_err(write_err(&p))?;
        }
        let mut written = Vec::with_capacity(files.len());
        for (name, _) in files {
            let to = dir.join(name);
            fs::rename(staging.join(name), &to).map_err(write_err(&to))?;
            written.push(to);
        }
        Ok(written)
    })();
    let _ = fs::remove_dir_all(&staging);
    result
}
