//! Output directories: artifact files plus a sha256 manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.txt";

/// Collects the files of one invocation under `root`.
pub struct Artifacts {
    root: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn create(root: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(root).map_err(|source| CliError::Io { path: root.to_path_buf(), source })?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&self, relative: &str) -> PathBuf {
        self.root.join(relative)
    }

    /// Writes `bytes` to `relative`, creating parent directories.
    pub fn write(&mut self, relative: &str, bytes: Vec<u8>) -> CliResult<PathBuf> {
        let path = self.path(relative);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.to_path_buf(), source })?;
        }
        std::fs::write(&path, &bytes).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.files.retain(|(name, _)| name != relative);
        self.files.push((relative.to_string(), bytes));
        Ok(path)
    }

    pub fn write_text(&mut self, relative: &str, text: String) -> CliResult<PathBuf> {
        self.write(relative, text.into_bytes())
    }

    /// Writes `manifest.txt` in `sha256sum` format, sorted by path.
    pub fn finish(mut self) -> CliResult<PathBuf> {
        self.files.sort_by(|a, b| a.0.cmp(&b.0));
        let mut text = String::new();
        for (name, bytes) in &self.files {
            let _ = writeln!(text, "{}  {name}", hex::encode(Sha256::digest(bytes)));
        }
        let path = self.path(MANIFEST);
        std::fs::write(&path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
        Ok(path)
    }
}

/// `key=value` lines in insertion order. The first value put for a key wins.
#[derive(Default)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn put(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        if !self.entries.iter().any(|(k, _)| k == key) {
            self.entries.push((key.to_string(), value.to_string()));
        }
        self
    }

    pub fn into_string(self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// Plots every `trace.csv` below the script's directory on a log scale.
pub const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
traces = sorted(here.rglob("trace.csv"))
if not traces:
    sys.exit("no trace.csv found")

fig, ax = plt.subplots(figsize=(6, 4))
for path in traces:
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    seconds = [float(r["seconds"]) for r in rows]
    timed = any(s > 0 for s in seconds)
    xs = seconds if timed else [int(r["k"]) for r in rows]
    ys = [max(float(r["f_y_gap"]), 1e-300) for r in rows]
    label = path.parent.name if path.parent != here else "run"
    ax.semilogy(xs, ys, label=label)
ax.set_xlabel("seconds" if timed else "iterations")
ax.set_ylabel("f(y) - f*")
ax.legend()
fig.tight_layout()
fig.savefig(here / "convergence.png", dpi=150)
"#;
