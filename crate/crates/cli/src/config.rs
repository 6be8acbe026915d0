//! Flat `key = value` config files, merged under the command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Blank lines and `#` comments are skipped. Keys may use `_` or `-`.
pub fn parse(text: &str, path: &Path) -> Result<Vec<Entry>, CliError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| CliError::Config { path: path.to_path_buf(), line: idx + 1, message };
        let (key, value) = line.split_once('=').ok_or_else(|| bad(format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-') {
            return Err(bad(format!("malformed key `{}`", key)));
        }
        let value: String = value.split(',').map(str::trim).collect::<Vec<_>>().join(",");
        if value.is_empty() {
            return Err(bad(format!("key `{key}` has no value")));
        }
        entries.push(Entry { line: idx + 1, key, value });
    }
    Ok(entries)
}

/// Turns entries into flags for `subcommand`, rejecting keys it does not
/// know and dropping those in `given`.
fn to_flags(entries: &[Entry], sub: &clap::Command, path: &Path, given: &[String]) -> Result<Vec<OsString>, CliError> {
    let subcommand = sub.get_name();
    let mut flags = Vec::new();
    for entry in entries {
        let bad = |message: String| CliError::Config { path: path.to_path_buf(), line: entry.line, message };
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(entry.key.as_str()) && entry.key != "config")
            .ok_or_else(|| bad(format!("unknown key `{}` for `{subcommand}`", entry.key)))?;
        if given.contains(&entry.key) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match entry.value.as_str() {
                "true" => flags.push(format!("--{}", entry.key).into()),
                "false" => {}
                other => return Err(bad(format!("`{}` takes true or false, got `{other}`", entry.key))),
            },
            _ => {
                flags.push(format!("--{}", entry.key).into());
                flags.push(entry.value.clone().into());
            }
        }
    }
    Ok(flags)
}

/// Long flag names present on the command line.
fn given_flags(rest: &[OsString]) -> Vec<String> {
    rest.iter()
        .filter_map(|a| a.to_str()?.strip_prefix("--").map(|f| f.split('=').next().unwrap_or(f).to_string()))
        .collect()
}

fn config_path(rest: &[OsString]) -> Option<PathBuf> {
    let mut iter = rest.iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Inserts the flags of the file named by `--config` right after the
/// subcommand. Keys also given on the command line are left to it.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    if args.len() < 2 {
        return Ok(args);
    }
    let subcommand = args[1].to_string_lossy().into_owned();
    if subcommand.starts_with('-') {
        return Ok(args);
    }
    let root = Cli::command();
    let (Some(sub), Some(path)) = (root.find_subcommand(&subcommand), config_path(&args[2..])) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let flags = to_flags(&parse(&text, &path)?, sub, &path, &given_flags(&args[2..]))?;
    let mut out = args[..2].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[2..]);
    Ok(out)
}
