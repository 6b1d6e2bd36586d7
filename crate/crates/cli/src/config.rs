//! Flat `key = value` config files.
//!
//! Keys are the long flag names of the subcommand (`dark-count` or
//! `dark_count`). The file is spliced into the argument list right after the
//! subcommand, so anything typed on the command line comes later and wins.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{ArgAction, Command};

use crate::error::CliError;

/// One `key = value` line, with its line number for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected `key = value`", n + 1))
        })?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
        }
        out.push(Entry {
            line: n + 1,
            key,
            value: v.trim().to_string(),
        });
    }
    Ok(out)
}

/// `--config <path>` or `--config=<path>` anywhere in `args`.
fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Position of the subcommand token, skipping the value of `--config`.
fn subcommand_index(args: &[OsString], cmd: &Command) -> Option<usize> {
    let mut skip = false;
    for (i, a) in args.iter().enumerate().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        let s = a.to_string_lossy();
        if s == "--config" {
            skip = true;
            continue;
        }
        if cmd.find_subcommand(&*s).is_some() {
            return Some(i);
        }
        if !s.starts_with('-') {
            return None;
        }
    }
    None
}

/// Returns `args` with the config file's entries inserted as flags after
/// the subcommand. Without `--config` the arguments come back unchanged.
pub fn merge(args: Vec<OsString>, cmd: &Command) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let entries = parse(&text)?;
    // no subcommand: leave the error to clap
    let Some(at) = subcommand_index(&args, cmd) else {
        return Ok(args);
    };
    let name = args[at].to_string_lossy().into_owned();
    let sub = cmd.find_subcommand(&name).expect("found above");

    let mut injected = Vec::new();
    for e in entries {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(e.key.as_str()) && a.get_long() != Some("config"))
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "config line {}: `{}` is not an option of `{name}`",
                    e.line, e.key
                ))
            })?;
        let flag = OsString::from(format!("--{}", e.key));
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match e.value.as_str() {
                "true" | "yes" | "1" => injected.push(flag),
                "false" | "no" | "0" => {}
                v => {
                    return Err(CliError::Usage(format!(
                        "config line {}: `{}` expects true or false, got `{v}`",
                        e.line, e.key
                    )))
                }
            }
        } else {
            injected.push(flag);
            injected.push(OsString::from(e.value));
        }
    }
    let mut out = args[..=at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}
