//! `key = value` config files mirroring long flag names.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key = value", i + 1);
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text)
}

/// Splices config entries in as flags right after the subcommand path, so
/// that later command-line flags override them. Returns the argument vector
/// with `--config FILE` removed.
pub fn apply(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().context("--config needs a file")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let entries = load(Path::new(&path))?;
    // program name, subcommand, and for `verify` the identity
    let mut split = 1;
    if rest.len() > split && !rest[split].starts_with('-') {
        split += 1;
        if rest[1] == "verify" && rest.len() > split && !rest[split].starts_with('-') {
            split += 1;
        }
    }
    let mut out: Vec<String> = rest[..split].to_vec();
    for (k, v) in entries {
        out.push(format!("--{k}={v}"));
    }
    out.extend_from_slice(&rest[split..]);
    Ok(out)
}
