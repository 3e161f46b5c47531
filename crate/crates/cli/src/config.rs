//! `key=value` configuration files, merged into the command line so that
//! explicit flags win.

use std::ffi::OsString;
use std::fs;

use anyhow::{bail, Context, Result};

use crate::source::SOURCE_KEYS;

/// Pairs from a config file. Blank lines and `#` comments are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected `key=value`, got `{line}`", i + 1);
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            bail!("config line {}: invalid key `{}`", i + 1, k.trim());
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn flag_name(arg: &str) -> Option<&str> {
    let name = arg.strip_prefix("--")?;
    Some(name.split_once('=').map_or(name, |(k, _)| k))
}

/// Inserts config pairs right after the subcommand. Keys the user set on
/// the command line are dropped, and so are all source keys once the user
/// names a source.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let mut path = None;
    let mut rest: Vec<OsString> = Vec::with_capacity(args.len());
    let mut i = 0;
    while i < args.len() {
        if strs[i] == "--config" {
            path = Some(
                strs.get(i + 1)
                    .cloned()
                    .context("--config needs a file argument")?,
            );
            i += 2;
            continue;
        }
        if let Some(p) = strs[i].strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(args[i].clone());
        }
        i += 1;
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("cannot read config {path}"))?;
    let pairs = parse(&text).with_context(|| format!("in {path}"))?;

    let user_flags: Vec<&str> = strs.iter().filter_map(|a| flag_name(a)).collect();
    let user_has_source = user_flags.iter().any(|f| SOURCE_KEYS.contains(f));
    let injected = pairs.into_iter().filter(|(k, _)| {
        !user_flags.contains(&k.as_str()) && !(user_has_source && SOURCE_KEYS.contains(&k.as_str()))
    });
    let mut flags: Vec<OsString> = Vec::new();
    for (k, v) in injected {
        flags.push(format!("--{k}={v}").into());
    }
    // The binary name and the subcommand come first.
    let split = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map_or(rest.len(), |p| p + 2);
    let mut out: Vec<OsString> = rest[..split].to_vec();
    out.extend(flags);
    out.extend_from_slice(&rest[split..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_and_comments() {
        let p = parse("# run\nn = 1000\n\nbuiltin_lang=H # lang\n").unwrap();
        assert_eq!(
            p,
            [
                ("n".into(), "1000".into()),
                ("builtin-lang".into(), "H".into())
            ]
        );
        assert!(parse("oops").is_err());
    }
}
