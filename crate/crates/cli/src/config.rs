//! `--config PATH`: a flat `key = value` file whose entries become flags of
//! the selected subcommand. They are inserted directly after the subcommand
//! name, so any flag given on the command line comes later and wins.

use std::collections::BTreeSet;
use std::path::Path;

use clap::{ArgAction, Command};

use crate::error::CliError;

/// Global options that take a value and may precede the subcommand.
const VALUED_GLOBALS: [&str; 3] = ["--config", "--precision", "--record"];

/// One parsed `key = value` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parses the file format: blank lines and lines starting with `#` are
/// ignored, keys may use `_` or `-`, values may be quoted.
pub fn parse(text: &str) -> Result<Vec<Entry>, CliError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value, got `{line}`", i + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        let value = value.trim();
        let value = value.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(value).to_string();
        entries.push(Entry { key, value, line: i + 1 });
    }
    Ok(entries)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter().skip(1);
    let mut found = None;
    while let Some(a) = it.next() {
        if a == "--config" {
            found = it.next().cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            found = Some(p.to_string());
        }
    }
    found
}

fn subcommand_index(args: &[String], cmd: &Command) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if VALUED_GLOBALS.contains(&a) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return cmd.find_subcommand(a).map(|_| i);
        }
    }
    None
}

struct Known {
    long: String,
    is_flag: bool,
}

fn known_args(cmd: &Command) -> Vec<Known> {
    cmd.get_arguments()
        .filter_map(|a| {
            a.get_long().map(|long| Known {
                long: long.to_string(),
                is_flag: matches!(a.get_action(), ArgAction::SetTrue | ArgAction::SetFalse),
            })
        })
        .collect()
}

/// Expands `--config` into explicit flags. `cmd` is the fully built clap
/// command, used to decide which keys apply to the selected subcommand.
pub fn expand(args: Vec<String>, cmd: &Command) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::io(format!("cannot read config file {path}"), e))?;
    let entries = parse(&text)?;
    let Some(at) = subcommand_index(&args, cmd) else {
        return Ok(args);
    };
    let sub = cmd.find_subcommand(&args[at]).expect("index points at a subcommand");
    let here = known_args(sub);
    let globals: Vec<Known> = known_args(cmd);
    let anywhere: BTreeSet<String> = cmd
        .get_subcommands()
        .flat_map(|s| known_args(s).into_iter().map(|k| k.long))
        .chain(globals.iter().map(|k| k.long.clone()))
        .collect();

    let mut injected = Vec::new();
    for e in entries {
        if e.key == "config" {
            return Err(CliError::Usage(format!("config line {}: nested config files are not supported", e.line)));
        }
        let Some(known) = here.iter().chain(&globals).find(|k| k.long == e.key) else {
            if anywhere.contains(&e.key) {
                continue;
            }
            return Err(CliError::Usage(format!("config line {}: unknown key `{}`", e.line, e.key)));
        };
        if known.is_flag {
            match e.value.as_str() {
                "true" | "1" | "yes" => injected.push(format!("--{}", e.key)),
                "false" | "0" | "no" => {}
                other => {
                    return Err(CliError::Usage(format!(
                        "config line {}: `{}` expects true or false, got `{other}`",
                        e.line, e.key
                    )))
                }
            }
        } else {
            injected.push(format!("--{}={}", e.key, e.value));
        }
    }
    let mut out = args;
    out.splice(at + 1..at + 1, injected);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        let e = parse("# comment\n\nxi = 0.5\nt_max=\"20\"\n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0], Entry { key: "xi".into(), value: "0.5".into(), line: 3 });
        assert_eq!(e[1].key, "t-max");
        assert_eq!(e[1].value, "20");
        assert!(parse("novalue\n").is_err());
        assert!(parse(" = 3\n").is_err());
    }

    #[test]
    fn finds_config_path() {
        let args: Vec<String> = ["p", "--config", "a.cfg", "pullin"].map(String::from).to_vec();
        assert_eq!(config_path(&args).as_deref(), Some("a.cfg"));
        let args: Vec<String> = ["p", "pullin", "--config=b.cfg"].map(String::from).to_vec();
        assert_eq!(config_path(&args).as_deref(), Some("b.cfg"));
    }
}
