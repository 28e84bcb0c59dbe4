//! Optional JSON config files. Keys are flag names (with `_` or `-`); a
//! value set on the command line always wins over the file.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory};
use serde_json::Value;

use crate::{Cli, UsageError};

/// Finds `--config <path>` or `--config=<path>` anywhere in argv.
fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn was_given(m: &ArgMatches, id: &str) -> bool {
    matches!(m.try_get_raw(id), Ok(Some(_))) && m.value_source(id) == Some(ValueSource::CommandLine)
}

fn scalar(v: &Value, key: &str) -> Result<String> {
    Ok(match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => bail!(UsageError(format!("config key {key:?}: expected a string or number"))),
    })
}

/// Returns argv with every config entry not already given on the command
/// line appended as flags.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let text = std::fs::read_to_string(Path::new(&path))
        .with_context(|| format!("reading config {}", Path::new(&path).display()))?;
    let config: serde_json::Map<String, Value> =
        serde_json::from_str(&text).map_err(|e| UsageError(format!("config is not a JSON object: {e}")))?;

    let cmd = Cli::command();
    let matches = cmd.clone().try_get_matches_from(&args)?;
    let (sub_name, sub) = matches.subcommand().ok_or_else(|| UsageError("missing subcommand".into()))?;
    let sub_cmd = cmd.find_subcommand(sub_name).expect("parsed subcommand exists");

    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in &config {
        let id = key.replace('-', "_");
        if id == "config" {
            continue;
        }
        let long = key.replace('_', "-");
        let Some(arg) = sub_cmd
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_id() == id.as_str() || a.get_long() == Some(long.as_str()))
        else {
            bail!(UsageError(format!("config key {key:?} is not a flag of `{sub_name}`")));
        };
        let id = arg.get_id().as_str();
        if was_given(sub, id) || was_given(&matches, id) {
            continue;
        }
        let Some(long) = arg.get_long() else {
            bail!(UsageError(format!("config key {key:?} names a positional argument")));
        };
        let flag = format!("--{long}");
        match value {
            Value::Bool(true) => extra.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                for item in items {
                    extra.push(flag.clone().into());
                    extra.push(scalar(item, key)?.into());
                }
            }
            v => {
                extra.push(flag.into());
                extra.push(scalar(v, key)?.into());
            }
        }
    }
    let mut out = args;
    out.extend(extra);
    Ok(out)
}
