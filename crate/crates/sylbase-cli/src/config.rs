//! Run configuration: defaults, a `key = value` config file, and command-line overrides.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use sylbase::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    JsonLines,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "text" => Ok(Format::Text),
            "jsonl" | "json-lines" => Ok(Format::JsonLines),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Usage(format!("unknown format '{s}' (expected text, jsonl or csv)"))),
        }
    }
}

/// Settings shared by every subcommand.
///
/// `n_max` and `q_max` stay unset unless given, because each command has its own default grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub n_max: Option<u64>,
    pub q_max: Option<u64>,
    pub jobs: usize,
    pub seed: u64,
    /// Largest wreath model enumerated by `oracle-count`.
    pub enum_cap: u128,
    /// Largest coset space built by `permcheck`.
    pub index_cap: u128,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_max: None,
            q_max: None,
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            seed: 2024,
            enum_cap: 1_000_000,
            index_cap: 100_000,
            format: Format::Text,
            out: None,
        }
    }
}

/// Values that may come from the config file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub n_max: Option<u64>,
    pub q_max: Option<u64>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub enum_cap: Option<u128>,
    pub index_cap: Option<u128>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

fn positive<T: FromStr + PartialEq + Default>(key: &str, value: &str) -> Result<T> {
    match value.parse::<T>() {
        Ok(v) if v != T::default() => Ok(v),
        _ => Err(Error::Usage(format!("{key} must be a positive integer, got '{value}'"))),
    }
}

/// Parses the config file format: one `key = value` per line, `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Overrides> {
    let mut o = Overrides::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| Error::Usage(format!("config line {}: {msg}", i + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| at("expected key = value".into()))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n_max" => o.n_max = Some(positive(key, value).map_err(|e| at(e.to_string()))?),
            "q_max" => o.q_max = Some(positive(key, value).map_err(|e| at(e.to_string()))?),
            "jobs" => o.jobs = Some(positive(key, value).map_err(|e| at(e.to_string()))?),
            "seed" => o.seed = Some(value.parse().map_err(|_| at(format!("bad seed '{value}'")))?),
            "enum_cap" => o.enum_cap = Some(positive(key, value).map_err(|e| at(e.to_string()))?),
            "index_cap" => o.index_cap = Some(positive(key, value).map_err(|e| at(e.to_string()))?),
            "format" => o.format = Some(value.parse().map_err(|e: Error| at(e.to_string()))?),
            "out" => o.out = Some(PathBuf::from(value)),
            _ => return Err(at(format!("unknown key '{key}'"))),
        }
    }
    Ok(o)
}

pub fn read_config(path: &Path) -> Result<Overrides> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

impl RunConfig {
    /// Defaults, then `file`, then `flags`.
    pub fn resolve(file: &Overrides, flags: &Overrides) -> RunConfig {
        let d = RunConfig::default();
        RunConfig {
            n_max: flags.n_max.or(file.n_max),
            q_max: flags.q_max.or(file.q_max),
            jobs: flags.jobs.or(file.jobs).unwrap_or(d.jobs),
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
            enum_cap: flags.enum_cap.or(file.enum_cap).unwrap_or(d.enum_cap),
            index_cap: flags.index_cap.or(file.index_cap).unwrap_or(d.index_cap),
            format: flags.format.or(file.format).unwrap_or(d.format),
            out: flags.out.clone().or_else(|| file.out.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = parse_config("# sweep\nn_max = 12\nq_max = 31 # small\nformat = csv\n\njobs=3\n").unwrap();
        let flags = Overrides { q_max: Some(9), ..Overrides::default() };
        let c = RunConfig::resolve(&file, &flags);
        assert_eq!((c.n_max, c.q_max, c.jobs, c.format), (Some(12), Some(9), 3, Format::Csv));
        assert_eq!(c.seed, 2024);
    }

    #[test]
    fn example_file_parses() {
        let o = parse_config(include_str!("../sylbase.conf.example")).unwrap();
        assert_eq!((o.n_max, o.q_max, o.jobs, o.format), (Some(24), Some(131071), Some(4), Some(Format::JsonLines)));
    }

    #[test]
    fn bad_lines_are_usage_errors() {
        for text in ["n_max 3", "n_max = 0", "q_max = -1", "colour = red", "format = xml", "seed = x"] {
            assert!(matches!(parse_config(text), Err(Error::Usage(_))), "{text}");
        }
    }
}
