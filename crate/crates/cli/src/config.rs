//! Run settings from a `key=value` file, command-line flags and the
//! environment, in increasing order of precedence.

use std::path::{Path, PathBuf};

use clap::ValueEnum;

use crate::failure::{Failure, Outcome};

pub const SEED_VAR: &str = "SPANFORGE_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    pub jobs: Option<usize>,
    pub samples: usize,
    pub exhaustive_limit: usize,
    pub family: Option<String>,
    pub sizes: Option<String>,
    pub csv: Option<PathBuf>,
    pub costs: Option<Vec<f64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            format: Format::Json,
            jobs: None,
            samples: 32,
            exhaustive_limit: 12,
            family: None,
            sizes: None,
            csv: None,
            costs: None,
        }
    }
}

/// Flag values that override the file; `None` leaves the file value.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub samples: Option<usize>,
    pub exhaustive_limit: Option<usize>,
    pub family: Option<String>,
    pub sizes: Option<String>,
    pub csv: Option<PathBuf>,
    pub costs: Option<Vec<f64>>,
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Outcome<T> {
    value
        .parse()
        .map_err(|_| Failure::Input(format!("config key `{key}`: bad value `{value}`")))
}

pub fn parse_costs(text: &str) -> Outcome<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Input(format!("bad cost `{}` in `{text}`", s.trim())))
        })
        .collect()
}

impl RunConfig {
    /// Parses a flat `key=value` file. Blank lines and `#` comments are
    /// skipped; unknown keys are rejected.
    pub fn parse(text: &str) -> Outcome<Self> {
        let mut config = RunConfig::default();
        for (number_, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::Input(format!(
                    "config line {}: expected key=value",
                    number_ + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "seed" => config.seed = number(key, value)?,
                "format" => {
                    config.format = Format::from_str(value, true).map_err(|_| {
                        Failure::Input(format!("config key `format`: bad value `{value}`"))
                    })?
                }
                "jobs" => config.jobs = Some(number(key, value)?),
                "samples" => config.samples = number(key, value)?,
                "exhaustive_limit" => config.exhaustive_limit = number(key, value)?,
                "family" => config.family = Some(value.to_string()),
                "sizes" => config.sizes = Some(value.to_string()),
                "csv" => config.csv = Some(PathBuf::from(value)),
                "costs" => config.costs = Some(parse_costs(value)?),
                _ => {
                    return Err(Failure::Input(format!(
                        "config line {}: unknown key `{key}`",
                        number_ + 1
                    )))
                }
            }
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Outcome<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(&mut self, o: Overrides) {
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = o.$field {
                    self.$field = v;
                }
            )*};
        }
        take!(seed, format, samples, exhaustive_limit);
        macro_rules! take_opt {
            ($($field:ident),*) => {$(
                if o.$field.is_some() {
                    self.$field = o.$field;
                }
            )*};
        }
        take_opt!(jobs, family, sizes, csv, costs);
    }

    /// `SPANFORGE_SEED`, when set, wins over both file and flags.
    pub fn apply_env(&mut self, value: Option<String>) -> Outcome<()> {
        if let Some(v) = value {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Failure::Input(format!("{SEED_VAR}: bad seed `{v}`")))?;
        }
        Ok(())
    }

    /// File, then flags, then environment.
    pub fn resolve(file: Option<&Path>, overrides: Overrides) -> Outcome<Self> {
        let mut config = match file {
            Some(path) => Self::load(path)?,
            None => RunConfig::default(),
        };
        config.apply(overrides);
        config.apply_env(std::env::var(SEED_VAR).ok())?;
        Ok(config)
    }
}
