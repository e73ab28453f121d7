//! Run configuration assembled from an optional key-value file and flags.
//!
//! File format: one `key = value` per line, `#` starts a comment, blank lines
//! are ignored. Keys mirror the long flags: `angles`, `settings`, `format`,
//! `seed`, `n`, `grid`, `restarts`, `mode`, `outcomes`, `strict`, `degrees`.
//! Flags given on the command line win over file values.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use bellspace::lhv::OutcomeScope;
use bellspace::{ChshAngles, SettingsDistribution};
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Conditional,
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Outcomes {
    All,
    PlusMinus,
}

impl From<Outcomes> for OutcomeScope {
    fn from(o: Outcomes) -> Self {
        match o {
            Outcomes::All => OutcomeScope::All,
            Outcomes::PlusMinus => OutcomeScope::PlusMinus,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Settings as given by the user: the uniform default or four explicit values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SettingsSpec {
    Uniform,
    Explicit([f64; 4]),
}

impl FromStr for SettingsSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("uniform") {
            return Ok(SettingsSpec::Uniform);
        }
        parse_four(s).map(SettingsSpec::Explicit)
    }
}

/// Parses four comma-separated reals.
pub fn parse_four(s: &str) -> Result<[f64; 4], String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("invalid number {v:?}: {e}")))
        .collect::<Result<_, _>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 4 comma-separated values, got {}", v.len()))
}

/// Values that may come from either the file or the flags.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub angles: Option<[f64; 4]>,
    pub settings: Option<SettingsSpec>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub grid: Option<usize>,
    pub restarts: Option<usize>,
    pub mode: Option<Mode>,
    pub outcomes: Option<Outcomes>,
    pub strict: Option<bool>,
    pub degrees: Option<bool>,
}

impl Overrides {
    /// `self` wins wherever it has a value.
    pub fn over(self, base: Overrides) -> Overrides {
        Overrides {
            angles: self.angles.or(base.angles),
            settings: self.settings.or(base.settings),
            format: self.format.or(base.format),
            seed: self.seed.or(base.seed),
            n: self.n.or(base.n),
            grid: self.grid.or(base.grid),
            restarts: self.restarts.or(base.restarts),
            mode: self.mode.or(base.mode),
            outcomes: self.outcomes.or(base.outcomes),
            strict: self.strict.or(base.strict),
            degrees: self.degrees.or(base.degrees),
        }
    }

    pub fn parse_file(text: &str) -> Result<Overrides, ConfigError> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", lineno + 1)))?;
            map.insert(key.trim().to_string(), (lineno + 1, value.trim().to_string()));
        }

        let mut out = Overrides::default();
        for (key, (lineno, value)) in map {
            let bad = |e: String| ConfigError(format!("line {lineno}: {key}: {e}"));
            match key.as_str() {
                "angles" => out.angles = Some(parse_four(&value).map_err(bad)?),
                "settings" => out.settings = Some(value.parse().map_err(bad)?),
                "format" => out.format = Some(Format::from_str(&value, true).map_err(bad)?),
                "mode" => out.mode = Some(Mode::from_str(&value, true).map_err(bad)?),
                "outcomes" => out.outcomes = Some(Outcomes::from_str(&value, true).map_err(bad)?),
                "seed" => out.seed = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "n" => out.n = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "grid" => out.grid = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "restarts" => out.restarts = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "strict" => out.strict = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "degrees" => out.degrees = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                other => return Err(ConfigError(format!("line {lineno}: unknown key {other:?}"))),
            }
        }
        Ok(out)
    }
}

/// Fully resolved configuration for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// `None` when the user gave no angles; each subcommand picks its default.
    pub angles: Option<ChshAngles>,
    pub settings: Option<SettingsDistribution>,
    pub format: Format,
    pub seed: u64,
    pub n: usize,
    pub grid: Option<usize>,
    pub restarts: usize,
    pub mode: Mode,
    pub outcomes: Outcomes,
    pub strict: bool,
}

impl RunConfig {
    pub fn resolve(o: Overrides) -> Result<RunConfig, ConfigError> {
        let degrees = o.degrees.unwrap_or(false);
        let angles = o.angles.map(|v| {
            let [a0, a1, b0, b1] = if degrees { v.map(f64::to_radians) } else { v };
            ChshAngles::new(a0, a1, b0, b1)
        });
        let settings = match o.settings {
            None => None,
            Some(SettingsSpec::Uniform) => Some(SettingsDistribution::uniform()),
            Some(SettingsSpec::Explicit(p)) => Some(
                SettingsDistribution::new(p).map_err(|e| ConfigError(format!("invalid settings distribution: {e}")))?,
            ),
        };
        Ok(RunConfig {
            angles,
            settings,
            format: o.format.unwrap_or(Format::Json),
            seed: o.seed.unwrap_or(0),
            n: o.n.unwrap_or(100_000),
            grid: o.grid,
            restarts: o.restarts.unwrap_or(8),
            mode: o.mode.unwrap_or(Mode::Conditional),
            outcomes: o.outcomes.unwrap_or(Outcomes::All),
            strict: o.strict.unwrap_or(false),
        })
    }

    pub fn angles_or_tsirelson(&self) -> ChshAngles {
        self.angles.unwrap_or_else(ChshAngles::tsirelson)
    }

    pub fn settings_or_uniform(&self) -> SettingsDistribution {
        self.settings.unwrap_or_default()
    }
}
