mod config;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use bellspace::inequalities::{bell_original_from_measure, chsh_conditional, chsh_partial};
use bellspace::lhv::{factorizability_fit, fourier_witness_check, m_separability_search, no_signaling_report, SeparabilityOptions};
use bellspace::montecarlo::{empirical_measure, empirical_partial_expectation, sample};
use bellspace::{chsh_measure, ChshAngles, SettingsDistribution};
use clap::{Args, Parser, Subcommand};

use crate::config::{parse_four, ConfigError, Format, Mode, Outcomes, Overrides, RunConfig, SettingsSpec};
use crate::render::Rendered;

#[derive(Debug, Parser)]
#[command(name = "bellspace", version, about = "Probability model of the CHSH/Bell experiment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the 16-cell joint measure.
    Measure,
    /// Evaluate the CHSH combination with conditional or partial expectations.
    Chsh,
    /// Evaluate the original three-setting Bell inequality.
    Bell,
    /// Check that marginals do not depend on the remote setting.
    Nosignal,
    /// Fit a product of Bernoulli distributions to the measure.
    Factorize,
    /// Verify the Fourier witness against Bell separability.
    Witness,
    /// Search for a hidden-variable model within margin m of the Born target.
    LhvFit,
    /// Draw a seeded series of single experiments.
    Sample {
        /// Also write the packed binary layout to this file.
        #[arg(long)]
        binary: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Flags {
    /// Detector angles a0,a1,b0,b1 (radians unless --degrees).
    #[arg(long, global = true, value_parser = parse_four, allow_hyphen_values = true)]
    angles: Option<[f64; 4]>,
    /// `uniform` or p00,p01,p10,p11.
    #[arg(long, global = true)]
    settings: Option<SettingsSpec>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of sampled trials.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Grid size: hidden-variable cells for lhv-fit, integration nodes for witness.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Outcomes constrained by lhv-fit.
    #[arg(long, global = true, value_enum)]
    outcomes: Option<Outcomes>,
    /// Exit with status 1 when an inequality is violated.
    #[arg(long, global = true)]
    strict: bool,
    /// Interpret --angles in degrees.
    #[arg(long, global = true)]
    degrees: bool,
    /// Key-value config file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            angles: self.angles,
            settings: self.settings,
            format: self.format,
            seed: self.seed,
            n: self.n,
            grid: self.grid,
            restarts: self.restarts,
            mode: self.mode,
            outcomes: self.outcomes,
            strict: self.strict.then_some(true),
            degrees: self.degrees.then_some(true),
        }
    }
}

enum Failure {
    Usage(String),
    Violation(Rendered),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<bellspace::Error> for Failure {
    fn from(e: bellspace::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::SUCCESS
        }
        Err(Failure::Violation(out)) => {
            print!("{}", out.text);
            eprintln!("inequality violated (strict mode)");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_config(flags: &Flags) -> Result<RunConfig, Failure> {
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
            Overrides::parse_file(&text)?
        }
        None => Overrides::default(),
    };
    Ok(RunConfig::resolve(flags.overrides().over(file))?)
}

fn run(cli: &Cli) -> Result<Rendered, Failure> {
    let cfg = load_config(&cli.flags)?;
    let fmt = cfg.format;
    match &cli.command {
        Command::Measure => {
            let m = chsh_measure(cfg.angles_or_tsirelson(), cfg.settings_or_uniform());
            Ok(render::measure(&m, fmt))
        }
        Command::Chsh => {
            let m = chsh_measure(cfg.angles_or_tsirelson(), cfg.settings_or_uniform());
            let report = match cfg.mode {
                Mode::Conditional => chsh_conditional(&m)?,
                Mode::Partial => chsh_partial(&m),
            };
            let out = render::chsh(&report, cfg.mode, fmt);
            strict_gate(cfg.strict, report.satisfied, out)
        }
        Command::Bell => {
            let angles = cfg.angles.unwrap_or_else(ChshAngles::bell);
            let settings = cfg.settings.unwrap_or_else(SettingsDistribution::bell);
            let report = bell_original_from_measure(&chsh_measure(angles, settings))?;
            let out = render::bell(&report, fmt);
            strict_gate(cfg.strict, report.satisfied, out)
        }
        Command::Nosignal => {
            let m = chsh_measure(cfg.angles_or_tsirelson(), cfg.settings_or_uniform());
            Ok(render::nosignal(&no_signaling_report(&m), fmt))
        }
        Command::Factorize => {
            let m = chsh_measure(cfg.angles_or_tsirelson(), cfg.settings_or_uniform());
            Ok(render::factorize(&factorizability_fit(&m)?, fmt))
        }
        Command::Witness => {
            let report = fourier_witness_check(cfg.grid.unwrap_or(10_000))?;
            Ok(render::witness(&report, fmt))
        }
        Command::LhvFit => {
            let opts = SeparabilityOptions::new(cfg.grid.unwrap_or(16), cfg.restarts, cfg.seed).with_scope(cfg.outcomes.into());
            let result = m_separability_search(&cfg.angles_or_tsirelson(), &opts)?;
            Ok(render::lhv_fit(&result, fmt))
        }
        Command::Sample { binary } => {
            let m = chsh_measure(cfg.angles_or_tsirelson(), cfg.settings_or_uniform());
            let series = sample(&m, cfg.n, cfg.seed)?;
            if let Some(path) = binary {
                std::fs::write(path, series.to_bytes())
                    .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            }
            if fmt == Format::Csv {
                return Ok(Rendered { text: series.to_csv() });
            }
            let empirical = empirical_measure(&series)?;
            let partials = [(0, 0), (1, 0), (1, 1), (0, 1)]
                .map(|(i, j)| empirical_partial_expectation(&series, i, j).expect("series is nonempty"));
            Ok(render::sample_summary(&series, &m, &empirical, partials, fmt))
        }
    }
}

fn strict_gate(strict: bool, satisfied: bool, out: Rendered) -> Result<Rendered, Failure> {
    if strict && !satisfied {
        Err(Failure::Violation(out))
    } else {
        Ok(out)
    }
}
