//! Command-line flags, `key=value` config files and the validated [`RunConfig`].

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use slidewin::{ProblemCase, N_EFF};

use crate::CliError;

/// Default number of simulated sequences.
pub const DEFAULT_TRIALS: u64 = 100_000;

/// Default window fractions for `asymptotic`: 0, 0.05, ..., 1.
pub fn default_w_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

#[derive(Debug, Parser)]
#[command(name = "slidewin", version, about = "Sliding-window secretary problem solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Exact win probability of one policy.
    Solve(Flags),
    /// Win probability by enumerating every rank order (n <= 11).
    Oracle(Flags),
    /// Seeded Monte Carlo estimate of one policy.
    Simulate(Flags),
    /// All optimal thresholds for one (n, k).
    Optimize(Flags),
    /// Optimal normalized thresholds as the population grows.
    Asymptotic(Flags),
    /// Optimal thresholds and win probabilities over a range of n and k.
    Table(Flags),
}

impl CommandArgs {
    pub fn split(self) -> (Command, Flags) {
        match self {
            CommandArgs::Solve(f) => (Command::Solve, f),
            CommandArgs::Oracle(f) => (Command::Oracle, f),
            CommandArgs::Simulate(f) => (Command::Simulate, f),
            CommandArgs::Optimize(f) => (Command::Optimize, f),
            CommandArgs::Asymptotic(f) => (Command::Asymptotic, f),
            CommandArgs::Table(f) => (Command::Table, f),
        }
    }
}

/// Flags shared by every subcommand. Each one can also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// best1, best2 or twochoice.
    #[arg(short, long)]
    pub case: Option<ProblemCase>,
    /// Number of applicants.
    #[arg(short, long)]
    pub n: Option<usize>,
    /// Window size.
    #[arg(short, long)]
    pub k: Option<usize>,
    /// Best-1 threshold.
    #[arg(short, long)]
    pub d: Option<usize>,
    /// First threshold (Best-2 and 2-Choice).
    #[arg(long, visible_alias = "delta1")]
    pub d1: Option<usize>,
    /// Second threshold (Best-2 and 2-Choice).
    #[arg(long, visible_alias = "delta2")]
    pub d2: Option<usize>,
    #[arg(short, long)]
    pub trials: Option<u64>,
    #[arg(short, long)]
    pub seed: Option<u64>,
    /// Normalized window sizes, comma separated or repeated.
    #[arg(short, long, value_delimiter = ',')]
    pub w: Option<Vec<f64>>,
    /// Population used for normalized quantities.
    #[arg(long)]
    pub n_eff: Option<usize>,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub k_min: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(short, long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the result here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Compare `solve` against exhaustive enumeration (n <= 8).
    #[arg(long)]
    pub check_oracle: bool,
    /// `key=value` file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Flags {
    /// Fills every unset flag from `other`.
    pub fn or(self, other: Flags) -> Flags {
        Flags {
            case: self.case.or(other.case),
            n: self.n.or(other.n),
            k: self.k.or(other.k),
            d: self.d.or(other.d),
            d1: self.d1.or(other.d1),
            d2: self.d2.or(other.d2),
            trials: self.trials.or(other.trials),
            seed: self.seed.or(other.seed),
            w: self.w.or(other.w),
            n_eff: self.n_eff.or(other.n_eff),
            n_min: self.n_min.or(other.n_min),
            n_max: self.n_max.or(other.n_max),
            k_min: self.k_min.or(other.k_min),
            k_max: self.k_max.or(other.k_max),
            format: self.format.or(other.format),
            output: self.output.or(other.output),
            check_oracle: self.check_oracle || other.check_oracle,
            config: self.config,
        }
    }

    /// Reads a `key=value` file. Keys are the long flag names; `#` starts a comment.
    pub fn from_config_file(path: &Path) -> Result<Flags, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Flags::from_config_str(&text)
    }

    pub fn from_config_str(text: &str) -> Result<Flags, CliError> {
        let mut flags = Flags::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::Usage(format!("config line {}: {msg}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {line:?}")))?;
            let (key, value) = (key.trim().replace('_', "-"), value.trim());
            match key.as_str() {
                "case" => flags.case = Some(parse(value).map_err(bad)?),
                "n" => flags.n = Some(parse(value).map_err(bad)?),
                "k" => flags.k = Some(parse(value).map_err(bad)?),
                "d" => flags.d = Some(parse(value).map_err(bad)?),
                "d1" | "delta1" => flags.d1 = Some(parse(value).map_err(bad)?),
                "d2" | "delta2" => flags.d2 = Some(parse(value).map_err(bad)?),
                "trials" => flags.trials = Some(parse(value).map_err(bad)?),
                "seed" => flags.seed = Some(parse(value).map_err(bad)?),
                "w" => {
                    let grid = value.split(',').map(|v| parse(v.trim())).collect::<Result<_, _>>();
                    flags.w = Some(grid.map_err(bad)?);
                }
                "n-eff" => flags.n_eff = Some(parse(value).map_err(bad)?),
                "n-min" => flags.n_min = Some(parse(value).map_err(bad)?),
                "n-max" => flags.n_max = Some(parse(value).map_err(bad)?),
                "k-min" => flags.k_min = Some(parse(value).map_err(bad)?),
                "k-max" => flags.k_max = Some(parse(value).map_err(bad)?),
                "format" => {
                    let f = OutputFormat::from_str(value, true).map_err(|e| bad(e.to_string()))?;
                    flags.format = Some(f);
                }
                "output" => flags.output = Some(PathBuf::from(value)),
                "check-oracle" => flags.check_oracle = parse(value).map_err(bad)?,
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        Ok(flags)
    }
}

fn parse<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| format!("{value:?}: {e}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Oracle,
    Simulate,
    Optimize,
    Asymptotic,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Validated settings of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub case: ProblemCase,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub thresholds: Option<Vec<usize>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub w_grid: Option<Vec<f64>>,
    pub n_eff: Option<usize>,
    pub n_range: Option<(usize, usize)>,
    pub k_range: Option<(usize, usize)>,
    pub check_oracle: bool,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    /// Checks that `command` has everything it needs.
    pub fn new(command: Command, flags: Flags) -> Result<RunConfig, CliError> {
        let flags = match &flags.config {
            Some(path) => {
                let file = Flags::from_config_file(path)?;
                flags.or(file)
            }
            None => flags,
        };
        let need = |what: &str| CliError::Usage(format!("{command:?} needs --{what}").to_lowercase());
        let case = flags.case.ok_or_else(|| need("case"))?;
        let output_format = flags.format.unwrap_or(match command {
            Command::Table => OutputFormat::Csv,
            _ => OutputFormat::Text,
        });
        let mut cfg = RunConfig {
            command,
            case,
            n: flags.n,
            k: flags.k,
            thresholds: None,
            trials: None,
            seed: None,
            w_grid: None,
            n_eff: None,
            n_range: None,
            k_range: None,
            check_oracle: flags.check_oracle,
            output_format,
            output_path: flags.output.clone(),
        };
        match command {
            Command::Solve | Command::Oracle | Command::Simulate => {
                flags.n.ok_or_else(|| need("n"))?;
                flags.k.ok_or_else(|| need("k"))?;
                cfg.thresholds = Some(thresholds(case, &flags)?);
                if command == Command::Simulate {
                    cfg.trials = Some(flags.trials.unwrap_or(DEFAULT_TRIALS));
                    cfg.seed = Some(flags.seed.unwrap_or(0));
                }
            }
            Command::Optimize => {
                flags.n.ok_or_else(|| need("n"))?;
                flags.k.ok_or_else(|| need("k"))?;
            }
            Command::Asymptotic => {
                cfg.w_grid = Some(flags.w.clone().unwrap_or_else(default_w_grid));
                cfg.n_eff = Some(flags.n_eff.unwrap_or(N_EFF));
            }
            Command::Table => {
                let lo = flags.n_min.or(flags.n).ok_or_else(|| need("n-min"))?;
                let hi = flags.n_max.or(flags.n).unwrap_or(lo);
                if lo > hi {
                    return Err(CliError::Usage(format!("empty n range {lo}..={hi}")));
                }
                cfg.n_range = Some((lo, hi));
                if flags.k_min.is_some() || flags.k_max.is_some() {
                    cfg.k_range = Some((flags.k_min.unwrap_or(1), flags.k_max.unwrap_or(usize::MAX)));
                }
            }
        }
        Ok(cfg)
    }
}

fn thresholds(case: ProblemCase, flags: &Flags) -> Result<Vec<usize>, CliError> {
    let missing = |what: &str| CliError::Usage(format!("case {case} needs --{what}"));
    Ok(match case {
        ProblemCase::Best1 => vec![flags.d.ok_or_else(|| missing("d"))?],
        ProblemCase::Best2 | ProblemCase::TwoChoice => vec![
            flags.d1.ok_or_else(|| missing("d1"))?,
            flags.d2.ok_or_else(|| missing("d2"))?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_parses() {
        let f = Flags::from_config_str("case = best2 # trailing\n\nn=9\nk=5\nd1=1\nd2=2\nw=0.1, 0.2\nformat=json\n")
            .unwrap();
        assert_eq!(f.case, Some(ProblemCase::Best2));
        assert_eq!((f.n, f.k, f.d1, f.d2), (Some(9), Some(5), Some(1), Some(2)));
        assert_eq!(f.w, Some(vec![0.1, 0.2]));
        assert_eq!(f.format, Some(OutputFormat::Json));
    }

    #[test]
    fn config_text_errors() {
        assert!(Flags::from_config_str("n 9").is_err());
        assert!(Flags::from_config_str("colour=red").is_err());
        assert!(Flags::from_config_str("n=-1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let cli = Flags { n: Some(7), ..Flags::default() };
        let file = Flags { n: Some(9), k: Some(3), ..Flags::default() };
        let merged = cli.or(file);
        assert_eq!((merged.n, merged.k), (Some(7), Some(3)));
    }

    #[test]
    fn missing_fields_are_usage_errors() {
        let flags = Flags { case: Some(ProblemCase::Best1), n: Some(6), k: Some(2), ..Flags::default() };
        assert!(matches!(RunConfig::new(Command::Solve, flags.clone()), Err(CliError::Usage(_))));
        assert!(RunConfig::new(Command::Optimize, flags).is_ok());
        assert!(matches!(RunConfig::new(Command::Table, Flags::default()), Err(CliError::Usage(_))));
    }
}
