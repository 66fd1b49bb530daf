//! Command-line front end for the `slidewin` solvers.
//!
//! Every command produces one result value that is rendered as JSON, CSV or
//! plain text. JSON output is `{"config": RunConfig, ...result fields}`.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde::{Deserialize, Serialize};
use slidewin::optimize::{self, CurvePoint};
use slidewin::oracle::{self, ExactProbability, MonteCarloEstimate};
use slidewin::{best1, best2, twochoice, Policy, ProblemCase, ProblemSpec};

pub use config::{Cli, Command, Flags, OutputFormat, RunConfig};

/// Largest `n` accepted by `table`.
pub const MAX_TABLE_N: usize = 30;

/// Largest `n` checked by `solve --check-oracle`.
pub const MAX_CHECK_N: usize = 8;

/// Largest allowed gap between a formula and the oracle under `--check-oracle`.
pub const CHECK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Disagreement(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Resource(_) => 2,
            CliError::Disagreement(_) => 3,
        }
    }
}

impl From<slidewin::Error> for CliError {
    fn from(e: slidewin::Error) -> Self {
        match e {
            slidewin::Error::Resource(_) => CliError::Resource(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Result of `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub n: usize,
    pub k: usize,
    pub case: ProblemCase,
    pub thresholds: Vec<usize>,
    pub p_win: f64,
    /// Present when `--check-oracle` ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<ExactProbability>,
}

/// Result of `oracle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub n: usize,
    pub k: usize,
    pub case: ProblemCase,
    pub thresholds: Vec<usize>,
    pub exact: ExactProbability,
}

/// Result of `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResult {
    pub n: usize,
    pub k: usize,
    pub case: ProblemCase,
    pub thresholds: Vec<usize>,
    pub estimate: MonteCarloEstimate,
}

/// Result of `optimize`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub n: usize,
    pub k: usize,
    pub case: ProblemCase,
    pub best_policies: Vec<Policy>,
    pub p_win: f64,
}

/// Result of `asymptotic`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticResult {
    pub case: ProblemCase,
    pub n_eff: usize,
    pub points: Vec<CurvePoint>,
}

/// One row of `table`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub k: usize,
    /// Every optimal policy, joined by `;`.
    pub thresholds: String,
    pub p_win: f64,
}

/// Result of `table`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableResult {
    pub case: ProblemCase,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CommandResult {
    Solve(SolveResult),
    Oracle(OracleResult),
    Simulate(SimulateResult),
    Optimize(OptimizeResult),
    Asymptotic(AsymptoticResult),
    Table(TableResult),
}

/// What a JSON run writes: the configuration next to the result fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub config: RunConfig,
    #[serde(flatten)]
    pub result: T,
}

/// Parses `args` (program name first), runs the command and writes the
/// rendered result to `--output` or `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    let (command, flags) = cli.command.split();
    let cfg = RunConfig::new(command, flags)?;
    configure_threads()?;
    let (result, check) = execute(&cfg)?;
    let rendered = output::render(&cfg, &result)?;
    match &cfg.output_path {
        Some(path) => std::fs::write(path, rendered)?,
        None => stdout.write_all(rendered.as_bytes())?,
    }
    check
}

/// Applies `SLIDEWIN_THREADS` (0 or unset = one thread per core).
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SLIDEWIN_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("SLIDEWIN_THREADS={raw:?} is not a count")))?;
    // A second call in the same process finds the pool already built; that is fine.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Runs a validated configuration. The second value is the outcome of any
/// requested cross-check, reported after the result has been written.
pub fn execute(cfg: &RunConfig) -> Result<(CommandResult, Result<(), CliError>), CliError> {
    let ok = Ok(());
    Ok(match cfg.command {
        Command::Solve => {
            let (spec, policy) = spec_and_policy(cfg)?;
            let p_win = solve(&spec, &policy)?;
            let mut result = SolveResult {
                n: spec.n,
                k: spec.k,
                case: spec.case,
                thresholds: policy.thresholds(),
                p_win,
                oracle: None,
            };
            let mut check = ok;
            if cfg.check_oracle && spec.n <= MAX_CHECK_N {
                let exact = oracle::exact_win_probability(&spec, &policy)?;
                let gap = (exact.to_f64() - p_win).abs();
                if gap > CHECK_TOLERANCE {
                    check = Err(CliError::Disagreement(format!(
                        "formula gives {p_win}, enumeration gives {exact} (gap {gap:e})"
                    )));
                }
                result.oracle = Some(exact);
            }
            (CommandResult::Solve(result), check)
        }
        Command::Oracle => {
            let (spec, policy) = spec_and_policy(cfg)?;
            let exact = oracle::exact_win_probability(&spec, &policy)?;
            let result = OracleResult {
                n: spec.n,
                k: spec.k,
                case: spec.case,
                thresholds: policy.thresholds(),
                exact,
            };
            (CommandResult::Oracle(result), ok)
        }
        Command::Simulate => {
            let (spec, policy) = spec_and_policy(cfg)?;
            let trials = cfg.trials.unwrap_or(config::DEFAULT_TRIALS);
            let estimate = oracle::monte_carlo(&spec, &policy, trials, cfg.seed.unwrap_or(0))?;
            let result = SimulateResult {
                n: spec.n,
                k: spec.k,
                case: spec.case,
                thresholds: policy.thresholds(),
                estimate,
            };
            (CommandResult::Simulate(result), ok)
        }
        Command::Optimize => {
            let spec = ProblemSpec::new(required(cfg.n, "n")?, required(cfg.k, "k")?, cfg.case)?;
            let opt = optimize::optimal(&spec)?;
            let result = OptimizeResult {
                n: spec.n,
                k: spec.k,
                case: spec.case,
                best_policies: opt.best_policies,
                p_win: opt.p_win,
            };
            (CommandResult::Optimize(result), ok)
        }
        Command::Asymptotic => {
            let grid = cfg.w_grid.clone().unwrap_or_else(config::default_w_grid);
            let n_eff = cfg.n_eff.unwrap_or(slidewin::N_EFF);
            let points = optimize::asymptotic_curve_at(cfg.case, &grid, n_eff)?;
            (CommandResult::Asymptotic(AsymptoticResult { case: cfg.case, n_eff, points }), ok)
        }
        Command::Table => (CommandResult::Table(table(cfg)?), ok),
    })
}

fn required<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{name}")))
}

fn spec_and_policy(cfg: &RunConfig) -> Result<(ProblemSpec, Policy), CliError> {
    let spec = ProblemSpec::new(required(cfg.n, "n")?, required(cfg.k, "k")?, cfg.case)?;
    let thresholds = cfg.thresholds.as_deref().unwrap_or(&[]);
    let policy = Policy::from_thresholds(cfg.case, thresholds)?.validated(&spec)?;
    Ok((spec, policy))
}

/// Exact win probability through the case's recursion.
pub fn solve(spec: &ProblemSpec, policy: &Policy) -> Result<f64, CliError> {
    let (n, k) = (spec.n, spec.k);
    Ok(match *policy {
        Policy::Best1 { d } => best1::win_probability(n, k, d)?,
        Policy::Best2 { d1, d2 } => best2::win_probability(n, k, d1, d2)?,
        Policy::TwoChoice { delta1, delta2 } => twochoice::win_probability(n, k, delta1, delta2)?,
    })
}

/// Default window sizes listed for each `n` by `table`.
pub fn default_k_range(case: ProblemCase, n: usize) -> std::ops::RangeInclusive<usize> {
    match case {
        ProblemCase::Best1 => 2..=n.saturating_sub(3),
        ProblemCase::Best2 => 2..=n.saturating_sub(2),
        ProblemCase::TwoChoice => 1..=n.saturating_sub(1),
    }
}

fn table(cfg: &RunConfig) -> Result<TableResult, CliError> {
    let (lo, hi) = required(cfg.n_range, "n-min")?;
    if hi > MAX_TABLE_N {
        return Err(CliError::Resource(format!("table is capped at n={MAX_TABLE_N}, got n={hi}")));
    }
    if lo == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for n in lo..=hi {
        let ks = match cfg.k_range {
            Some((a, b)) => a.max(1)..=b.min(n),
            None => default_k_range(cfg.case, n),
        };
        for k in ks {
            let opt = optimize::optimal(&ProblemSpec::new(n, k, cfg.case)?)?;
            let thresholds =
                opt.best_policies.iter().map(Policy::to_string).collect::<Vec<_>>().join(";");
            rows.push(TableRow { n, k, thresholds, p_win: opt.p_win });
        }
    }
    Ok(TableResult { case: cfg.case, rows })
}
