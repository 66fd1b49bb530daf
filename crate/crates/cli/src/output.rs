//! Rendering of command results.
//!
//! CSV columns, in order:
//!
//! | command      | columns                                                   |
//! |--------------|-----------------------------------------------------------|
//! | `solve`      | `n,k,case,thresholds,p_win`                               |
//! | `oracle`     | `n,k,case,thresholds,numerator,denominator,p_win`         |
//! | `simulate`   | `n,k,case,thresholds,trials,seed,wins,p_hat,std_err`      |
//! | `optimize`   | `n,k,case,thresholds,p_win`                               |
//! | `asymptotic` | `case,w,rho1,rho2,p_win` (`rho2` empty for Best-1)        |
//! | `table`      | `n,k,thresholds,p_win`                                    |
//!
//! `thresholds` holds `d` or `d1:d2`; several optimal policies are joined by
//! `;`. Probabilities in CSV and text are shown with 4 decimals, JSON keeps
//! full precision.

use std::fmt::Write as _;

use csv::{Terminator, WriterBuilder};

use crate::{CliError, CommandResult, OutputFormat, Report, RunConfig};

/// Four decimals; ties between two representable neighbours go to the even digit.
pub fn fixed4(x: f64) -> String {
    format!("{x:.4}")
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn thresholds(xs: &[usize]) -> String {
    join(xs, ":")
}

pub fn render(cfg: &RunConfig, result: &CommandResult) -> Result<String, CliError> {
    match cfg.output_format {
        OutputFormat::Json => {
            let report = Report { config: cfg.clone(), result: result.clone() };
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Usage(format!("cannot serialize result: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => csv(result),
        OutputFormat::Text => Ok(text(result)),
    }
}

fn csv(result: &CommandResult) -> Result<String, CliError> {
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match result {
        CommandResult::Solve(r) => (
            vec!["n", "k", "case", "thresholds", "p_win"],
            vec![vec![
                r.n.to_string(),
                r.k.to_string(),
                r.case.to_string(),
                thresholds(&r.thresholds),
                fixed4(r.p_win),
            ]],
        ),
        CommandResult::Oracle(r) => (
            vec!["n", "k", "case", "thresholds", "numerator", "denominator", "p_win"],
            vec![vec![
                r.n.to_string(),
                r.k.to_string(),
                r.case.to_string(),
                thresholds(&r.thresholds),
                r.exact.numerator().to_string(),
                r.exact.denominator().to_string(),
                fixed4(r.exact.to_f64()),
            ]],
        ),
        CommandResult::Simulate(r) => (
            vec!["n", "k", "case", "thresholds", "trials", "seed", "wins", "p_hat", "std_err"],
            vec![vec![
                r.n.to_string(),
                r.k.to_string(),
                r.case.to_string(),
                thresholds(&r.thresholds),
                r.estimate.trials.to_string(),
                r.estimate.seed.to_string(),
                r.estimate.wins.to_string(),
                fixed4(r.estimate.p_hat),
                fixed4(r.estimate.std_err),
            ]],
        ),
        CommandResult::Optimize(r) => (
            vec!["n", "k", "case", "thresholds", "p_win"],
            vec![vec![
                r.n.to_string(),
                r.k.to_string(),
                r.case.to_string(),
                join(&r.best_policies, ";"),
                fixed4(r.p_win),
            ]],
        ),
        CommandResult::Asymptotic(r) => (
            vec!["case", "w", "rho1", "rho2", "p_win"],
            r.points
                .iter()
                .map(|p| {
                    let rho = |i: usize| p.rho_star.get(i).map(|&x| fixed4(x)).unwrap_or_default();
                    vec![r.case.to_string(), fixed4(p.w), rho(0), rho(1), fixed4(p.p_win)]
                })
                .collect(),
        ),
        CommandResult::Table(r) => (
            vec!["n", "k", "thresholds", "p_win"],
            r.rows
                .iter()
                .map(|row| vec![row.n.to_string(), row.k.to_string(), row.thresholds.clone(), fixed4(row.p_win)])
                .collect(),
        ),
    };
    let mut w = WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(Vec::new());
    let to_usage = |e: csv::Error| CliError::Usage(format!("cannot write CSV: {e}"));
    w.write_record(&header).map_err(to_usage)?;
    for row in rows {
        w.write_record(&row).map_err(to_usage)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Usage(e.to_string()))
}

fn text(result: &CommandResult) -> String {
    let mut s = String::new();
    match result {
        CommandResult::Solve(r) => {
            let _ = writeln!(
                s,
                "{} n={} k={} thresholds={}: p_win = {}",
                r.case,
                r.n,
                r.k,
                thresholds(&r.thresholds),
                fixed4(r.p_win)
            );
            if let Some(exact) = &r.oracle {
                let _ = writeln!(s, "oracle: {exact}");
            }
        }
        CommandResult::Oracle(r) => {
            let _ = writeln!(s, "{}", r.exact);
        }
        CommandResult::Simulate(r) => {
            let e = &r.estimate;
            let _ = writeln!(
                s,
                "p_hat = {} +- {} ({} wins in {} trials, seed {})",
                fixed4(e.p_hat),
                fixed4(e.std_err),
                e.wins,
                e.trials,
                e.seed
            );
        }
        CommandResult::Optimize(r) => {
            let _ = writeln!(s, "thresholds = {}", join(&r.best_policies, ";"));
            let _ = writeln!(s, "p_win = {}", fixed4(r.p_win));
        }
        CommandResult::Asymptotic(r) => {
            for p in &r.points {
                let rho = p.rho_star.iter().map(|&x| fixed4(x)).collect::<Vec<_>>().join(", ");
                let _ = writeln!(s, "w = {}  rho* = ({rho})  p_win = {}", fixed4(p.w), fixed4(p.p_win));
            }
        }
        CommandResult::Table(r) => {
            let width = r.rows.iter().map(|row| row.thresholds.len()).max().unwrap_or(0).max(10);
            let _ = writeln!(s, "{:>4} {:>4}  {:<width$}  p_win", "n", "k", "thresholds");
            for row in &r.rows {
                let _ = writeln!(s, "{:>4} {:>4}  {:<width$}  {}", row.n, row.k, row.thresholds, fixed4(row.p_win));
            }
        }
    }
    s
}
