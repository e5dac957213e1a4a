//! Flat `key = value` solver configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is optional;
//! unknown keys are rejected so typos do not silently fall back to defaults.

use std::path::Path;

use fips_core::solver::InitialGuess;
use fips_core::SolverConfig;

use crate::CliError;

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, raw: &str) -> Result<T, CliError> {
    raw.parse().map_err(|_| CliError::Config {
        line,
        message: format!("invalid value {raw:?} for {key}"),
    })
}

/// Applies the settings in `text` on top of `base` and validates the result.
pub fn parse_config(text: &str, base: SolverConfig) -> Result<SolverConfig, CliError> {
    let mut cfg = base;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(CliError::Config {
                line,
                message: format!("expected key=value, got {trimmed:?}"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "max_outer_iters" => cfg.max_outer_iters = parse_value(line, key, value)?,
            "max_inner_iters" => cfg.max_inner_iters = parse_value(line, key, value)?,
            "eq_tolerance" => cfg.eq_tolerance = parse_value(line, key, value)?,
            "ineq_tolerance" => cfg.ineq_tolerance = parse_value(line, key, value)?,
            "step_tolerance" => cfg.step_tolerance = parse_value(line, key, value)?,
            "objective_tolerance" => cfg.objective_tolerance = parse_value(line, key, value)?,
            "stationarity_tolerance" => cfg.stationarity_tolerance = parse_value(line, key, value)?,
            "initial_penalty" => cfg.initial_penalty = parse_value(line, key, value)?,
            "penalty_growth" => cfg.penalty_growth = parse_value(line, key, value)?,
            "max_penalty" => cfg.max_penalty = parse_value(line, key, value)?,
            "lbfgs_memory" => cfg.lbfgs_memory = parse_value(line, key, value)?,
            "multistart" => cfg.multistart = parse_value(line, key, value)?,
            "seed" => cfg.seed = parse_value(line, key, value)?,
            "initial_guess" => {
                cfg.initial_guess = if value == "all_ones" {
                    InitialGuess::AllOnes
                } else {
                    let v = value
                        .split(',')
                        .map(|s| parse_value(line, key, s.trim()))
                        .collect::<Result<Vec<f64>, _>>()?;
                    InitialGuess::Vector(v)
                }
            }
            other => {
                return Err(CliError::Config {
                    line,
                    message: format!("unknown key {other:?}"),
                })
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path, base: SolverConfig) -> Result<SolverConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_keeps_base() {
        assert_eq!(
            parse_config("", SolverConfig::default()).unwrap(),
            SolverConfig::default()
        );
        assert_eq!(
            parse_config("# nothing\n\n   \n", SolverConfig::default()).unwrap(),
            SolverConfig::default()
        );
    }

    #[test]
    fn overrides_and_guess() {
        let cfg = parse_config(
            "max_outer_iters = 7\neq_tolerance=1e-7\nseed = 42\ninitial_guess = 1, 2.5,-3\n",
            SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(cfg.max_outer_iters, 7);
        assert_eq!(cfg.eq_tolerance, 1e-7);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.initial_guess, InitialGuess::Vector(vec![1.0, 2.5, -3.0]));
        let cfg = parse_config("initial_guess=all_ones", cfg).unwrap();
        assert_eq!(cfg.initial_guess, InitialGuess::AllOnes);
    }

    #[test]
    fn rejects_bad_lines() {
        let err = parse_config("a = 1", SolverConfig::default()).unwrap_err();
        assert!(matches!(err, CliError::Config { line: 1, .. }));
        let err = parse_config("\nmax_outer_iters: 3", SolverConfig::default()).unwrap_err();
        assert!(matches!(err, CliError::Config { line: 2, .. }));
        let err = parse_config("seed = -1", SolverConfig::default()).unwrap_err();
        assert!(matches!(err, CliError::Config { .. }));
    }

    #[test]
    fn validates_result() {
        assert!(matches!(
            parse_config("penalty_growth = 0.5", SolverConfig::default()),
            Err(CliError::Core(_))
        ));
    }
}
