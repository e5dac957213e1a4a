//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use fips_core::discretize::build_report;
use fips_core::{
    build_rectangular_fim, build_square_fim, discretize, make_grid, make_problem1, make_problem2, terminal_quadrature,
    validate_problem, AnalyticTestFunction, OcpProblem, Problem1Params, Problem2Params, SolveReport, SolverConfig,
};

use crate::config::load_config;
use crate::output::{
    convergence_csv, matrix_csv, solve_report_csv, to_json, ConvergenceJson, MatrixJson, SolveReportJson,
};
use crate::parallel::{convergence_study, solve_multistart, thread_limit};
use crate::{problem2_solver_config, CliError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fips",
    version,
    about = "Fourier integral pseudospectral solver for periodic optimal control"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Square,
    Rectangular,
    Terminal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quadrature convergence study on the built-in test functions
    QuadStudy {
        /// Comma-separated subset of f1,f2,f3
        #[arg(long, value_delimiter = ',', default_value = "f1,f2,f3")]
        functions: Vec<String>,
        /// Node counts as start:step:stop (inclusive)
        #[arg(long = "n", default_value = "10:10:100")]
        n_range: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output directory (one file per function); standard output when omitted
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a Fourier integration matrix
    FimDump {
        #[arg(long = "N")]
        nodes: usize,
        #[arg(long = "T")]
        period: f64,
        #[arg(long, value_enum, default_value = "square")]
        kind: Kind,
        /// Comma-separated upper limits for the rectangular matrix
        #[arg(long, value_delimiter = ',')]
        points: Vec<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve the double-well oscillator benchmark
    SolveP1 {
        /// Control weight
        #[arg(long)]
        b: f64,
        #[arg(long = "T")]
        period: f64,
        #[arg(long = "N")]
        nodes: usize,
        /// Add the zero-mean periodicity equalities
        #[arg(long)]
        periodicity: bool,
        #[command(flatten)]
        common: SolveArgs,
    },
    /// Solve the solar heating benchmark
    SolveP2 {
        #[arg(long = "N", default_value_t = 50)]
        nodes: usize,
        /// Lower bound on the storage-to-enclosure heat rate
        #[arg(long, default_value_t = Problem2Params::default().eps_u2)]
        eps: f64,
        #[arg(long)]
        periodicity: bool,
        #[command(flatten)]
        common: SolveArgs,
    },
    /// Check dimensions and derivatives of the built-in problems
    Validate,
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    /// Solver settings file (key=value lines)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Record wall-clock time in the report (makes output non-reproducible)
    #[arg(long)]
    timing: bool,
}

/// Parses `start:step:stop` (or a single value) into an inclusive list of even node counts.
pub fn parse_range(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("invalid range {spec:?}; expected start:step:stop"));
    let parts: Vec<usize> = spec
        .split(':')
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (start, step, stop) = match parts[..] {
        [n] => (n, 1, n),
        [a, s, b] if s > 0 && a <= b => (a, s, b),
        _ => return Err(bad()),
    };
    let values: Vec<usize> = (start..=stop).step_by(step).collect();
    if let Some(&odd) = values.iter().find(|&&n| n == 0 || n % 2 != 0) {
        return Err(CliError::Core(fips_core::Error::InvalidNodeCount(odd)));
    }
    Ok(values)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn quad_study(functions: &[String], n_range: &str, format: Format, output: Option<&Path>) -> Result<i32, CliError> {
    let ns = parse_range(n_range)?;
    let fs = functions
        .iter()
        .map(|id| AnalyticTestFunction::builtin(id).ok_or_else(|| CliError::Usage(format!("unknown function {id:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let threads = thread_limit();
    let reports = fs
        .iter()
        .map(|f| convergence_study(f, &ns, threads))
        .collect::<Result<Vec<_>, _>>()?;

    let encode = |r: &fips_core::ConvergenceReport| match format {
        Format::Csv => convergence_csv(r),
        Format::Json => to_json(&ConvergenceJson::from(r)),
    };
    match output {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let ext = if format == Format::Csv { "csv" } else { "json" };
            for r in &reports {
                write_output(Some(&dir.join(format!("{}.{ext}", r.function_id))), &encode(r))?;
            }
        }
        None if format == Format::Json => {
            let all: Vec<ConvergenceJson> = reports.iter().map(ConvergenceJson::from).collect();
            write_output(None, &to_json(&all))?;
        }
        None => {
            let text: Vec<String> = reports
                .iter()
                .map(|r| format!("# {}\n{}", r.function_id, encode(r)))
                .collect();
            write_output(None, &text.join("\n"))?;
        }
    }
    Ok(EXIT_OK)
}

fn fim_dump(
    nodes: usize,
    period: f64,
    kind: Kind,
    points: &[f64],
    format: Format,
    output: Option<&Path>,
) -> Result<i32, CliError> {
    let grid = make_grid(nodes, period)?;
    if kind != Kind::Rectangular && !points.is_empty() {
        return Err(CliError::Usage(String::from(
            "--points only applies to --kind rectangular",
        )));
    }
    let matrix = match kind {
        Kind::Square => build_square_fim(&grid),
        Kind::Rectangular if points.is_empty() => {
            return Err(CliError::Usage(String::from("--kind rectangular needs --points")));
        }
        Kind::Rectangular => build_rectangular_fim(&grid, points)?,
        Kind::Terminal => terminal_quadrature(&grid),
    };
    let text = match format {
        Format::Json => to_json(&MatrixJson::from(&matrix)),
        Format::Csv => matrix_csv(&matrix),
    };
    write_output(output, &text)?;
    Ok(EXIT_OK)
}

/// Discretizes, solves and writes the report; returns 2 when the solver did not converge.
fn solve_and_write<P: OcpProblem + Sync>(
    prob: &P,
    nodes: usize,
    periodicity: bool,
    base: SolverConfig,
    args: &SolveArgs,
) -> Result<i32, CliError> {
    let config = match &args.config {
        Some(path) => load_config(path, base)?,
        None => base,
    };
    let start = Instant::now();
    let report = solve_problem(prob, nodes, periodicity, &config)?;
    let elapsed = start.elapsed().as_secs_f64();
    let report = SolveReport {
        wall_time_s: if args.timing { elapsed } else { 0.0 },
        ..report
    };
    let text = match args.format {
        Format::Json => to_json(&SolveReportJson::from(&report)),
        Format::Csv => solve_report_csv(&report),
    };
    write_output(args.output.as_deref(), &text)?;
    eprintln!(
        "J_N={:.10e} adfe_inf={:.3e} status={} iters={} time={:.3}s",
        report.j_n,
        report.adfe_inf,
        report.solver_status.as_str(),
        report.solver_iters,
        elapsed
    );
    Ok(if report.converged() {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

/// Discretizes and solves with restarts spread over `FIPS_THREADS` threads.
pub fn solve_problem<P: OcpProblem + Sync>(
    prob: &P,
    nodes: usize,
    periodicity: bool,
    config: &SolverConfig,
) -> Result<SolveReport, CliError> {
    let nlp = discretize(prob, nodes, periodicity)?;
    let sol = solve_multistart(&nlp, config, thread_limit())?;
    Ok(build_report(&nlp, &sol)?)
}

fn validate() -> Result<i32, CliError> {
    let p1 = make_problem1(Problem1Params {
        b: 0.2475,
        period: 4.431736,
    })?;
    let p2 = make_problem2(Problem2Params::default())?;
    let mut ok = true;
    for (name, report) in [("problem1", validate_problem(&p1)), ("problem2", validate_problem(&p2))] {
        for c in &report.checks {
            let tag = if c.passed { "ok" } else { "FAIL" };
            if c.message.is_empty() {
                println!("{name}: {tag} {}", c.name);
            } else {
                println!("{name}: {tag} {} ({})", c.name, c.message);
            }
        }
        ok &= report.passed();
    }
    Ok(if ok { EXIT_OK } else { EXIT_INVALID })
}

pub fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::QuadStudy {
            functions,
            n_range,
            format,
            output,
        } => quad_study(&functions, &n_range, format, output.as_deref()),
        Command::FimDump {
            nodes,
            period,
            kind,
            points,
            format,
            output,
        } => fim_dump(nodes, period, kind, &points, format, output.as_deref()),
        Command::SolveP1 {
            b,
            period,
            nodes,
            periodicity,
            common,
        } => {
            let prob = make_problem1(Problem1Params { b, period })?;
            solve_and_write(&prob, nodes, periodicity, SolverConfig::default(), &common)
        }
        Command::SolveP2 {
            nodes,
            eps,
            periodicity,
            common,
        } => {
            let prob = make_problem2(Problem2Params {
                eps_u2: eps,
                ..Problem2Params::default()
            })?;
            solve_and_write(&prob, nodes, periodicity, problem2_solver_config(), &common)
        }
        Command::Validate => validate(),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}
