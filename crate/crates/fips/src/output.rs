//! CSV and JSON encodings of reports and matrices.
//!
//! CSV floats use 17 significant digits so every value re-parses to the same
//! bits; JSON floats use serde_json's shortest round-trip form.

use std::fmt::Write as _;

use fips_core::{ConvergenceReport, IntegrationMatrix, SolveReport};
use serde::Serialize;

/// 17 significant digits in scientific notation.
pub fn csv_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

pub fn convergence_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from("N,inf_error,euclid_error,bound\n");
    for p in report.points() {
        let bound = p.bound.map(csv_float).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{}",
            p.n,
            csv_float(p.inf_error),
            csv_float(p.euclid_error),
            bound
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Serialize)]
pub struct ConvergenceJson<'a> {
    pub function: &'a str,
    #[serde(rename = "N")]
    pub n: &'a [usize],
    pub inf_error: &'a [f64],
    pub euclid_error: &'a [f64],
    pub bound: Option<&'a [f64]>,
}

impl<'a> From<&'a ConvergenceReport> for ConvergenceJson<'a> {
    fn from(r: &'a ConvergenceReport) -> Self {
        Self {
            function: &r.function_id,
            n: &r.n_values,
            inf_error: &r.inf_errors,
            euclid_error: &r.euclid_errors,
            bound: r.bound_values.as_deref(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MatrixJson<'a> {
    pub kind: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub period: f64,
    pub eval_points: &'a [f64],
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub entries: Vec<Vec<f64>>,
    pub max_imag_residual: f64,
}

impl<'a> From<&'a IntegrationMatrix> for MatrixJson<'a> {
    fn from(m: &'a IntegrationMatrix) -> Self {
        let e = m.entries();
        Self {
            kind: m.kind().as_str(),
            n: m.grid().len(),
            period: m.grid().period(),
            eval_points: m.eval_points(),
            rows: e.rows(),
            cols: e.cols(),
            entries: (0..e.rows()).map(|r| e.row(r).to_vec()).collect(),
            max_imag_residual: m.max_imag_residual(),
        }
    }
}

pub fn matrix_csv(m: &IntegrationMatrix) -> String {
    let e = m.entries();
    let mut out = String::new();
    for r in 0..e.rows() {
        let row: Vec<String> = e.row(r).iter().map(|&v| csv_float(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
pub struct KktJson {
    pub stationarity_inf: f64,
    pub eq_inf: f64,
    pub ineq_violation: f64,
    pub complementarity_inf: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveReportJson<'a> {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub period: f64,
    pub periodicity: bool,
    #[serde(rename = "J_N")]
    pub j_n: f64,
    pub adfe_inf: f64,
    pub adfe: &'a [f64],
    pub solver_status: &'static str,
    pub solver_iters: usize,
    pub solver_message: &'a str,
    pub wall_time_s: f64,
    pub path_slack_min: &'a [f64],
    pub kkt: KktJson,
    /// N rows of n states.
    pub x_nodes: Vec<Vec<f64>>,
    /// N rows of m controls.
    pub u_nodes: Vec<Vec<f64>>,
}

impl<'a> From<&'a SolveReport> for SolveReportJson<'a> {
    fn from(r: &'a SolveReport) -> Self {
        let rows = |m: &fips_core::DenseMatrix| (0..m.rows()).map(|j| m.row(j).to_vec()).collect();
        Self {
            n: r.nodes,
            period: r.period,
            periodicity: r.enforce_periodicity,
            j_n: r.j_n,
            adfe_inf: r.adfe_inf,
            adfe: &r.adfe,
            solver_status: r.solver_status.as_str(),
            solver_iters: r.solver_iters,
            solver_message: &r.solver_message,
            wall_time_s: r.wall_time_s,
            path_slack_min: &r.path_slack_min,
            kkt: KktJson {
                stationarity_inf: r.kkt.stationarity_inf,
                eq_inf: r.kkt.eq_inf,
                ineq_violation: r.kkt.ineq_violation,
                complementarity_inf: r.kkt.complementarity_inf,
            },
            x_nodes: rows(&r.x_nodes),
            u_nodes: rows(&r.u_nodes),
        }
    }
}

/// One row per node: `t,x1..xn,u1..um`.
pub fn solve_report_csv(r: &SolveReport) -> String {
    let (n, m) = (r.x_nodes.cols(), r.u_nodes.cols());
    let mut header = vec![String::from("t")];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=m).map(|k| format!("u{k}")));
    let mut out = header.join(",");
    out.push('\n');
    for j in 0..r.nodes {
        let t = r.period * j as f64 / r.nodes as f64;
        let fields: Vec<String> = std::iter::once(t)
            .chain(r.x_nodes.row(j).iter().copied())
            .chain(r.u_nodes.row(j).iter().copied())
            .map(csv_float)
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}
