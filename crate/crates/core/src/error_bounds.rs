//! Quadrature error bounds for analytic periodic functions and the
//! convergence study that compares them with measured errors.
//!
//! For f analytic on the closed strip |Im z| ≤ β with sup-norm ‖f‖, the
//! cumulative quadrature Θ·f at the nodes satisfies
//!
//! ```text
//! ‖∫_0^{t_N} f − Θ f‖₂ ≤ μ_{T,β} ‖f‖ e^{−πNβ/T} ‖√t_N‖₂,
//! μ_{T,β} = sqrt(2T (sqrt(coth ω_β) + coth ω_β)),  ω_β = 2πβ/T.
//! ```

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::{make_grid, EquispacedGrid};
use crate::integration::{apply_quadrature, build_square_fim};
use crate::linalg::{norm2, norm_inf};

/// Fraction of the distance to the nearest pole used as the strip half-width.
pub const STRIP_MARGIN: f64 = 0.999;

/// max |f2(x + iy)| on [0, 2π] × [−β, β], β = 0.999·ln(2 + √3).
/// Produced by `scripts/sup_norms.py` (2001×201 grid search).
pub const F2_SUP_NORM: f64 = 438.730_367_507_219;

/// max |f3(x + iy)| on [0, π] × [−β, β], β = 0.999·ln(4 + √17).
/// Produced by `scripts/sup_norms.py` (2001×201 grid search).
pub const F3_SUP_NORM: f64 = 14.503_437_291_858_1;

type RealFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A periodic test function with its analyticity strip and exact antiderivative.
pub struct AnalyticTestFunction {
    id: String,
    period: f64,
    beta: f64,
    sup_norm_on_strip: f64,
    evaluator: RealFn,
    exact_cumulative: RealFn,
}

impl core::fmt::Debug for AnalyticTestFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("AnalyticTestFunction")
            .field("id", &self.id)
            .field("period", &self.period)
            .field("beta", &self.beta)
            .field("sup_norm_on_strip", &self.sup_norm_on_strip)
            .finish_non_exhaustive()
    }
}

impl AnalyticTestFunction {
    /// User-supplied function. `beta` may be `f64::INFINITY` for entire functions.
    pub fn new(
        id: impl Into<String>,
        period: f64,
        beta: f64,
        sup_norm_on_strip: f64,
        evaluator: impl Fn(f64) -> f64 + Send + Sync + 'static,
        exact_cumulative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidPeriod(period));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: "strip half-width must be positive".to_string(),
            });
        }
        if !(sup_norm_on_strip > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sup_norm_on_strip",
                reason: "must be positive".to_string(),
            });
        }
        Ok(Self {
            id: id.into(),
            period,
            beta,
            sup_norm_on_strip,
            evaluator: Box::new(evaluator),
            exact_cumulative: Box::new(exact_cumulative),
        })
    }

    /// f1(t) = 2 sin(3t − 1) + 1 on T = 2π/3; entire.
    pub fn f1() -> Self {
        Self {
            id: "f1".to_string(),
            period: 2.0 * PI / 3.0,
            beta: f64::INFINITY,
            sup_norm_on_strip: f64::INFINITY,
            evaluator: Box::new(|t| 2.0 * libm::sin(3.0 * t - 1.0) + 1.0),
            exact_cumulative: Box::new(|t| t + 2.0 / 3.0 * (libm::cos(1.0) - libm::cos(3.0 * t - 1.0))),
        }
    }

    /// f2(t) = 1/(2 − cos t) on T = 2π; poles at ±i·ln(2 + √3).
    pub fn f2() -> Self {
        Self {
            id: "f2".to_string(),
            period: 2.0 * PI,
            beta: STRIP_MARGIN * libm::log(2.0 + libm::sqrt(3.0)),
            sup_norm_on_strip: F2_SUP_NORM,
            evaluator: Box::new(|t| 1.0 / (2.0 - libm::cos(t))),
            exact_cumulative: Box::new(|t| cosine_denominator_cumulative(2.0, t)),
        }
    }

    /// f3(t) = 1/(sin²t + 16) on T = π; poles at ±i·asinh 4.
    pub fn f3() -> Self {
        Self {
            id: "f3".to_string(),
            period: PI,
            beta: STRIP_MARGIN * libm::log(4.0 + libm::sqrt(17.0)),
            sup_norm_on_strip: F3_SUP_NORM,
            evaluator: Box::new(|t| {
                let s = libm::sin(t);
                1.0 / (s * s + 16.0)
            }),
            // sin²t + 16 = (33 − cos 2t)/2
            exact_cumulative: Box::new(|t| cosine_denominator_cumulative(33.0, 2.0 * t)),
        }
    }

    /// Looks up one of the built-in functions by id.
    pub fn builtin(id: &str) -> Option<Self> {
        match id {
            "f1" => Some(Self::f1()),
            "f2" => Some(Self::f2()),
            "f3" => Some(Self::f3()),
            _ => None,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sup_norm_on_strip(&self) -> f64 {
        self.sup_norm_on_strip
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.evaluator)(t)
    }

    /// ∫_0^t f.
    pub fn cumulative(&self, t: f64) -> f64 {
        (self.exact_cumulative)(t)
    }
}

/// ∫_0^s dτ/(a − cos τ) for a > 1, continuous in s.
///
/// Uses 1/(a − cos τ) = (1 + 2 Σ r^k cos kτ)/√(a²−1) with r = a − √(a²−1),
/// whose sine series sums to atan(r sin s / (1 − r cos s)); the denominator
/// stays positive so no branch correction is needed.
fn cosine_denominator_cumulative(a: f64, s: f64) -> f64 {
    let root = libm::sqrt(a * a - 1.0);
    let r = a - root;
    (s + 2.0 * libm::atan(r * libm::sin(s) / (1.0 - r * libm::cos(s)))) / root
}

/// μ_{T,β} = sqrt(2T (sqrt(coth ω_β) + coth ω_β)) with ω_β = 2πβ/T.
pub fn mu_factor(period: f64, beta: f64) -> Result<f64> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::InvalidPeriod(period));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: "strip half-width must be positive".to_string(),
        });
    }
    let omega = 2.0 * PI * beta / period;
    let coth = 1.0 / libm::tanh(omega);
    Ok(libm::sqrt(2.0 * period * (libm::sqrt(coth) + coth)))
}

/// Right-hand side of the Euclidean quadrature error bound on `grid`.
pub fn fpsq_error_bound(f: &AnalyticTestFunction, grid: &EquispacedGrid) -> Result<f64> {
    if f.beta.is_infinite() {
        return Err(Error::EntireFunction);
    }
    if (grid.period() - f.period).abs() > 1e-14 * f.period {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: alloc::format!(
                "grid period {} differs from function period {}",
                grid.period(),
                f.period
            ),
        });
    }
    let mu = mu_factor(f.period, f.beta)?;
    let n = grid.len() as f64;
    let decay = libm::exp(-PI * n * f.beta / f.period);
    let root_norm = libm::sqrt(grid.nodes().iter().sum::<f64>());
    Ok(mu * f.sup_norm_on_strip * decay * root_norm)
}

/// Errors and bound for one N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub n: usize,
    pub inf_error: f64,
    pub euclid_error: f64,
    pub bound: Option<f64>,
}

/// Measured quadrature errors and the analytic bound for a list of N.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub function_id: String,
    pub n_values: Vec<usize>,
    pub inf_errors: Vec<f64>,
    pub euclid_errors: Vec<f64>,
    /// `None` for entire functions, where the bound collapses to zero.
    pub bound_values: Option<Vec<f64>>,
}

impl ConvergenceReport {
    /// Assembles a report from per-N points (in the order given).
    pub fn from_points(function_id: &str, points: &[ConvergencePoint]) -> Self {
        let bounds: Option<Vec<f64>> = points.iter().map(|p| p.bound).collect();
        Self {
            function_id: function_id.to_string(),
            n_values: points.iter().map(|p| p.n).collect(),
            inf_errors: points.iter().map(|p| p.inf_error).collect(),
            euclid_errors: points.iter().map(|p| p.euclid_error).collect(),
            bound_values: bounds,
        }
    }

    pub fn len(&self) -> usize {
        self.n_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_values.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = ConvergencePoint> + '_ {
        (0..self.len()).map(|i| ConvergencePoint {
            n: self.n_values[i],
            inf_error: self.inf_errors[i],
            euclid_error: self.euclid_errors[i],
            bound: self.bound_values.as_ref().map(|b| b[i]),
        })
    }
}

/// Square-matrix quadrature of `f` at N nodes compared with its exact cumulative integral.
pub fn convergence_point(f: &AnalyticTestFunction, n: usize) -> Result<ConvergencePoint> {
    let grid = make_grid(n, f.period)?;
    let fim = build_square_fim(&grid);
    let samples: Vec<f64> = grid.nodes().iter().map(|&t| f.eval(t)).collect();
    let approx = apply_quadrature(&fim, &samples)?;
    let errors: Vec<f64> = approx
        .iter()
        .zip(grid.nodes())
        .map(|(q, &t)| q - f.cumulative(t))
        .collect();
    let bound = if f.beta.is_finite() {
        Some(fpsq_error_bound(f, &grid)?)
    } else {
        None
    };
    Ok(ConvergencePoint {
        n,
        inf_error: norm_inf(&errors),
        euclid_error: norm2(&errors),
        bound,
    })
}

pub fn run_convergence_study(f: &AnalyticTestFunction, n_list: &[usize]) -> Result<ConvergenceReport> {
    let points = n_list
        .iter()
        .map(|&n| convergence_point(f, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::from_points(&f.id, &points))
}
