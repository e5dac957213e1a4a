//! Periodic optimal control problems
//!
//! ```text
//! minimize  (1/T) ∫_0^T g(x, u, t; ū) dt
//! subject to ẋ = f(x, u, t),  c(x, u, t) ≤ 0,  x(0) = x(T),
//! ```
//!
//! where ū is the period-mean of the controls (only the components listed by
//! [`OcpProblem::mean_coupled_controls`] may influence g through it).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::linalg::DenseMatrix;

const FD_REL_STEP: f64 = 1e-6;
const DERIVATIVE_TOLERANCE: f64 = 1e-5;
const DERIVATIVE_PROBES: usize = 10;
const PROBE_SEED: u64 = 0x5eed_f1b5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

/// Central-difference step for a variable of value `v`.
pub fn fd_step(v: f64) -> f64 {
    FD_REL_STEP * (1.0 + v.abs())
}

/// Central differences of a vector function with respect to `v`; returns rows × v.len().
fn fd_jacobian(rows: usize, v: &[f64], mut fun: impl FnMut(&[f64]) -> Vec<f64>) -> DenseMatrix {
    let mut jac = DenseMatrix::zeros(rows, v.len());
    let mut w = v.to_vec();
    for k in 0..v.len() {
        let h = fd_step(v[k]);
        w[k] = v[k] + h;
        let plus = fun(&w);
        w[k] = v[k] - h;
        let minus = fun(&w);
        w[k] = v[k];
        for r in 0..rows {
            jac.set(r, k, (plus[r] - minus[r]) / (2.0 * h));
        }
    }
    jac
}

fn fd_gradient(v: &[f64], mut fun: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut w = v.to_vec();
    (0..v.len())
        .map(|k| {
            let h = fd_step(v[k]);
            w[k] = v[k] + h;
            let plus = fun(&w);
            w[k] = v[k] - h;
            let minus = fun(&w);
            w[k] = v[k];
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// A periodic optimal control problem with pointwise callbacks.
///
/// Derivative callbacks default to central finite differences; problems with
/// hand-written derivatives override them and report [`DerivativeMode::Analytic`].
/// Implementations must be deterministic and safe to call concurrently.
pub trait OcpProblem {
    fn state_dim(&self) -> usize;
    fn control_dim(&self) -> usize;
    fn constraint_dim(&self) -> usize;
    fn period(&self) -> f64;

    fn dynamics(&self, x: &[f64], u: &[f64], t: f64) -> Vec<f64>;
    /// `u_mean` holds the period-mean of every control (length m).
    fn running_cost(&self, x: &[f64], u: &[f64], t: f64, u_mean: &[f64]) -> f64;
    /// Feasible when every entry is ≤ 0.
    fn path_constraints(&self, x: &[f64], u: &[f64], t: f64) -> Vec<f64>;

    fn derivative_mode(&self) -> DerivativeMode {
        DerivativeMode::FiniteDifference
    }

    /// Controls whose period-mean enters the running cost.
    fn mean_coupled_controls(&self) -> &[usize] {
        &[]
    }

    /// n × n.
    fn jac_dynamics_x(&self, x: &[f64], u: &[f64], t: f64) -> DenseMatrix {
        fd_jacobian(self.state_dim(), x, |w| self.dynamics(w, u, t))
    }

    /// n × m.
    fn jac_dynamics_u(&self, x: &[f64], u: &[f64], t: f64) -> DenseMatrix {
        fd_jacobian(self.state_dim(), u, |w| self.dynamics(x, w, t))
    }

    fn grad_cost_x(&self, x: &[f64], u: &[f64], t: f64, u_mean: &[f64]) -> Vec<f64> {
        fd_gradient(x, |w| self.running_cost(w, u, t, u_mean))
    }

    fn grad_cost_u(&self, x: &[f64], u: &[f64], t: f64, u_mean: &[f64]) -> Vec<f64> {
        fd_gradient(u, |w| self.running_cost(x, w, t, u_mean))
    }

    /// ∂g/∂ū (length m; zero outside the coupled controls).
    fn grad_cost_mean(&self, x: &[f64], u: &[f64], t: f64, u_mean: &[f64]) -> Vec<f64> {
        if self.mean_coupled_controls().is_empty() {
            return vec![0.0; u_mean.len()];
        }
        fd_gradient(u_mean, |w| self.running_cost(x, u, t, w))
    }

    /// p × n.
    fn jac_constraints_x(&self, x: &[f64], u: &[f64], t: f64) -> DenseMatrix {
        fd_jacobian(self.constraint_dim(), x, |w| self.path_constraints(w, u, t))
    }

    /// p × m.
    fn jac_constraints_u(&self, x: &[f64], u: &[f64], t: f64) -> DenseMatrix {
        fd_jacobian(self.constraint_dim(), u, |w| self.path_constraints(x, w, t))
    }

    /// Typical state magnitudes, used to scale the discretized program.
    fn state_scales(&self) -> Vec<f64> {
        vec![1.0; self.state_dim()]
    }

    fn control_scales(&self) -> Vec<f64> {
        vec![1.0; self.control_dim()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: String, passed: bool, message: String) {
        self.checks.push(ValidationCheck { name, passed, message });
    }
}

fn check_len(report: &mut ValidationReport, what: &str, t: f64, expected: usize, actual: usize) {
    let ok = expected == actual;
    let message = if ok {
        String::new()
    } else {
        format!("expected length {expected}, got {actual}")
    };
    report.push(format!("{what} length at t={t}"), ok, message);
}

fn check_shape(report: &mut ValidationReport, what: &str, t: f64, expected: (usize, usize), m: &DenseMatrix) {
    let ok = m.shape() == expected;
    let message = if ok {
        String::new()
    } else {
        format!(
            "expected shape {}x{}, got {}x{}",
            expected.0,
            expected.1,
            m.rows(),
            m.cols()
        )
    };
    report.push(format!("{what} shape at t={t}"), ok, message);
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

/// Largest relative deviation between an analytic and a finite-difference matrix.
fn max_relative_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (&x, &y)| f64::max(m, relative_error(x, y)))
}

/// Checks callback dimensions at t ∈ {0, T/3, T} and, in analytic mode,
/// compares every derivative callback with central differences at random points.
///
/// Problems are never rejected with an error; each check is recorded instead.
pub fn validate_problem<P: OcpProblem + ?Sized>(prob: &P) -> ValidationReport {
    let mut report = ValidationReport::default();
    let (n, m, p) = (prob.state_dim(), prob.control_dim(), prob.constraint_dim());
    let period = prob.period();
    report.push(
        String::from("period"),
        period > 0.0 && period.is_finite(),
        format!("period must be positive and finite, got {period}"),
    );
    report.push(
        String::from("dimensions"),
        n > 0 && m > 0,
        format!("state and control dimensions must be positive, got n={n}, m={m}"),
    );
    let bad_coupling: Vec<usize> = prob
        .mean_coupled_controls()
        .iter()
        .copied()
        .filter(|&k| k >= m)
        .collect();
    report.push(
        String::from("mean coupling"),
        bad_coupling.is_empty(),
        format!("coupled control indices out of range: {bad_coupling:?}"),
    );
    for c in report.checks.iter_mut().filter(|c| c.passed) {
        c.message.clear();
    }
    if !report.passed() {
        return report;
    }

    let x = vec![1.0; n];
    let u = vec![1.0; m];
    for t in [0.0, period / 3.0, period] {
        check_len(&mut report, "dynamics", t, n, prob.dynamics(&x, &u, t).len());
        check_len(
            &mut report,
            "path_constraints",
            t,
            p,
            prob.path_constraints(&x, &u, t).len(),
        );
        check_len(&mut report, "grad_cost_x", t, n, prob.grad_cost_x(&x, &u, t, &u).len());
        check_len(&mut report, "grad_cost_u", t, m, prob.grad_cost_u(&x, &u, t, &u).len());
        check_len(
            &mut report,
            "grad_cost_mean",
            t,
            m,
            prob.grad_cost_mean(&x, &u, t, &u).len(),
        );
        check_shape(
            &mut report,
            "jac_dynamics_x",
            t,
            (n, n),
            &prob.jac_dynamics_x(&x, &u, t),
        );
        check_shape(
            &mut report,
            "jac_dynamics_u",
            t,
            (n, m),
            &prob.jac_dynamics_u(&x, &u, t),
        );
        check_shape(
            &mut report,
            "jac_constraints_x",
            t,
            (p, n),
            &prob.jac_constraints_x(&x, &u, t),
        );
        check_shape(
            &mut report,
            "jac_constraints_u",
            t,
            (p, m),
            &prob.jac_constraints_u(&x, &u, t),
        );
    }
    if !report.passed() || prob.derivative_mode() != DerivativeMode::Analytic {
        return report;
    }

    let xs = prob.state_scales();
    let us = prob.control_scales();
    let mut rng = Pcg64::seed_from_u64(PROBE_SEED);
    let mut worst = [0.0_f64; 7];
    for _ in 0..DERIVATIVE_PROBES {
        let x: Vec<f64> = xs.iter().map(|s| s * rng.random_range(-1.0..1.0)).collect();
        let u: Vec<f64> = us.iter().map(|s| s * rng.random_range(-1.0..1.0)).collect();
        let um: Vec<f64> = us.iter().map(|s| s * rng.random_range(-1.0..1.0)).collect();
        let t = period * rng.random_range(0.0..1.0);

        let pairs: [(DenseMatrix, DenseMatrix); 4] = [
            (
                prob.jac_dynamics_x(&x, &u, t),
                fd_jacobian(n, &x, |w| prob.dynamics(w, &u, t)),
            ),
            (
                prob.jac_dynamics_u(&x, &u, t),
                fd_jacobian(n, &u, |w| prob.dynamics(&x, w, t)),
            ),
            (
                prob.jac_constraints_x(&x, &u, t),
                fd_jacobian(p, &x, |w| prob.path_constraints(w, &u, t)),
            ),
            (
                prob.jac_constraints_u(&x, &u, t),
                fd_jacobian(p, &u, |w| prob.path_constraints(&x, w, t)),
            ),
        ];
        for (slot, (a, b)) in pairs.iter().enumerate() {
            worst[slot] = worst[slot].max(max_relative_deviation(a.as_slice(), b.as_slice()));
        }
        let grads = [
            (
                prob.grad_cost_x(&x, &u, t, &um),
                fd_gradient(&x, |w| prob.running_cost(w, &u, t, &um)),
            ),
            (
                prob.grad_cost_u(&x, &u, t, &um),
                fd_gradient(&u, |w| prob.running_cost(&x, w, t, &um)),
            ),
            (
                prob.grad_cost_mean(&x, &u, t, &um),
                fd_gradient(&um, |w| prob.running_cost(&x, &u, t, w)),
            ),
        ];
        for (slot, (a, b)) in grads.iter().enumerate() {
            worst[4 + slot] = worst[4 + slot].max(max_relative_deviation(a, b));
        }
    }
    let names = [
        "jac_dynamics_x",
        "jac_dynamics_u",
        "jac_constraints_x",
        "jac_constraints_u",
        "grad_cost_x",
        "grad_cost_u",
        "grad_cost_mean",
    ];
    for (name, dev) in names.iter().zip(worst) {
        let ok = dev <= DERIVATIVE_TOLERANCE;
        let message = if ok {
            String::new()
        } else {
            format!("relative deviation {dev:.3e} from central differences exceeds {DERIVATIVE_TOLERANCE:e}")
        };
        report.push(format!("{name} derivative"), ok, message);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ẋ = A x + B u with a quadratic cost, finite-difference derivatives only.
    struct Linear;

    impl OcpProblem for Linear {
        fn state_dim(&self) -> usize {
            2
        }
        fn control_dim(&self) -> usize {
            1
        }
        fn constraint_dim(&self) -> usize {
            1
        }
        fn period(&self) -> f64 {
            2.0
        }
        fn dynamics(&self, x: &[f64], u: &[f64], _t: f64) -> Vec<f64> {
            vec![x[1], -x[0] + 3.0 * u[0]]
        }
        fn running_cost(&self, x: &[f64], u: &[f64], _t: f64, _m: &[f64]) -> f64 {
            x[0] * x[0] + 2.0 * x[1] * u[0]
        }
        fn path_constraints(&self, x: &[f64], u: &[f64], _t: f64) -> Vec<f64> {
            vec![x[0] - u[0]]
        }
    }

    #[test]
    fn finite_difference_defaults() {
        let (x, u) = ([0.5, -2.0], [1.5]);
        let jx = Linear.jac_dynamics_x(&x, &u, 0.0);
        assert!((jx.get(0, 1) - 1.0).abs() < 1e-8 && (jx.get(1, 0) + 1.0).abs() < 1e-8);
        assert!((Linear.jac_dynamics_u(&x, &u, 0.0).get(1, 0) - 3.0).abs() < 1e-8);
        let gx = Linear.grad_cost_x(&x, &u, 0.0, &u);
        assert!((gx[0] - 1.0).abs() < 1e-8 && (gx[1] - 3.0).abs() < 1e-8);
        assert_eq!(Linear.grad_cost_mean(&x, &u, 0.0, &u), vec![0.0]);
        assert!((Linear.jac_constraints_u(&x, &u, 0.0).get(0, 0) + 1.0).abs() < 1e-8);
    }

    #[test]
    fn fd_problem_skips_derivative_probe() {
        let r = validate_problem(&Linear);
        assert!(r.passed());
        assert!(r.checks.iter().all(|c| !c.name.contains("derivative")));
    }

    struct WrongShape;

    impl OcpProblem for WrongShape {
        fn state_dim(&self) -> usize {
            2
        }
        fn control_dim(&self) -> usize {
            1
        }
        fn constraint_dim(&self) -> usize {
            0
        }
        fn period(&self) -> f64 {
            1.0
        }
        fn dynamics(&self, x: &[f64], u: &[f64], _t: f64) -> Vec<f64> {
            vec![x[1], u[0]]
        }
        fn running_cost(&self, _x: &[f64], _u: &[f64], _t: f64, _m: &[f64]) -> f64 {
            0.0
        }
        fn path_constraints(&self, _x: &[f64], _u: &[f64], _t: f64) -> Vec<f64> {
            Vec::new()
        }
        fn jac_dynamics_x(&self, _x: &[f64], _u: &[f64], _t: f64) -> DenseMatrix {
            DenseMatrix::zeros(2, 3)
        }
    }

    #[test]
    fn wrong_jacobian_shape_is_reported() {
        let r = validate_problem(&WrongShape);
        assert!(!r.passed());
        let f = r.failures().next().unwrap();
        assert!(f.name.starts_with("jac_dynamics_x shape"));
        assert_eq!(f.message, "expected shape 2x2, got 2x3");
    }

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert!((relative_error(1.0, 1.00001) - 1e-5 / 1.00001).abs() < 1e-15);
        assert!(relative_error(1e-12, -1e-12) < 1e-3);
    }
}
