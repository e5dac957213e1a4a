//! Augmented-Lagrangian solver for smooth constrained nonlinear programs
//!
//! ```text
//! minimize f(z)  subject to  h(z) = 0,  c(z) ≤ 0.
//! ```
//!
//! Inequalities carry nonnegative slacks, c + s = 0 with s ≥ 0; the slacks
//! are minimized out in closed form by projection, s = max(0, −c − μ/ρ),
//! which leaves a once-differentiable merit function in z alone. Each outer
//! iteration minimizes that function with L-BFGS and then applies
//! first-order multiplier updates.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, DenseMatrix};

mod auglag;
pub mod lbfgs;

pub use auglag::{better, multistart_points, solve_from_point, solve_multistart, solve_nlp, AugmentedLagrangian};


/// A smooth NLP with dense derivative callbacks.
pub trait NlpProblem {
    fn num_vars(&self) -> usize;
    fn num_eq(&self) -> usize;
    fn num_ineq(&self) -> usize;

    fn objective(&self, z: &[f64]) -> f64;
    fn objective_gradient(&self, z: &[f64], grad: &mut [f64]);

    fn eq_constraints(&self, z: &[f64], out: &mut [f64]);
    /// Fills a `num_eq × num_vars` matrix.
    fn eq_jacobian(&self, z: &[f64], jac: &mut DenseMatrix);

    /// Feasible when every entry is ≤ 0.
    fn ineq_constraints(&self, z: &[f64], out: &mut [f64]);
    /// Fills a `num_ineq × num_vars` matrix.
    fn ineq_jacobian(&self, z: &[f64], jac: &mut DenseMatrix);

    /// out += J_hᵀ w. Override when the Jacobian has structure worth exploiting.
    fn eq_jacobian_tr_mul(&self, z: &[f64], w: &[f64], out: &mut [f64]) {
        let mut jac = DenseMatrix::zeros(self.num_eq(), self.num_vars());
        self.eq_jacobian(z, &mut jac);
        jac.add_tr_mul_vec(w, out);
    }

    /// out += J_cᵀ w.
    fn ineq_jacobian_tr_mul(&self, z: &[f64], w: &[f64], out: &mut [f64]) {
        let mut jac = DenseMatrix::zeros(self.num_ineq(), self.num_vars());
        self.ineq_jacobian(z, &mut jac);
        jac.add_tr_mul_vec(w, out);
    }

    /// Typical magnitude of each variable; the solver iterates on z / scale.
    fn variable_scales(&self) -> Vec<f64> {
        vec![1.0; self.num_vars()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    AllOnes,
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
    /// Bound on ‖h‖∞.
    pub eq_tolerance: f64,
    /// Bound on max(c)₊.
    pub ineq_tolerance: f64,
    /// Stop once ‖z_{k+1} − z_k‖₂ falls below this (with feasibility).
    pub step_tolerance: f64,
    /// Stop once |J_{k+1} − J_k| falls below this (with feasibility).
    pub objective_tolerance: f64,
    /// Inner L-BFGS stops at ‖∇L‖∞ ≤ this, measured on the scaled merit function.
    pub stationarity_tolerance: f64,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub max_penalty: f64,
    pub lbfgs_memory: usize,
    pub initial_guess: InitialGuess,
    /// Extra randomized restarts (0 = single run from the initial guess).
    pub multistart: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_outer_iters: 100,
            max_inner_iters: 500,
            eq_tolerance: 1e-9,
            ineq_tolerance: 1e-9,
            step_tolerance: 1e-15,
            objective_tolerance: 1e-15,
            stationarity_tolerance: 1e-9,
            initial_penalty: 10.0,
            penalty_growth: 10.0,
            max_penalty: 1e12,
            lbfgs_memory: 100,
            initial_guess: InitialGuess::AllOnes,
            multistart: 0,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eq_tolerance", self.eq_tolerance),
            ("ineq_tolerance", self.ineq_tolerance),
            ("step_tolerance", self.step_tolerance),
            ("objective_tolerance", self.objective_tolerance),
            ("stationarity_tolerance", self.stationarity_tolerance),
            ("initial_penalty", self.initial_penalty),
            ("max_penalty", self.max_penalty),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be positive and finite".to_string(),
                });
            }
        }
        if !(self.penalty_growth > 1.0) || !self.penalty_growth.is_finite() {
            return Err(Error::InvalidParameter {
                name: "penalty_growth",
                reason: "must exceed 1".to_string(),
            });
        }
        if self.lbfgs_memory == 0 {
            return Err(Error::InvalidParameter {
                name: "lbfgs_memory",
                reason: "must be at least 1".to_string(),
            });
        }
        Ok(())
    }

    pub fn initial_point(&self, num_vars: usize) -> Result<Vec<f64>> {
        match &self.initial_guess {
            InitialGuess::AllOnes => Ok(vec![1.0; num_vars]),
            InitialGuess::Vector(v) if v.len() == num_vars => Ok(v.clone()),
            InitialGuess::Vector(v) => Err(Error::LengthMismatch {
                what: "initial guess",
                expected: num_vars,
                actual: v.len(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Stalled,
    /// Non-finite values at the initial guess.
    Failed,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::Stalled => "stalled",
            SolveStatus::Failed => "failed",
        }
    }
}

/// Lagrange multipliers of the unscaled problem.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Multipliers {
    pub eq: Vec<f64>,
    pub ineq: Vec<f64>,
}

/// State at the end of one outer iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterRecord {
    pub objective: f64,
    pub eq_inf: f64,
    pub ineq_violation: f64,
    /// Penalty after this iteration's update.
    pub penalty: f64,
    pub inner_iters: usize,
    pub step_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktResiduals {
    pub stationarity_inf: f64,
    pub eq_inf: f64,
    pub ineq_violation: f64,
    pub complementarity_inf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlpSolution {
    pub z: Vec<f64>,
    pub objective: f64,
    pub multipliers: Multipliers,
    pub status: SolveStatus,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub kkt: KktResiduals,
    pub history: Vec<OuterRecord>,
    pub message: String,
    /// Which restart produced this point (0 = the configured initial guess).
    pub restart: usize,
}

/// Standard first-order optimality residuals at `z` for the given multipliers.
pub fn kkt_residuals<P: NlpProblem + ?Sized>(nlp: &P, z: &[f64], multipliers: &Multipliers) -> Result<KktResiduals> {
    let (nv, ne, ni) = (nlp.num_vars(), nlp.num_eq(), nlp.num_ineq());
    if z.len() != nv {
        return Err(Error::LengthMismatch {
            what: "z",
            expected: nv,
            actual: z.len(),
        });
    }
    if multipliers.eq.len() != ne {
        return Err(Error::LengthMismatch {
            what: "equality multipliers",
            expected: ne,
            actual: multipliers.eq.len(),
        });
    }
    if multipliers.ineq.len() != ni {
        return Err(Error::LengthMismatch {
            what: "inequality multipliers",
            expected: ni,
            actual: multipliers.ineq.len(),
        });
    }
    let mut grad = vec![0.0; nv];
    nlp.objective_gradient(z, &mut grad);

    let mut h = vec![0.0; ne];
    let mut c = vec![0.0; ni];
    let mut jac = DenseMatrix::zeros(ne, nv);
    if ne > 0 {
        nlp.eq_constraints(z, &mut h);
        nlp.eq_jacobian(z, &mut jac);
        jac.add_tr_mul_vec(&multipliers.eq, &mut grad);
    }
    if ni > 0 {
        nlp.ineq_constraints(z, &mut c);
        jac.reset(ni, nv);
        nlp.ineq_jacobian(z, &mut jac);
        jac.add_tr_mul_vec(&multipliers.ineq, &mut grad);
    }
    let ineq_violation = c.iter().fold(0.0_f64, |m, &v| m.max(v));
    let complementarity_inf = c
        .iter()
        .zip(&multipliers.ineq)
        .fold(0.0_f64, |m, (&ci, &mu)| m.max((mu * ci).abs()).max((-mu).max(0.0)));
    Ok(KktResiduals {
        stationarity_inf: norm_inf(&grad),
        eq_inf: norm_inf(&h),
        ineq_violation,
        complementarity_inf,
    })
}
