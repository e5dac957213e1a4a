use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use super::lbfgs::{self, LbfgsOptions};
use super::{
    kkt_residuals, InitialGuess, Multipliers, NlpProblem, NlpSolution, OuterRecord, SolveStatus, SolverConfig,
};
use crate::error::Result;
use crate::linalg::{norm2, norm_inf};

/// Largest objective-gradient entry (in scaled variables) tolerated before the
/// objective is scaled down.
const OBJECTIVE_GRADIENT_TARGET: f64 = 100.0;

/// Consecutive zero-step infeasible outer iterations before giving up.
const STALL_LIMIT: usize = 3;

/// PHR augmented Lagrangian in scaled variables y = z / scale:
///
/// ```text
/// L(y) = σ f(z) + λᵀh + (ρ/2)‖h‖² + (1/2ρ) Σ (max(0, μ + ρc)² − μ²)
/// ```
///
/// σ is the objective scale; λ and μ are multipliers of the σ-scaled problem.
pub struct AugmentedLagrangian<'a, P: NlpProblem + ?Sized> {
    nlp: &'a P,
    scales: Vec<f64>,
    objective_scale: f64,
    lambda: Vec<f64>,
    mu: Vec<f64>,
    penalty: f64,
    z: Vec<f64>,
    grad_z: Vec<f64>,
    eq: Vec<f64>,
    ineq: Vec<f64>,
    weights: Vec<f64>,
}

impl<'a, P: NlpProblem + ?Sized> AugmentedLagrangian<'a, P> {
    /// Sets up the merit function with zero multipliers; the objective scale is
    /// chosen from the gradient at `z0`.
    pub fn new(nlp: &'a P, z0: &[f64], penalty: f64) -> Self {
        let nv = nlp.num_vars();
        let scales = nlp.variable_scales();
        assert_eq!(scales.len(), nv, "variable_scales has wrong length");
        let mut grad = vec![0.0; nv];
        nlp.objective_gradient(z0, &mut grad);
        let gmax = grad.iter().zip(&scales).fold(0.0_f64, |m, (g, s)| m.max((g * s).abs()));
        let objective_scale = if gmax.is_finite() && gmax > OBJECTIVE_GRADIENT_TARGET {
            OBJECTIVE_GRADIENT_TARGET / gmax
        } else {
            1.0
        };
        Self {
            nlp,
            scales,
            objective_scale,
            lambda: vec![0.0; nlp.num_eq()],
            mu: vec![0.0; nlp.num_ineq()],
            penalty,
            z: vec![0.0; nv],
            grad_z: vec![0.0; nv],
            eq: vec![0.0; nlp.num_eq()],
            ineq: vec![0.0; nlp.num_ineq()],
            weights: Vec::new(),
        }
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn objective_scale(&self) -> f64 {
        self.objective_scale
    }

    pub fn to_scaled(&self, z: &[f64]) -> Vec<f64> {
        z.iter().zip(&self.scales).map(|(z, s)| z / s).collect()
    }

    pub fn to_unscaled(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.scales).map(|(y, s)| y * s).collect()
    }

    /// Merit value at scaled point `y`; writes ∇_y L into `grad`.
    pub fn value_grad(&mut self, y: &[f64], grad: &mut [f64]) -> f64 {
        let nlp = self.nlp;
        let (ne, ni) = (nlp.num_eq(), nlp.num_ineq());
        for ((z, y), s) in self.z.iter_mut().zip(y).zip(&self.scales) {
            *z = y * s;
        }
        let sigma = self.objective_scale;
        let rho = self.penalty;
        let mut value = sigma * nlp.objective(&self.z);
        nlp.objective_gradient(&self.z, &mut self.grad_z);
        self.grad_z.iter_mut().for_each(|g| *g *= sigma);

        if ne > 0 {
            nlp.eq_constraints(&self.z, &mut self.eq);
            self.weights.clear();
            for (h, l) in self.eq.iter().zip(&self.lambda) {
                value += l * h + 0.5 * rho * h * h;
                self.weights.push(l + rho * h);
            }
            nlp.eq_jacobian_tr_mul(&self.z, &self.weights, &mut self.grad_z);
        }
        if ni > 0 {
            nlp.ineq_constraints(&self.z, &mut self.ineq);
            self.weights.clear();
            for (c, m) in self.ineq.iter().zip(&self.mu) {
                let t = (m + rho * c).max(0.0);
                value += (t * t - m * m) / (2.0 * rho);
                self.weights.push(t);
            }
            nlp.ineq_jacobian_tr_mul(&self.z, &self.weights, &mut self.grad_z);
        }
        for ((g, gz), s) in grad.iter_mut().zip(&self.grad_z).zip(&self.scales) {
            *g = gz * s;
        }
        value
    }

    /// First-order update λ ← λ + ρh, μ ← max(0, μ + ρc) using constraint values at `z`.
    fn update_multipliers(&mut self, eq: &[f64], ineq: &[f64]) {
        let rho = self.penalty;
        for (l, h) in self.lambda.iter_mut().zip(eq) {
            *l += rho * h;
        }
        for (m, c) in self.mu.iter_mut().zip(ineq) {
            *m = (*m + rho * c).max(0.0);
        }
    }

    /// Multipliers of the unscaled problem.
    pub fn multipliers(&self) -> Multipliers {
        let inv = 1.0 / self.objective_scale;
        Multipliers {
            eq: self.lambda.iter().map(|l| l * inv).collect(),
            ineq: self.mu.iter().map(|m| m * inv).collect(),
        }
    }
}

fn constraint_values<P: NlpProblem + ?Sized>(nlp: &P, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut h = vec![0.0; nlp.num_eq()];
    let mut c = vec![0.0; nlp.num_ineq()];
    if !h.is_empty() {
        nlp.eq_constraints(z, &mut h);
    }
    if !c.is_empty() {
        nlp.ineq_constraints(z, &mut c);
    }
    (h, c)
}

fn max_positive(c: &[f64]) -> f64 {
    c.iter().fold(0.0_f64, |m, &v| m.max(v))
}

/// Solves from the configured initial guess.
pub fn solve_nlp<P: NlpProblem + ?Sized>(nlp: &P, config: &SolverConfig) -> Result<NlpSolution> {
    config.validate()?;
    let z0 = config.initial_point(nlp.num_vars())?;
    Ok(solve_from(nlp, config, z0, 0))
}

fn failed(ne: usize, ni: usize, z0: Vec<f64>, message: String) -> NlpSolution {
    NlpSolution {
        z: z0,
        objective: f64::NAN,
        multipliers: Multipliers {
            eq: vec![0.0; ne],
            ineq: vec![0.0; ni],
        },
        status: SolveStatus::Failed,
        outer_iters: 0,
        inner_iters: 0,
        kkt: Default::default(),
        history: Vec::new(),
        message,
        restart: 0,
    }
}

fn solve_from<P: NlpProblem + ?Sized>(nlp: &P, config: &SolverConfig, z0: Vec<f64>, restart: usize) -> NlpSolution {
    let (ne, ni) = (nlp.num_eq(), nlp.num_ineq());
    let f0 = nlp.objective(&z0);
    let (h0, c0) = constraint_values(nlp, &z0);
    if !f0.is_finite() || h0.iter().chain(&c0).any(|v| !v.is_finite()) {
        let mut sol = failed(
            ne,
            ni,
            z0,
            String::from("non-finite objective or constraint at the initial guess"),
        );
        sol.restart = restart;
        return sol;
    }

    let mut al = AugmentedLagrangian::new(nlp, &z0, config.initial_penalty);
    let opts = LbfgsOptions {
        memory: config.lbfgs_memory,
        max_iters: config.max_inner_iters,
        gradient_tolerance: config.stationarity_tolerance,
    };

    let mut y = al.to_scaled(&z0);
    let mut z = z0;
    let mut objective = f0;
    let mut prev_violation = f64::INFINITY;
    let mut prev_eq = f64::INFINITY;
    let mut history = Vec::new();
    let mut inner_total = 0;
    let mut stalls = 0;
    let mut status = SolveStatus::MaxIter;
    let mut message = String::from("outer iteration limit reached");

    for _ in 0..config.max_outer_iters {
        let inner = lbfgs::minimize(|y, g| al.value_grad(y, g), &y, &opts);
        inner_total += inner.iterations;
        y = inner.x;
        let z_new = al.to_unscaled(&y);
        let step: Vec<f64> = z_new.iter().zip(&z).map(|(a, b)| a - b).collect();
        let step_norm = norm2(&step);
        z = z_new;

        let new_objective = nlp.objective(&z);
        let objective_change = (new_objective - objective).abs();
        objective = new_objective;

        let (h, c) = constraint_values(nlp, &z);
        let eq_inf = norm_inf(&h);
        let ineq_violation = max_positive(&c);
        let rho = al.penalty;
        let violation = c
            .iter()
            .zip(&al.mu)
            .fold(eq_inf, |m, (&ci, &mi)| m.max(ci.max(-mi / rho).abs()));
        let feasible = eq_inf <= config.eq_tolerance && ineq_violation <= config.ineq_tolerance;

        al.update_multipliers(&h, &c);
        if violation > 0.25 * prev_violation || eq_inf > prev_eq {
            al.penalty = (al.penalty * config.penalty_growth).min(config.max_penalty);
        }
        prev_violation = violation;
        prev_eq = eq_inf;

        history.push(OuterRecord {
            objective,
            eq_inf,
            ineq_violation,
            penalty: al.penalty,
            inner_iters: inner.iterations,
            step_norm,
        });

        if feasible && (step_norm < config.step_tolerance || objective_change < config.objective_tolerance) {
            status = SolveStatus::Converged;
            message = if step_norm < config.step_tolerance {
                format!("feasible and step {step_norm:.3e} below tolerance")
            } else {
                format!("feasible and objective change {objective_change:.3e} below tolerance")
            };
            break;
        }
        if !feasible && step_norm == 0.0 {
            stalls += 1;
            if stalls >= STALL_LIMIT {
                status = SolveStatus::Stalled;
                message = format!("no progress while infeasible (eq {eq_inf:.3e}, ineq {ineq_violation:.3e})");
                break;
            }
        } else {
            stalls = 0;
        }
    }

    let multipliers = al.multipliers();
    let kkt = kkt_residuals(nlp, &z, &multipliers).unwrap_or_default();
    NlpSolution {
        z,
        objective,
        multipliers,
        status,
        outer_iters: history.len(),
        inner_iters: inner_total,
        kkt,
        history,
        message,
        restart,
    }
}

/// Starting points for a multi-start run: the configured guess followed by
/// `config.multistart` uniform perturbations of amplitude 1 (times each
/// variable's scale), drawn from a PCG stream seeded with `config.seed`.
pub fn multistart_points<P: NlpProblem + ?Sized>(nlp: &P, config: &SolverConfig) -> Result<Vec<Vec<f64>>> {
    let base = config.initial_point(nlp.num_vars())?;
    let scales = nlp.variable_scales();
    let mut rng = Pcg64::seed_from_u64(config.seed);
    let mut points = vec![base.clone()];
    for _ in 0..config.multistart {
        let p = base
            .iter()
            .zip(&scales)
            .map(|(b, s)| b + s * rng.random_range(-1.0..=1.0))
            .collect();
        points.push(p);
    }
    Ok(points)
}

/// Orders candidate solutions: converged first, then lower objective, then restart index.
pub fn better(a: &NlpSolution, b: &NlpSolution) -> bool {
    let ca = a.status == SolveStatus::Converged;
    let cb = b.status == SolveStatus::Converged;
    if ca != cb {
        return ca;
    }
    match (a.objective.is_nan(), b.objective.is_nan()) {
        (false, true) => return true,
        (true, false) => return false,
        _ => {}
    }
    if a.objective != b.objective {
        return a.objective < b.objective;
    }
    a.restart < b.restart
}

/// Runs every start point sequentially and keeps the best.
pub fn solve_multistart<P: NlpProblem + ?Sized>(nlp: &P, config: &SolverConfig) -> Result<NlpSolution> {
    config.validate()?;
    let points = multistart_points(nlp, config)?;
    let mut best: Option<NlpSolution> = None;
    for (i, p) in points.into_iter().enumerate() {
        let sol = solve_from(nlp, config, p, i);
        best = match best {
            Some(b) if !better(&sol, &b) => Some(b),
            _ => Some(sol),
        };
    }
    Ok(best.expect("at least one start point"))
}

/// Solves from an explicit start point, tagging the result with `restart`.
pub fn solve_from_point<P: NlpProblem + ?Sized>(
    nlp: &P,
    config: &SolverConfig,
    z0: Vec<f64>,
    restart: usize,
) -> Result<NlpSolution> {
    config.validate()?;
    let cfg = SolverConfig {
        initial_guess: InitialGuess::Vector(z0.clone()),
        ..config.clone()
    };
    let z0 = cfg.initial_point(nlp.num_vars())?;
    Ok(solve_from(nlp, &cfg, z0, restart))
}
