//! Transcription of a periodic optimal control problem into a nonlinear program.
//!
//! The decision vector stacks nodal states and then nodal controls, each
//! component-major: state i at node j sits at `i·N + j`, control k at node j
//! at `n·N + k·N + j`. The dynamics are collocated in integral form,
//!
//! ```text
//! x_i(t_l) − x_i(0) − Σ_j Θ_{lj} f_i(x_j, u_j, t_j) = 0,
//! ```
//!
//! and the objective is the rectangle rule J_N = (1/N) Σ_j g(x_j, u_j, t_j; ū),
//! where ū is the nodal mean of the controls.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fourier::{eval_vector_interpolant, EquispacedGrid};
use crate::integration::{build_square_fim, terminal_quadrature, IntegrationMatrix};
use crate::linalg::{norm_inf, DenseMatrix};
use crate::ocp::{validate_problem, OcpProblem};
use crate::solver::{solve_multistart, KktResiduals, NlpProblem, NlpSolution, SolveStatus, SolverConfig};

/// Nodal states and controls, N × n and N × m.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalTrajectory {
    pub x: DenseMatrix,
    pub u: DenseMatrix,
}

/// Pointwise callback values at every node.
struct NodeSamples {
    /// N × n dynamics samples.
    f: DenseMatrix,
    jx: Vec<DenseMatrix>,
    ju: Vec<DenseMatrix>,
}

pub struct DiscreteNlp<'a, P: OcpProblem + ?Sized> {
    prob: &'a P,
    grid: EquispacedGrid,
    fim: IntegrationMatrix,
    terminal_row: IntegrationMatrix,
    enforce_periodicity: bool,
    n: usize,
    m: usize,
    p: usize,
}

impl<P: OcpProblem + ?Sized> core::fmt::Debug for DiscreteNlp<'_, P> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("DiscreteNlp")
            .field("nodes", &self.grid.len())
            .field("period", &self.grid.period())
            .field("dims", &(self.n, self.m, self.p))
            .field("enforce_periodicity", &self.enforce_periodicity)
            .finish_non_exhaustive()
    }
}

/// Builds the discretized program on N equispaced nodes.
pub fn discretize<P: OcpProblem + ?Sized>(
    prob: &P,
    n_nodes: usize,
    enforce_periodicity: bool,
) -> Result<DiscreteNlp<'_, P>> {
    if n_nodes < 4 || !n_nodes.is_multiple_of(2) {
        return Err(Error::InvalidNodeCount(n_nodes));
    }
    let report = validate_problem(prob);
    if !report.passed() {
        let msgs: Vec<String> = report
            .failures()
            .map(|c| format!("{}: {}", c.name, c.message))
            .collect();
        return Err(Error::Validation(msgs.join("; ")));
    }
    let grid = EquispacedGrid::new(n_nodes, prob.period())?;
    Ok(DiscreteNlp {
        prob,
        fim: build_square_fim(&grid),
        terminal_row: terminal_quadrature(&grid),
        grid,
        enforce_periodicity,
        n: prob.state_dim(),
        m: prob.control_dim(),
        p: prob.constraint_dim(),
    })
}

impl<'a, P: OcpProblem + ?Sized> DiscreteNlp<'a, P> {
    pub fn problem(&self) -> &'a P {
        self.prob
    }

    pub fn grid(&self) -> &EquispacedGrid {
        &self.grid
    }

    pub fn fim(&self) -> &IntegrationMatrix {
        &self.fim
    }

    pub fn terminal_row(&self) -> &IntegrationMatrix {
        &self.terminal_row
    }

    pub fn enforce_periodicity(&self) -> bool {
        self.enforce_periodicity
    }

    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    fn check_len(&self, z: &[f64]) -> Result<()> {
        let nv = (self.n + self.m) * self.nodes();
        if z.len() == nv {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                what: "decision vector",
                expected: nv,
                actual: z.len(),
            })
        }
    }

    pub fn decode(&self, z: &[f64]) -> Result<NodalTrajectory> {
        self.check_len(z)?;
        let nn = self.nodes();
        let mut x = DenseMatrix::zeros(nn, self.n);
        let mut u = DenseMatrix::zeros(nn, self.m);
        for j in 0..nn {
            for i in 0..self.n {
                x.set(j, i, z[i * nn + j]);
            }
            for k in 0..self.m {
                u.set(j, k, z[(self.n + k) * nn + j]);
            }
        }
        Ok(NodalTrajectory { x, u })
    }

    pub fn encode(&self, traj: &NodalTrajectory) -> Result<Vec<f64>> {
        let nn = self.nodes();
        for (what, mat, cols) in [("x_nodes", &traj.x, self.n), ("u_nodes", &traj.u, self.m)] {
            if mat.shape() != (nn, cols) {
                return Err(Error::LengthMismatch {
                    what,
                    expected: nn * cols,
                    actual: mat.rows() * mat.cols(),
                });
            }
        }
        let mut z = vec![0.0; (self.n + self.m) * nn];
        for j in 0..nn {
            for i in 0..self.n {
                z[i * nn + j] = traj.x.get(j, i);
            }
            for k in 0..self.m {
                z[(self.n + k) * nn + j] = traj.u.get(j, k);
            }
        }
        Ok(z)
    }

    /// State and control vectors at node j.
    fn node(&self, z: &[f64], j: usize) -> (Vec<f64>, Vec<f64>) {
        let nn = self.nodes();
        let x = (0..self.n).map(|i| z[i * nn + j]).collect();
        let u = (0..self.m).map(|k| z[(self.n + k) * nn + j]).collect();
        (x, u)
    }

    fn control_mean(&self, z: &[f64]) -> Vec<f64> {
        let nn = self.nodes();
        (0..self.m)
            .map(|k| {
                let base = (self.n + k) * nn;
                z[base..base + nn].iter().sum::<f64>() / nn as f64
            })
            .collect()
    }

    fn samples(&self, z: &[f64], with_jacobians: bool) -> NodeSamples {
        let nn = self.nodes();
        let mut f = DenseMatrix::zeros(nn, self.n);
        let mut jx = Vec::new();
        let mut ju = Vec::new();
        for j in 0..nn {
            let (x, u) = self.node(z, j);
            let t = self.grid.node(j);
            f.row_mut(j).copy_from_slice(&self.prob.dynamics(&x, &u, t));
            if with_jacobians {
                jx.push(self.prob.jac_dynamics_x(&x, &u, t));
                ju.push(self.prob.jac_dynamics_u(&x, &u, t));
            }
        }
        NodeSamples { f, jx, ju }
    }

    /// J_N and its gradient.
    pub fn objective_and_gradient(&self, z: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_len(z)?;
        let mut grad = vec![0.0; z.len()];
        self.objective_gradient(z, &mut grad);
        Ok((self.objective(z), grad))
    }

    /// Signed residual of the collocated dynamics, length n·N.
    pub fn dynamics_residual(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check_len(z)?;
        let s = self.samples(z, false);
        Ok(self.residual_from_samples(z, &s.f))
    }

    fn residual_from_samples(&self, z: &[f64], f: &DenseMatrix) -> Vec<f64> {
        let nn = self.nodes();
        let theta = self.fim.entries();
        let mut r = vec![0.0; self.n * nn];
        for i in 0..self.n {
            let x0 = z[i * nn];
            for l in 0..nn {
                let integral: f64 = theta.row(l).iter().enumerate().map(|(j, th)| th * f.get(j, i)).sum();
                r[i * nn + l] = z[i * nn + l] - x0 - integral;
            }
        }
        r
    }

    /// Nodal trajectory, objective and ADFE for a decision vector.
    pub fn evaluate(&self, z: &[f64]) -> Result<(NodalTrajectory, f64, Vec<f64>)> {
        let traj = self.decode(z)?;
        let adfe = self.dynamics_residual(z)?.into_iter().map(f64::abs).collect();
        Ok((traj, self.objective(z), adfe))
    }
}

impl<P: OcpProblem + ?Sized> NlpProblem for DiscreteNlp<'_, P> {
    fn num_vars(&self) -> usize {
        (self.n + self.m) * self.nodes()
    }

    fn num_eq(&self) -> usize {
        self.n * self.nodes() + if self.enforce_periodicity { self.n } else { 0 }
    }

    fn num_ineq(&self) -> usize {
        self.p * self.nodes()
    }

    fn objective(&self, z: &[f64]) -> f64 {
        let nn = self.nodes();
        let mean = self.control_mean(z);
        let total: f64 = (0..nn)
            .map(|j| {
                let (x, u) = self.node(z, j);
                self.prob.running_cost(&x, &u, self.grid.node(j), &mean)
            })
            .sum();
        total / nn as f64
    }

    fn objective_gradient(&self, z: &[f64], grad: &mut [f64]) {
        let nn = self.nodes();
        let inv = 1.0 / nn as f64;
        let mean = self.control_mean(z);
        let coupled = !self.prob.mean_coupled_controls().is_empty();
        let mut mean_grad = vec![0.0; self.m];
        for j in 0..nn {
            let (x, u) = self.node(z, j);
            let t = self.grid.node(j);
            for (i, g) in self.prob.grad_cost_x(&x, &u, t, &mean).into_iter().enumerate() {
                grad[i * nn + j] = inv * g;
            }
            for (k, g) in self.prob.grad_cost_u(&x, &u, t, &mean).into_iter().enumerate() {
                grad[(self.n + k) * nn + j] = inv * g;
            }
            if coupled {
                for (acc, g) in mean_grad.iter_mut().zip(self.prob.grad_cost_mean(&x, &u, t, &mean)) {
                    *acc += g;
                }
            }
        }
        // Every control node moves its mean by 1/N.
        for (k, mg) in mean_grad.iter().enumerate() {
            let base = (self.n + k) * nn;
            grad[base..base + nn].iter_mut().for_each(|g| *g += inv * inv * mg);
        }
    }

    fn eq_constraints(&self, z: &[f64], out: &mut [f64]) {
        let s = self.samples(z, false);
        let r = self.residual_from_samples(z, &s.f);
        let nn = self.nodes();
        out[..self.n * nn].copy_from_slice(&r);
        if self.enforce_periodicity {
            let w = self.terminal_row.entries().row(0);
            for i in 0..self.n {
                out[self.n * nn + i] = (0..nn).map(|j| w[j] * s.f.get(j, i)).sum();
            }
        }
    }

    fn eq_jacobian(&self, z: &[f64], jac: &mut DenseMatrix) {
        let nn = self.nodes();
        let s = self.samples(z, true);
        let theta = self.fim.entries();
        jac.fill(0.0);
        for i in 0..self.n {
            for l in 0..nn {
                let row = i * nn + l;
                jac.add_to(row, i * nn + l, 1.0);
                jac.add_to(row, i * nn, -1.0);
                for j in 0..nn {
                    let th = theta.get(l, j);
                    if th == 0.0 {
                        continue;
                    }
                    for a in 0..self.n {
                        jac.add_to(row, a * nn + j, -th * s.jx[j].get(i, a));
                    }
                    for k in 0..self.m {
                        jac.add_to(row, (self.n + k) * nn + j, -th * s.ju[j].get(i, k));
                    }
                }
            }
        }
        if self.enforce_periodicity {
            let w = self.terminal_row.entries().row(0);
            for i in 0..self.n {
                let row = self.n * nn + i;
                for j in 0..nn {
                    for a in 0..self.n {
                        jac.add_to(row, a * nn + j, w[j] * s.jx[j].get(i, a));
                    }
                    for k in 0..self.m {
                        jac.add_to(row, (self.n + k) * nn + j, w[j] * s.ju[j].get(i, k));
                    }
                }
            }
        }
    }

    fn ineq_constraints(&self, z: &[f64], out: &mut [f64]) {
        for j in 0..self.nodes() {
            let (x, u) = self.node(z, j);
            let c = self.prob.path_constraints(&x, &u, self.grid.node(j));
            out[j * self.p..(j + 1) * self.p].copy_from_slice(&c);
        }
    }

    fn ineq_jacobian(&self, z: &[f64], jac: &mut DenseMatrix) {
        let nn = self.nodes();
        jac.fill(0.0);
        for j in 0..nn {
            let (x, u) = self.node(z, j);
            let t = self.grid.node(j);
            let cx = self.prob.jac_constraints_x(&x, &u, t);
            let cu = self.prob.jac_constraints_u(&x, &u, t);
            for q in 0..self.p {
                let row = j * self.p + q;
                for i in 0..self.n {
                    jac.set(row, i * nn + j, cx.get(q, i));
                }
                for k in 0..self.m {
                    jac.set(row, (self.n + k) * nn + j, cu.get(q, k));
                }
            }
        }
    }

    fn eq_jacobian_tr_mul(&self, z: &[f64], w: &[f64], out: &mut [f64]) {
        let nn = self.nodes();
        let s = self.samples(z, true);
        let theta = self.fim.entries();
        // v[i][j] = Σ_l Θ_lj w_il, less the periodicity row's contribution.
        let mut v = vec![0.0; self.n * nn];
        for i in 0..self.n {
            let wi = &w[i * nn..(i + 1) * nn];
            let mut total = 0.0;
            for (l, &wl) in wi.iter().enumerate() {
                out[i * nn + l] += wl;
                total += wl;
                for (j, th) in theta.row(l).iter().enumerate() {
                    v[i * nn + j] += th * wl;
                }
            }
            out[i * nn] -= total;
            if self.enforce_periodicity {
                let wp = w[self.n * nn + i];
                for (j, tw) in self.terminal_row.entries().row(0).iter().enumerate() {
                    v[i * nn + j] -= tw * wp;
                }
            }
        }
        for j in 0..nn {
            for i in 0..self.n {
                let vij = v[i * nn + j];
                if vij == 0.0 {
                    continue;
                }
                for a in 0..self.n {
                    out[a * nn + j] -= vij * s.jx[j].get(i, a);
                }
                for k in 0..self.m {
                    out[(self.n + k) * nn + j] -= vij * s.ju[j].get(i, k);
                }
            }
        }
    }

    fn ineq_jacobian_tr_mul(&self, z: &[f64], w: &[f64], out: &mut [f64]) {
        let nn = self.nodes();
        for j in 0..nn {
            let wj = &w[j * self.p..(j + 1) * self.p];
            if wj.iter().all(|&v| v == 0.0) {
                continue;
            }
            let (x, u) = self.node(z, j);
            let t = self.grid.node(j);
            let cx = self.prob.jac_constraints_x(&x, &u, t);
            let cu = self.prob.jac_constraints_u(&x, &u, t);
            for (q, &wq) in wj.iter().enumerate() {
                for i in 0..self.n {
                    out[i * nn + j] += wq * cx.get(q, i);
                }
                for k in 0..self.m {
                    out[(self.n + k) * nn + j] += wq * cu.get(q, k);
                }
            }
        }
    }

    fn variable_scales(&self) -> Vec<f64> {
        let nn = self.nodes();
        let mut scales = Vec::with_capacity(self.num_vars());
        for s in self.prob.state_scales().into_iter().chain(self.prob.control_scales()) {
            scales.extend(core::iter::repeat_n(s, nn));
        }
        scales
    }
}

/// Elementwise |x(t_l) − x(0) − Θ f| at the nodes, length n·N.
pub fn compute_adfe<P: OcpProblem + ?Sized>(
    prob: &P,
    grid: &EquispacedGrid,
    fim: &IntegrationMatrix,
    x_nodes: &DenseMatrix,
    u_nodes: &DenseMatrix,
) -> Result<Vec<f64>> {
    let (nn, n, m) = (grid.len(), prob.state_dim(), prob.control_dim());
    if fim.entries().shape() != (nn, nn) {
        return Err(Error::LengthMismatch {
            what: "integration matrix",
            expected: nn * nn,
            actual: fim.entries().rows() * fim.entries().cols(),
        });
    }
    for (what, mat, cols) in [("x_nodes", x_nodes, n), ("u_nodes", u_nodes, m)] {
        if mat.shape() != (nn, cols) {
            return Err(Error::LengthMismatch {
                what,
                expected: nn * cols,
                actual: mat.rows() * mat.cols(),
            });
        }
    }
    let mut f = DenseMatrix::zeros(nn, n);
    for j in 0..nn {
        f.row_mut(j)
            .copy_from_slice(&prob.dynamics(x_nodes.row(j), u_nodes.row(j), grid.node(j)));
    }
    let theta = fim.entries();
    let mut adfe = vec![0.0; n * nn];
    for i in 0..n {
        for l in 0..nn {
            let integral: f64 = (0..nn).map(|j| theta.get(l, j) * f.get(j, i)).sum();
            adfe[i * nn + l] = (x_nodes.get(l, i) - x_nodes.get(0, i) - integral).abs();
        }
    }
    Ok(adfe)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub nodes: usize,
    pub period: f64,
    pub enforce_periodicity: bool,
    /// N × n.
    pub x_nodes: DenseMatrix,
    /// N × m.
    pub u_nodes: DenseMatrix,
    pub j_n: f64,
    /// Absolute discrete feasibility error, length n·N.
    pub adfe: Vec<f64>,
    pub adfe_inf: f64,
    /// Smallest slack −c_q over the nodes, one entry per path constraint.
    pub path_slack_min: Vec<f64>,
    pub solver_iters: usize,
    pub solver_status: SolveStatus,
    pub solver_message: String,
    pub kkt: KktResiduals,
    /// Filled in by callers that measure time; always 0 here.
    pub wall_time_s: f64,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.solver_status == SolveStatus::Converged
    }

    /// Largest path-constraint value over all nodes (≤ 0 when feasible).
    pub fn max_path_violation(&self) -> f64 {
        self.path_slack_min.iter().fold(f64::NEG_INFINITY, |m, s| m.max(-s))
    }
}

/// Packages a solver result for the discretized problem.
pub fn build_report<P: OcpProblem + ?Sized>(nlp: &DiscreteNlp<'_, P>, sol: &NlpSolution) -> Result<SolveReport> {
    let (traj, j_n, adfe) = nlp.evaluate(&sol.z)?;
    let p = nlp.prob.constraint_dim();
    let mut c = vec![0.0; nlp.num_ineq()];
    nlp.ineq_constraints(&sol.z, &mut c);
    let path_slack_min = (0..p)
        .map(|q| c.iter().skip(q).step_by(p).fold(f64::INFINITY, |m, &v| m.min(-v)))
        .collect();
    Ok(SolveReport {
        nodes: nlp.nodes(),
        period: nlp.grid.period(),
        enforce_periodicity: nlp.enforce_periodicity,
        x_nodes: traj.x,
        u_nodes: traj.u,
        j_n,
        adfe_inf: norm_inf(&adfe),
        adfe,
        path_slack_min,
        solver_iters: sol.outer_iters,
        solver_status: sol.status,
        solver_message: sol.message.clone(),
        kkt: sol.kkt,
        wall_time_s: 0.0,
    })
}

/// Discretizes and solves, keeping the best of the configured start points.
pub fn solve_ocp<P: OcpProblem + ?Sized>(
    prob: &P,
    n_nodes: usize,
    enforce_periodicity: bool,
    config: &SolverConfig,
) -> Result<SolveReport> {
    let nlp = discretize(prob, n_nodes, enforce_periodicity)?;
    let sol = solve_multistart(&nlp, config)?;
    build_report(&nlp, &sol)
}

/// States and controls at time t from the trigonometric interpolant of the nodal solution.
pub fn recover_solution(report: &SolveReport, grid: &EquispacedGrid, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((
        eval_vector_interpolant(&report.x_nodes, grid, t)?,
        eval_vector_interpolant(&report.u_nodes, grid, t)?,
    ))
}
