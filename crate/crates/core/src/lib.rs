//! Fourier integral pseudospectral (FIPS) discretization of periodic optimal
//! control problems.
//!
//! The crate is `no_std` and needs only `alloc`. It provides equispaced
//! Fourier grids and interpolants, Fourier integration matrices, quadrature
//! error bounds for analytic periodic functions, the transcription of a
//! periodic optimal control problem into a constrained nonlinear program, and
//! an augmented-Lagrangian solver for that program.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod discretize;
pub mod error;
pub mod error_bounds;
pub mod fourier;
pub mod integration;
pub mod linalg;
pub mod ocp;
pub mod problems;
pub mod solver;

pub use discretize::{compute_adfe, discretize, recover_solution, solve_ocp, DiscreteNlp, SolveReport};
pub use error::{Error, Result};
pub use error_bounds::{
    fpsq_error_bound, mu_factor, run_convergence_study, AnalyticTestFunction, ConvergencePoint, ConvergenceReport,
};
pub use fourier::{
    dft_coefficients, eval_interpolant, eval_vector_interpolant, make_grid, EquispacedGrid, FourierCoefficients,
    TrigInterpolant,
};
pub use integration::{
    apply_quadrature, build_rectangular_fim, build_square_fim, terminal_quadrature, IntegrationMatrix, MatrixKind,
};
pub use linalg::DenseMatrix;
pub use ocp::{validate_problem, DerivativeMode, OcpProblem, ValidationReport};
pub use problems::{make_problem1, make_problem2, Problem1, Problem1Params, Problem2, Problem2Params};
pub use solver::{kkt_residuals, KktResiduals, Multipliers, NlpProblem, SolveStatus, SolverConfig};
