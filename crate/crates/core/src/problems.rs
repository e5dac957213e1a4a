//! Built-in benchmark problems.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::ocp::{DerivativeMode, OcpProblem};

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: "must be positive and finite".to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem1Params {
    /// Control weight.
    pub b: f64,
    pub period: f64,
}

impl Problem1Params {
    pub fn validate(&self) -> Result<()> {
        positive("b", self.b)?;
        positive("period", self.period)
    }
}

/// Double-well oscillator: ẋ₁ = x₂, ẋ₂ = u,
/// g = x₁²/2 + x₂⁴/4 − x₂²/2 + b u²/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem1 {
    params: Problem1Params,
}

pub fn make_problem1(params: Problem1Params) -> Result<Problem1> {
    params.validate()?;
    Ok(Problem1 { params })
}

impl Problem1 {
    pub fn params(&self) -> Problem1Params {
        self.params
    }
}

impl OcpProblem for Problem1 {
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
        self.params.period
    }
    fn derivative_mode(&self) -> DerivativeMode {
        DerivativeMode::Analytic
    }

    fn dynamics(&self, x: &[f64], u: &[f64], _t: f64) -> Vec<f64> {
        vec![x[1], u[0]]
    }

    fn running_cost(&self, x: &[f64], u: &[f64], _t: f64, _u_mean: &[f64]) -> f64 {
        let x2sq = x[1] * x[1];
        0.5 * x[0] * x[0] + 0.25 * x2sq * x2sq - 0.5 * x2sq + 0.5 * self.params.b * u[0] * u[0]
    }

    fn path_constraints(&self, _x: &[f64], _u: &[f64], _t: f64) -> Vec<f64> {
        Vec::new()
    }

    fn jac_dynamics_x(&self, _x: &[f64], _u: &[f64], _t: f64) -> DenseMatrix {
        DenseMatrix::from_row_major(2, 2, vec![0.0, 1.0, 0.0, 0.0])
    }

    fn jac_dynamics_u(&self, _x: &[f64], _u: &[f64], _t: f64) -> DenseMatrix {
        DenseMatrix::from_row_major(2, 1, vec![0.0, 1.0])
    }

    fn grad_cost_x(&self, x: &[f64], _u: &[f64], _t: f64, _u_mean: &[f64]) -> Vec<f64> {
        vec![x[0], x[1] * x[1] * x[1] - x[1]]
    }

    fn grad_cost_u(&self, _x: &[f64], u: &[f64], _t: f64, _u_mean: &[f64]) -> Vec<f64> {
        vec![self.params.b * u[0]]
    }

    fn grad_cost_mean(&self, _x: &[f64], _u: &[f64], _t: f64, _u_mean: &[f64]) -> Vec<f64> {
        vec![0.0]
    }

    fn jac_constraints_x(&self, _x: &[f64], _u: &[f64], _t: f64) -> DenseMatrix {
        DenseMatrix::zeros(0, 2)
    }

    fn jac_constraints_u(&self, _x: &[f64], _u: &[f64], _t: f64) -> DenseMatrix {
        DenseMatrix::zeros(0, 1)
    }
}

/// Solar heating system parameters (kJ, °C, h).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem2Params {
    pub ua_s: f64,
    pub ua_e: f64,
    pub mcp_s: f64,
    pub mcp_e: f64,
    /// Storage set point.
    pub tbar_s: f64,
    /// Enclosure set point.
    pub tbar_e: f64,
    pub period: f64,
    pub omega: f64,
    /// Minimum auxiliary heat rate.
    pub u1_lower: f64,
    /// Strict lower bound on the storage-to-enclosure heat rate.
    pub eps_u2: f64,
}

impl Default for Problem2Params {
    fn default() -> Self {
        Self {
            ua_s: 20.07,
            ua_e: 949.5,
            mcp_s: 19000.0,
            mcp_e: 18890.0,
            tbar_s: 30.0,
            tbar_e: 20.0,
            period: 24.0,
            omega: PI / 12.0,
            u1_lower: 8000.0,
            eps_u2: 2.2204e-16,
        }
    }
}

impl Problem2Params {
    pub fn validate(&self) -> Result<()> {
        positive("ua_s", self.ua_s)?;
        positive("ua_e", self.ua_e)?;
        positive("mcp_s", self.mcp_s)?;
        positive("mcp_e", self.mcp_e)?;
        positive("tbar_s", self.tbar_s)?;
        positive("tbar_e", self.tbar_e)?;
        positive("period", self.period)?;
        positive("omega", self.omega)?;
        positive("u1_lower", self.u1_lower)?;
        positive("eps_u2", self.eps_u2)
    }
}

/// Peak insolation rate.
pub const INSOLATION_PEAK: f64 = 13333.0;
/// Amplitude of the ambient temperature swing.
pub const AMBIENT_AMPLITUDE: f64 = 10.0;

/// Collector/storage/enclosure solar heating system.
///
/// x = [T_E, T_S], u = [Q_aux, Q_S]; the cost penalizes deviation of the
/// auxiliary heat from its own period-mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem2 {
    params: Problem2Params,
}

pub fn make_problem2(params: Problem2Params) -> Result<Problem2> {
    params.validate()?;
    Ok(Problem2 { params })
}

impl Problem2 {
    pub fn params(&self) -> Problem2Params {
        self.params
    }

    pub fn ambient_temperature(&self, t: f64) -> f64 {
        -AMBIENT_AMPLITUDE * libm::sin(self.params.omega * t)
    }

    pub fn insolation(&self, t: f64) -> f64 {
        INSOLATION_PEAK * (1.0 - libm::cos(self.params.omega * t))
    }
}

impl OcpProblem for Problem2 {
    fn state_dim(&self) -> usize {
        2
    }
    fn control_dim(&self) -> usize {
        2
    }
    fn constraint_dim(&self) -> usize {
        4
    }
    fn period(&self) -> f64 {
        self.params.period
    }
    fn derivative_mode(&self) -> DerivativeMode {
        DerivativeMode::Analytic
    }
    fn mean_coupled_controls(&self) -> &[usize] {
        &[0]
    }

    fn dynamics(&self, x: &[f64], u: &[f64], t: f64) -> Vec<f64> {
        let p = &self.params;
        let ta = self.ambient_temperature(t);
        vec![
            (u[0] + u[1] - p.ua_e * (x[0] - ta)) / p.mcp_e,
            (self.insolation(t) - u[1] - p.ua_s * (x[1] - ta)) / p.mcp_s,
        ]
    }

    fn running_cost(&self, x: &[f64], u: &[f64], _t: f64, u_mean: &[f64]) -> f64 {
        let p = &self.params;
        let de = x[0] - p.tbar_e;
        let ds = x[1] - p.tbar_s;
        let du = u[0] - u_mean[0];
        1000.0 * de * de + 10.0 * ds * ds + 0.1 * du * du + u[0]
    }

    fn path_constraints(&self, x: &[f64], u: &[f64], _t: f64) -> Vec<f64> {
        vec![-x[0], -x[1], self.params.u1_lower - u[0], self.params.eps_u2 - u[1]]
    }

    fn jac_dynamics_x(&self, _x: &[f64], _u: &[f64], _t: f64) -> DenseMatrix {
        let p = &self.params;
        DenseMatrix::from_row_major(2, 2, vec![-p.ua_e / p.mcp_e, 0.0, 0.0, -p.ua_s / p.mcp_s])
    }

    fn jac_dynamics_u(&self, _x: &[f64], _u: &[f64], _t: f64) -> DenseMatrix {
        let p = &self.params;
        DenseMatrix::from_row_major(2, 2, vec![1.0 / p.mcp_e, 1.0 / p.mcp_e, 0.0, -1.0 / p.mcp_s])
    }

    fn grad_cost_x(&self, x: &[f64], _u: &[f64], _t: f64, _u_mean: &[f64]) -> Vec<f64> {
        vec![2000.0 * (x[0] - self.params.tbar_e), 20.0 * (x[1] - self.params.tbar_s)]
    }

    fn grad_cost_u(&self, _x: &[f64], u: &[f64], _t: f64, u_mean: &[f64]) -> Vec<f64> {
        vec![0.2 * (u[0] - u_mean[0]) + 1.0, 0.0]
    }

    fn grad_cost_mean(&self, _x: &[f64], u: &[f64], _t: f64, u_mean: &[f64]) -> Vec<f64> {
        vec![-0.2 * (u[0] - u_mean[0]), 0.0]
    }

    fn jac_constraints_x(&self, _x: &[f64], _u: &[f64], _t: f64) -> DenseMatrix {
        DenseMatrix::from_row_major(4, 2, vec![-1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0])
    }

    fn jac_constraints_u(&self, _x: &[f64], _u: &[f64], _t: f64) -> DenseMatrix {
        DenseMatrix::from_row_major(4, 2, vec![0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, -1.0])
    }

    fn state_scales(&self) -> Vec<f64> {
        vec![self.params.tbar_e, self.params.tbar_s]
    }

    fn control_scales(&self) -> Vec<f64> {
        vec![self.params.u1_lower, self.params.u1_lower]
    }
}
