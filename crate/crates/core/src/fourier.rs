//! Equispaced periodic grids, discrete Fourier coefficients, and the
//! trigonometric Lagrange interpolant.
//!
//! The interpolant is evaluated in its real cardinal form
//!
//! ```text
//! F_j(t) = (1/N) · sin(πN(t − t_j)/T) · cot(π(t − t_j)/T)
//! ```
//!
//! which carries the Nyquist mode as a pure cosine. The complex primed sum
//! over k = −N/2 … N/2−1 differs from it by an imaginary remainder that is
//! dropped.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Below this value of |sin(π(t − t_j)/T)| the basis is replaced by its limit.
const SINGULARITY_EPS: f64 = 1e-12;

/// The node set t_j = T·j/N, j = 0 … N−1, for even N.
#[derive(Debug, Clone, PartialEq)]
pub struct EquispacedGrid {
    n: usize,
    period: f64,
    nodes: Vec<f64>,
}

impl EquispacedGrid {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidNodeCount(n));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidPeriod(period));
        }
        let nodes = (0..n).map(|j| period * j as f64 / n as f64).collect();
        Ok(Self { n, period, nodes })
    }

    /// Number of nodes N.
    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn period(&self) -> f64 {
        self.period
    }

    #[inline]
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    /// Reduces `t` into [0, T).
    pub fn wrap(&self, t: f64) -> f64 {
        let r = t - self.period * libm::floor(t / self.period);
        if r >= self.period || r < 0.0 {
            0.0
        } else {
            r
        }
    }

    /// Value of the cardinal function F_j at `t`.
    pub fn lagrange_basis(&self, j: usize, t: f64) -> Result<f64> {
        if j >= self.n {
            return Err(Error::IndexOutOfRange { index: j, n: self.n });
        }
        Ok(self.basis_unchecked(j, self.wrap(t)))
    }

    /// All N cardinal functions evaluated at `t`.
    pub fn basis_vector(&self, t: f64) -> Vec<f64> {
        let t = self.wrap(t);
        (0..self.n).map(|j| self.basis_unchecked(j, t)).collect()
    }

    // `t` already wrapped into [0, T).
    fn basis_unchecked(&self, j: usize, t: f64) -> f64 {
        let x = PI * (t - self.nodes[j]) / self.period;
        let s = libm::sin(x);
        if s.abs() < SINGULARITY_EPS {
            return 1.0;
        }
        libm::sin(self.n as f64 * x) * libm::cos(x) / (self.n as f64 * s)
    }
}

/// Makes a grid after checking that `n` is even and `period` positive.
pub fn make_grid(n: usize, period: f64) -> Result<EquispacedGrid> {
    EquispacedGrid::new(n, period)
}

/// Discrete Fourier coefficients f̃_k for k = −N/2 … N/2−1.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    grid: EquispacedGrid,
    coeffs: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn grid(&self) -> &EquispacedGrid {
        &self.grid
    }

    /// Coefficients in storage order, index `k + N/2`.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient for wavenumber `k`, −N/2 ≤ k < N/2.
    pub fn get(&self, k: i64) -> Option<Complex64> {
        let half = (self.grid.len() / 2) as i64;
        if k < -half || k >= half {
            return None;
        }
        Some(self.coeffs[(k + half) as usize])
    }

    /// Inverse transform: f_j = Σ'_{k} f̃_k e^{2πi jk/N}, returning real parts.
    pub fn inverse(&self) -> Vec<f64> {
        let n = self.grid.len();
        let half = (n / 2) as i64;
        (0..n)
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (idx, c) in self.coeffs.iter().enumerate() {
                    let k = idx as i64 - half;
                    acc += c * unit_root(j as i64 * k, n);
                }
                acc.re
            })
            .collect()
    }
}

/// e^{2πi m/N} with the integer phase reduced modulo N first.
fn unit_root(m: i64, n: usize) -> Complex64 {
    let r = m.rem_euclid(n as i64);
    let angle = 2.0 * PI * r as f64 / n as f64;
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

/// Direct O(N²) evaluation of f̃_k = (1/N) Σ_j f_j e^{−2πi jk/N}.
pub fn dft_coefficients(samples: &[f64], grid: &EquispacedGrid) -> Result<FourierCoefficients> {
    let n = grid.len();
    if samples.len() != n {
        return Err(Error::LengthMismatch {
            what: "samples",
            expected: n,
            actual: samples.len(),
        });
    }
    let half = (n / 2) as i64;
    let coeffs = (-half..half)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &f) in samples.iter().enumerate() {
                acc += unit_root(-(j as i64) * k, n) * f;
            }
            acc / n as f64
        })
        .collect();
    Ok(FourierCoefficients {
        grid: grid.clone(),
        coeffs,
    })
}

/// Nodal samples together with their grid; evaluable anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigInterpolant {
    grid: EquispacedGrid,
    values: Vec<f64>,
}

impl TrigInterpolant {
    pub fn new(grid: EquispacedGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                what: "interpolant values",
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(grid: EquispacedGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &EquispacedGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        eval_interpolant(self, t)
    }
}

/// I_N f(t) = Σ_j f_j F_j(t).
pub fn eval_interpolant(interp: &TrigInterpolant, t: f64) -> f64 {
    let basis = interp.grid.basis_vector(t);
    basis.iter().zip(&interp.values).map(|(b, v)| b * v).sum()
}

/// Column-wise interpolation of an N×d matrix of nodal values.
pub fn eval_vector_interpolant(values: &DenseMatrix, grid: &EquispacedGrid, t: f64) -> Result<Vec<f64>> {
    if values.rows() != grid.len() {
        return Err(Error::LengthMismatch {
            what: "nodal value rows",
            expected: grid.len(),
            actual: values.rows(),
        });
    }
    let basis = grid.basis_vector(t);
    let mut out = vec![0.0; values.cols()];
    values.add_tr_mul_vec(&basis, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        let g = make_grid(4, 2.0 * PI).unwrap();
        assert_eq!(g.nodes(), &[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]);
        let g = make_grid(2, 1.0).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.5]);
        assert_eq!(make_grid(3, 1.0), Err(Error::InvalidNodeCount(3)));
        assert_eq!(make_grid(0, 1.0), Err(Error::InvalidNodeCount(0)));
        assert!(matches!(make_grid(4, 0.0), Err(Error::InvalidPeriod(_))));
        assert!(matches!(make_grid(4, -1.0), Err(Error::InvalidPeriod(_))));
        assert!(matches!(make_grid(4, f64::NAN), Err(Error::InvalidPeriod(_))));
    }

    #[test]
    fn grid_nodes_increasing_below_period() {
        for &n in &[2usize, 6, 64, 250] {
            let g = make_grid(n, 3.7).unwrap();
            assert_eq!(g.node(0), 0.0);
            assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(g.node(n - 1) < 3.7);
        }
    }

    #[test]
    fn constant_samples_are_dc_only() {
        let g = make_grid(8, 1.0).unwrap();
        let c = dft_coefficients(&[2.5; 8], &g).unwrap();
        for k in -4..4 {
            let v = c.get(k).unwrap();
            let expect = if k == 0 { 2.5 } else { 0.0 };
            assert!((v.re - expect).abs() < 1e-14 && v.im.abs() < 1e-14, "k={k} {v}");
        }
    }

    #[test]
    fn nyquist_sine_samples_vanish() {
        let g = make_grid(8, 2.0).unwrap();
        // sin(ω_{N/2} t_j) = sin(πj) evaluated exactly is zero.
        let samples: Vec<f64> = (0..8).map(|_| 0.0).collect();
        let c = dft_coefficients(&samples, &g).unwrap();
        assert!(c.as_slice().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn dft_length_mismatch() {
        let g = make_grid(4, 1.0).unwrap();
        assert!(matches!(
            dft_coefficients(&[1.0; 3], &g),
            Err(Error::LengthMismatch {
                expected: 4,
                actual: 3,
                ..
            })
        ));
    }

    #[test]
    fn basis_hand_value() {
        let g = make_grid(2, 2.0 * PI).unwrap();
        let v = g.lagrange_basis(0, PI / 2.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!(g.lagrange_basis(2, 0.0).is_err());
    }

    #[test]
    fn basis_singularity_returns_one() {
        let g = make_grid(6, 1.0).unwrap();
        for j in 0..6 {
            assert_eq!(g.lagrange_basis(j, g.node(j)).unwrap(), 1.0);
            assert_eq!(g.lagrange_basis(j, g.node(j) + 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn vector_interpolant_dimension_check() {
        let g = make_grid(4, 1.0).unwrap();
        let m = DenseMatrix::zeros(3, 2);
        assert!(eval_vector_interpolant(&m, &g, 0.1).is_err());
    }

    #[test]
    fn vector_interpolant_constant_columns() {
        let g = make_grid(6, 2.0).unwrap();
        let mut m = DenseMatrix::zeros(6, 2);
        for r in 0..6 {
            m.set(r, 0, 3.0);
            m.set(r, 1, -1.5);
        }
        for &t in &[0.13, 0.9, 1.77, -4.2] {
            let v = eval_vector_interpolant(&m, &g, t).unwrap();
            assert!((v[0] - 3.0).abs() < 1e-12 && (v[1] + 1.5).abs() < 1e-12);
        }
    }
}
