//! Fourier integration matrices.
//!
//! Row `l` of a matrix maps nodal samples f_0 … f_{N−1} to the integral of
//! the trigonometric interpolant over [0, y_l]:
//!
//! ```text
//! θ_{l,j} = (1/N) [ y_l + (T i / 2π) Σ'_{k≠0} (1/k) e^{−iω_k t_j} (1 − e^{iω_k y_l}) ]
//! ```
//!
//! with the primed sum over k = −N/2 … N/2−1. Entries are the real part; the
//! largest discarded imaginary part is kept in [`IntegrationMatrix::max_imag_residual`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::EquispacedGrid;
use crate::linalg::DenseMatrix;

/// Relative distance below which a rectangular evaluation point counts as a node.
const NODE_COINCIDENCE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Square,
    Rectangular,
    TerminalRow,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Square => "square",
            MatrixKind::Rectangular => "rectangular",
            MatrixKind::TerminalRow => "terminal_row",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationMatrix {
    kind: MatrixKind,
    grid: EquispacedGrid,
    eval_points: Vec<f64>,
    entries: DenseMatrix,
    max_imag_residual: f64,
}

impl IntegrationMatrix {
    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn grid(&self) -> &EquispacedGrid {
        &self.grid
    }

    /// Rectangular evaluation points; empty for the other kinds.
    pub fn eval_points(&self) -> &[f64] {
        &self.eval_points
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    #[inline]
    pub fn get(&self, l: usize, j: usize) -> f64 {
        self.entries.get(l, j)
    }

    pub fn rows(&self) -> usize {
        self.entries.rows()
    }

    pub fn max_imag_residual(&self) -> f64 {
        self.max_imag_residual
    }

    /// Upper integration limit of every row.
    pub fn upper_limits(&self) -> Vec<f64> {
        match self.kind {
            MatrixKind::Square => self.grid.nodes().to_vec(),
            MatrixKind::Rectangular => self.eval_points.clone(),
            MatrixKind::TerminalRow => vec![self.grid.period()],
        }
    }

    pub fn apply(&self, samples: &[f64]) -> Result<Vec<f64>> {
        apply_quadrature(self, samples)
    }
}

/// e^{2πi m/N} with integer reduction of the phase.
fn unit_root(m: i64, n: usize) -> Complex64 {
    let r = m.rem_euclid(n as i64);
    let angle = 2.0 * PI * r as f64 / n as f64;
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

/// Σ'_{k≠0} (1/k) e^{−iω_k t_j}(1 − e^{iω_k y}) given e^{iω_k y} for every k.
fn primed_sum(n: usize, j: usize, exp_y: impl Fn(i64) -> Complex64) -> Complex64 {
    let half = (n / 2) as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -half..half {
        if k == 0 {
            continue;
        }
        let term = unit_root(-(j as i64) * k, n) * (Complex64::new(1.0, 0.0) - exp_y(k));
        acc += term / k as f64;
    }
    acc
}

// (real, imag) of θ for upper limit y.
fn entry(grid: &EquispacedGrid, y: f64, sum: Complex64) -> (f64, f64) {
    let n = grid.len() as f64;
    let scale = grid.period() / (2.0 * PI);
    // (T i / 2π)·S = scale·(−Im S + i Re S)
    ((y - scale * sum.im) / n, scale * sum.re / n)
}

/// Square N×N matrix Θ with Θ·f ≈ ∫_0^{t_l} f.
pub fn build_square_fim(grid: &EquispacedGrid) -> IntegrationMatrix {
    let n = grid.len();
    let mut entries = DenseMatrix::zeros(n, n);
    let mut max_imag = 0.0_f64;
    for l in 0..n {
        for j in 0..n {
            let sum = primed_sum(n, j, |k| unit_root(k * l as i64, n));
            let (re, im) = entry(grid, grid.node(l), sum);
            entries.set(l, j, re);
            max_imag = max_imag.max(im.abs());
        }
    }
    IntegrationMatrix {
        kind: MatrixKind::Square,
        grid: grid.clone(),
        eval_points: Vec::new(),
        entries,
        max_imag_residual: max_imag,
    }
}

/// Square matrix assembled from the real paired form
/// (T/(πkN))·[sin(ω_k t_j) + sin(ω_k(t_l − t_j))] for k = 1 … N/2−1,
/// plus the real part of the lone Nyquist term (zero at the nodes).
pub fn build_square_fim_paired(grid: &EquispacedGrid) -> IntegrationMatrix {
    let n = grid.len();
    let half = n / 2;
    let period = grid.period();
    let mut entries = DenseMatrix::zeros(n, n);
    for l in 0..n {
        for j in 0..n {
            let mut acc = grid.node(l) / n as f64;
            for k in 1..half {
                let a = unit_root((k * j) as i64, n).im;
                let b = unit_root(k as i64 * (l as i64 - j as i64), n).im;
                acc += period * (a + b) / (PI * k as f64 * n as f64);
            }
            entries.set(l, j, acc);
        }
    }
    IntegrationMatrix {
        kind: MatrixKind::Square,
        grid: grid.clone(),
        eval_points: Vec::new(),
        entries,
        max_imag_residual: 0.0,
    }
}

/// M×N matrix Θ̂ with Θ̂·f ≈ ∫_0^{y_l} f for arbitrary y_l ∈ (0, T] off the grid.
pub fn build_rectangular_fim(grid: &EquispacedGrid, eval_points: &[f64]) -> Result<IntegrationMatrix> {
    let n = grid.len();
    let period = grid.period();
    for &y in eval_points {
        if !(y > 0.0 && y <= period) {
            return Err(Error::PointOutOfRange { point: y, period });
        }
        if let Some(node) = grid
            .nodes()
            .iter()
            .position(|&t| (t - y).abs() <= NODE_COINCIDENCE_EPS * period)
        {
            return Err(Error::PointOnNode { point: y, node });
        }
    }
    let mut entries = DenseMatrix::zeros(eval_points.len(), n);
    let mut max_imag = 0.0_f64;
    for (l, &y) in eval_points.iter().enumerate() {
        for j in 0..n {
            let sum = primed_sum(n, j, |k| {
                let angle = 2.0 * PI * k as f64 * y / period;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            });
            let (re, im) = entry(grid, y, sum);
            entries.set(l, j, re);
            max_imag = max_imag.max(im.abs());
        }
    }
    Ok(IntegrationMatrix {
        kind: MatrixKind::Rectangular,
        grid: grid.clone(),
        eval_points: eval_points.to_vec(),
        entries,
        max_imag_residual: max_imag,
    })
}

/// The 1×N row Θ_N = (T/N)·1ᵀ integrating over a full period.
pub fn terminal_quadrature(grid: &EquispacedGrid) -> IntegrationMatrix {
    let n = grid.len();
    let w = grid.period() / n as f64;
    IntegrationMatrix {
        kind: MatrixKind::TerminalRow,
        grid: grid.clone(),
        eval_points: Vec::new(),
        entries: DenseMatrix::from_row_major(1, n, vec![w; n]),
        max_imag_residual: 0.0,
    }
}

pub fn apply_quadrature(matrix: &IntegrationMatrix, samples: &[f64]) -> Result<Vec<f64>> {
    let n = matrix.grid.len();
    if samples.len() != n {
        return Err(Error::LengthMismatch {
            what: "quadrature samples",
            expected: n,
            actual: samples.len(),
        });
    }
    Ok(matrix.entries.mul_vec(samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::make_grid;

    #[test]
    fn square_first_row_zero() {
        for &n in &[2usize, 4, 10, 32] {
            let m = build_square_fim(&make_grid(n, 1.3).unwrap());
            assert!(m.entries().row(0).iter().all(|v| v.abs() <= 1e-14));
        }
    }

    #[test]
    fn square_n4_cosine() {
        let g = make_grid(4, 2.0 * PI).unwrap();
        let m = build_square_fim(&g);
        let f: Vec<f64> = g.nodes().iter().map(|&t| libm::cos(t)).collect();
        let q = m.apply(&f).unwrap();
        for (got, want) in q.iter().zip([0.0, 1.0, 0.0, -1.0]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn rectangular_at_period_is_terminal() {
        let g = make_grid(6, 2.5).unwrap();
        let m = build_rectangular_fim(&g, &[2.5]).unwrap();
        for j in 0..6 {
            assert!((m.get(0, j) - 2.5 / 6.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rectangular_validation() {
        let g = make_grid(8, 1.0).unwrap();
        assert!(matches!(
            build_rectangular_fim(&g, &[0.0]),
            Err(Error::PointOutOfRange { .. })
        ));
        assert!(matches!(
            build_rectangular_fim(&g, &[1.2]),
            Err(Error::PointOutOfRange { .. })
        ));
        assert!(matches!(
            build_rectangular_fim(&g, &[-0.1]),
            Err(Error::PointOutOfRange { .. })
        ));
        assert!(matches!(
            build_rectangular_fim(&g, &[0.3, 0.375]),
            Err(Error::PointOnNode { node: 3, .. })
        ));
    }

    #[test]
    fn terminal_row_exact() {
        let g = make_grid(10, 24.0).unwrap();
        let m = terminal_quadrature(&g);
        assert_eq!(m.entries().shape(), (1, 10));
        assert!(m.entries().row(0).iter().all(|&v| v == 2.4));
        let q = m.apply(&[1.5; 10]).unwrap();
        assert!((q[0] - 36.0).abs() < 1e-12);
    }

    #[test]
    fn apply_checks_length() {
        let g = make_grid(4, 1.0).unwrap();
        let m = build_square_fim(&g);
        assert!(m.apply(&[0.0; 5]).is_err());
        assert_eq!(m.apply(&[0.0; 4]).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn paired_matches_complex_sum() {
        for &n in &[2usize, 4, 8, 16, 30, 64] {
            let g = make_grid(n, 4.4).unwrap();
            let a = build_square_fim(&g);
            let b = build_square_fim_paired(&g);
            for (x, y) in a.entries().as_slice().iter().zip(b.entries().as_slice()) {
                assert!((x - y).abs() <= 1e-13, "N={n}: {x} vs {y}");
            }
        }
    }
}
