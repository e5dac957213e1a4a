//! Limited-memory BFGS with backtracking (Armijo) line search.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{axpy, dot, norm_inf};

const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK_FACTOR: f64 = 0.5;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iters: usize,
    /// Stop once ‖∇f‖∞ falls to this value.
    pub gradient_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbfgsExit {
    GradientTolerance,
    MaxIterations,
    /// No step along the search direction gave sufficient decrease.
    LineSearchFailed,
    /// Objective stopped changing at working precision.
    NoProgress,
}

#[derive(Debug, Clone)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub exit: LbfgsExit,
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// Two-loop recursion: returns −H·g.
fn search_direction(grad: &[f64], pairs: &VecDeque<Pair>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for p in pairs.iter().rev() {
        let a = p.rho * dot(&p.s, &q);
        axpy(-a, &p.y, &mut q);
        alphas.push(a);
    }
    if let Some(last) = pairs.back() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        q.iter_mut().for_each(|v| *v *= gamma);
    } else {
        // Unit first step in the max-norm.
        let g = norm_inf(grad);
        if g > 0.0 {
            q.iter_mut().for_each(|v| *v /= g.max(1.0));
        }
    }
    for (p, a) in pairs.iter().zip(alphas.iter().rev()) {
        let b = p.rho * dot(&p.y, &q);
        axpy(a - b, &p.s, &mut q);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Minimizes `fun`, which writes the gradient into its second argument and
/// returns the value.
pub fn minimize<F>(mut fun: F, x0: &[f64], opts: &LbfgsOptions) -> LbfgsResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = fun(&x, &mut g);
    let mut pairs: VecDeque<Pair> = VecDeque::with_capacity(opts.memory);
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];

    let mut iterations = 0;
    let exit = loop {
        if norm_inf(&g) <= opts.gradient_tolerance {
            break LbfgsExit::GradientTolerance;
        }
        if iterations >= opts.max_iters {
            break LbfgsExit::MaxIterations;
        }
        let mut d = search_direction(&g, &pairs);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            // Curvature pairs gave an ascent direction; restart from steepest descent.
            pairs.clear();
            d = search_direction(&g, &pairs);
            slope = dot(&g, &d);
        }

        let mut step = 1.0;
        let mut accepted = false;
        let mut f_new = f;
        for _ in 0..MAX_BACKTRACKS {
            for ((xn, xi), di) in x_new.iter_mut().zip(&x).zip(&d) {
                *xn = xi + step * di;
            }
            f_new = fun(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= f + ARMIJO_C1 * step * slope {
                accepted = true;
                break;
            }
            step *= BACKTRACK_FACTOR;
        }
        if !accepted {
            break LbfgsExit::LineSearchFailed;
        }
        iterations += 1;

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 * dot(&y, &y).max(f64::MIN_POSITIVE) {
            if pairs.len() == opts.memory {
                pairs.pop_front();
            }
            pairs.push_back(Pair { s, y, rho: 1.0 / sy });
        }

        let decrease = f - f_new;
        core::mem::swap(&mut x, &mut x_new);
        core::mem::swap(&mut g, &mut g_new);
        f = f_new;
        if decrease <= 4.0 * f64::EPSILON * f.abs() && step < 1e-8 {
            break LbfgsExit::NoProgress;
        }
    };

    LbfgsResult {
        x,
        value: f,
        gradient: g,
        iterations,
        exit,
    }
}
