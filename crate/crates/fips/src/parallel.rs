//! Thread-parallel drivers with deterministic results.
//!
//! Work items are split into contiguous chunks, one per thread, and results
//! are written back by index, so the output never depends on scheduling.

use std::num::NonZeroUsize;
use std::thread;

use fips_core::error_bounds::convergence_point;
use fips_core::solver::{better, multistart_points, solve_from_point, NlpProblem, NlpSolution};
use fips_core::{AnalyticTestFunction, ConvergenceReport, SolverConfig};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "FIPS_THREADS";

/// Thread budget: `FIPS_THREADS` if it is a positive integer, else the machine's cores.
pub fn thread_limit() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<NonZeroUsize>().ok())
        .or_else(|| thread::available_parallelism().ok())
        .map_or(1, NonZeroUsize::get)
}

/// Maps `f` over `items` on up to `threads` scoped threads, preserving order.
pub fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

/// Convergence study with the node counts spread over threads.
pub fn convergence_study(
    f: &AnalyticTestFunction,
    n_list: &[usize],
    threads: usize,
) -> fips_core::Result<ConvergenceReport> {
    let points = par_map(n_list, threads, |&n| convergence_point(f, n))
        .into_iter()
        .collect::<fips_core::Result<Vec<_>>>()?;
    Ok(ConvergenceReport::from_points(f.id(), &points))
}

/// Multi-start solve with restarts spread over threads; the reduction keeps
/// the best solution (converged first, then lowest objective, then lowest
/// restart index), so the answer matches the sequential run.
pub fn solve_multistart<P: NlpProblem + Sync + ?Sized>(
    nlp: &P,
    config: &SolverConfig,
    threads: usize,
) -> fips_core::Result<NlpSolution> {
    config.validate()?;
    let starts: Vec<(usize, Vec<f64>)> = multistart_points(nlp, config)?.into_iter().enumerate().collect();
    let results = par_map(&starts, threads, |(i, z0)| {
        solve_from_point(nlp, config, z0.clone(), *i)
    });
    let mut best: Option<NlpSolution> = None;
    for r in results {
        let sol = r?;
        best = match best {
            Some(b) if !better(&sol, &b) => Some(b),
            _ => Some(sol),
        };
    }
    Ok(best.expect("at least one start point"))
}
