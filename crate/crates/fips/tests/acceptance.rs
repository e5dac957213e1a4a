//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Run with `cargo test -p fips --test acceptance`.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use fips::cli::solve_problem;
use fips::problem2_solver_config;
use fips_core::solver::NlpProblem;
use fips_core::*;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

/// Collects failed sub-checks for one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn finish(self) -> Outcome {
        let mut parts = self.notes;
        if !self.failures.is_empty() {
            parts.push(format!("failed: {}", self.failures.join("; ")));
        }
        Outcome {
            passed: self.failures.is_empty(),
            detail: parts.join(", "),
        }
    }
}

fn timed(c: &mut Checks, limit_s: f64, label: &str, start: Instant) {
    let secs = start.elapsed().as_secs_f64();
    c.note(format!("{label}{secs:.2}s"));
    c.check(secs <= limit_s, format!("{label}runtime {secs:.2}s > {limit_s}s"));
}

fn quadrature_convergence() -> Outcome {
    let mut c = Checks::default();
    let start = Instant::now();
    let ns: Vec<usize> = (1..=10).map(|k| 10 * k).collect();
    for f in [
        AnalyticTestFunction::f1(),
        AnalyticTestFunction::f2(),
        AnalyticTestFunction::f3(),
    ] {
        let report = match run_convergence_study(&f, &ns) {
            Ok(r) => r,
            Err(e) => {
                c.check(false, format!("{}: {e}", f.id()));
                continue;
            }
        };
        for p in report.points() {
            match f.id() {
                "f1" => c.check(
                    p.inf_error <= 1e-13 && p.euclid_error <= 1e-13,
                    format!("f1 N={} error {:e}", p.n, p.euclid_error),
                ),
                id => {
                    let onset = if id == "f3" { 20 } else { 50 };
                    if p.n >= onset {
                        c.check(
                            p.euclid_error <= 1e-12,
                            format!("{id} N={} error {:e}", p.n, p.euclid_error),
                        );
                    }
                    if p.euclid_error > 1e-12 {
                        let bound = p.bound.unwrap_or(f64::NAN);
                        c.check(p.euclid_error <= bound, format!("{id} N={} bound {bound:e}", p.n));
                    }
                }
            }
        }
    }
    timed(&mut c, 5.0, "", start);
    c.finish()
}

fn fim_structure() -> Outcome {
    let mut c = Checks::default();
    let start = Instant::now();
    let mut worst_imag = 0.0_f64;
    for period in [2.0 * PI, 1.7] {
        for n in [4, 8, 16, 64] {
            let grid = make_grid(n, period).unwrap();
            let fim = build_square_fim(&grid);
            let tag = format!("N={n} T={period:.3}");
            c.check((0..n).all(|j| fim.get(0, j) == 0.0), format!("{tag} first row"));
            let terminal = terminal_quadrature(&grid);
            let h = period / n as f64;
            c.check((0..n).all(|j| terminal.get(0, j) == h), format!("{tag} terminal row"));

            let ones = fim.apply(&vec![1.0; n]).unwrap();
            let err = ones
                .iter()
                .zip(grid.nodes())
                .map(|(a, t)| (a - t).abs())
                .fold(0.0, f64::max);
            c.check(err <= 1e-13, format!("{tag} constants {err:e}"));

            let w = 2.0 * PI / period;
            let mut mono_err = 0.0_f64;
            for k in 1..n / 2 {
                let kw = k as f64 * w;
                let cos: Vec<f64> = grid.nodes().iter().map(|t| (kw * t).cos()).collect();
                let sin: Vec<f64> = grid.nodes().iter().map(|t| (kw * t).sin()).collect();
                let (ic, is) = (fim.apply(&cos).unwrap(), fim.apply(&sin).unwrap());
                for (l, t) in grid.nodes().iter().enumerate() {
                    mono_err = mono_err.max((ic[l] - (kw * t).sin() / kw).abs());
                    mono_err = mono_err.max((is[l] - (1.0 - (kw * t).cos()) / kw).abs());
                }
            }
            let nyq: Vec<f64> = grid.nodes().iter().map(|t| (n as f64 / 2.0 * w * t).cos()).collect();
            let inyq = fim.apply(&nyq).unwrap();
            mono_err = inyq.iter().fold(mono_err, |m, v| m.max(v.abs()));
            c.check(mono_err <= 1e-11, format!("{tag} trig exactness {mono_err:e}"));

            worst_imag = worst_imag.max(fim.max_imag_residual());
        }
    }
    c.note(format!("max imaginary residual {worst_imag:.3e}"));
    c.check(
        worst_imag <= 1e-11,
        "imaginary residual > 1e-11 (equals 2T/(pi N^2), see README)",
    );
    timed(&mut c, 2.0, "", start);
    c.finish()
}

fn problem1_rows() -> Outcome {
    let mut c = Checks::default();
    let rows = [
        (0.2475, 4.431736, 12, -3.90e-2),
        (0.2475, 4.431_736_25, 16, -3.95e-2),
        (0.1, 3.63431, 12, -7.5e-2),
    ];
    for (b, period, n, threshold) in rows {
        let prob = make_problem1(Problem1Params { b, period }).unwrap();
        let mut accepted = None;
        for periodic in [true, false] {
            let start = Instant::now();
            let r = solve_problem(&prob, n, periodic, &SolverConfig::default()).unwrap();
            let secs = start.elapsed().as_secs_f64();
            if r.j_n <= threshold && r.adfe_inf <= 1e-8 && secs <= 60.0 {
                accepted = Some((periodic, r.j_n, r.adfe_inf));
                break;
            }
        }
        match accepted {
            Some((periodic, j, adfe)) => c.note(format!(
                "N={n} b={b}: J={j:.8e} adfe={adfe:.1e} ({})",
                if periodic { "periodicity on" } else { "periodicity off" }
            )),
            None => c.check(false, format!("N={n} b={b} T={period}")),
        }
    }
    c.finish()
}

fn problem2_properties() -> Outcome {
    let mut c = Checks::default();
    let prob = make_problem2(Problem2Params::default()).unwrap();
    let start = Instant::now();
    let r = solve_problem(&prob, 50, false, &problem2_solver_config()).unwrap();
    c.check(r.converged(), format!("status {}", r.solver_status.as_str()));
    let viol = r.max_path_violation();
    c.check(viol <= 1e-8, format!("path violation {viol:e}"));
    let mean_dev = (0..50).map(|j| (r.x_nodes.get(j, 0) - 20.0).abs()).sum::<f64>() / 50.0;
    c.check(mean_dev <= 1.0, format!("mean |x1-20| = {mean_dev}"));
    let u1_min = (0..50).map(|j| r.u_nodes.get(j, 0)).fold(f64::INFINITY, f64::min);
    c.check(u1_min >= 8000.0 - 1e-8, format!("min u1 {u1_min}"));
    c.check(u1_min <= 8000.0 * 1.05, format!("min u1 {u1_min} not near bound"));
    c.check(r.adfe_inf <= 1e-7, format!("adfe {:e}", r.adfe_inf));
    c.note(format!(
        "J={:.6e} mean|x1-20|={mean_dev:.3} min u1={u1_min:.3} adfe={:.1e}",
        r.j_n, r.adfe_inf
    ));
    timed(&mut c, 120.0, "", start);
    c.finish()
}

/// Near the ε^(1/3) optimum for central differences; `fd_step` is ten times
/// smaller and loses ~1e-5 to roundoff on Problem 2's 1e6-sized cost.
fn central_step(v: f64) -> f64 {
    1e-5 * (1.0 + v.abs())
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

fn worst_derivative_error<P: NlpProblem>(nlp: &P, z: &[f64]) -> f64 {
    let nv = nlp.num_vars();
    let (ne, ni) = (nlp.num_eq(), nlp.num_ineq());
    let mut grad = vec![0.0; nv];
    nlp.objective_gradient(z, &mut grad);
    let mut je = DenseMatrix::zeros(ne, nv);
    nlp.eq_jacobian(z, &mut je);
    let mut ji = DenseMatrix::zeros(ni, nv);
    nlp.ineq_jacobian(z, &mut ji);
    let mut worst = 0.0_f64;
    let mut w = z.to_vec();
    let (mut hp, mut hm, mut cp, mut cm) = (vec![0.0; ne], vec![0.0; ne], vec![0.0; ni], vec![0.0; ni]);
    for k in 0..nv {
        let h = central_step(z[k]);
        w[k] = z[k] + h;
        let fp = nlp.objective(&w);
        nlp.eq_constraints(&w, &mut hp);
        nlp.ineq_constraints(&w, &mut cp);
        w[k] = z[k] - h;
        let fm = nlp.objective(&w);
        nlp.eq_constraints(&w, &mut hm);
        nlp.ineq_constraints(&w, &mut cm);
        w[k] = z[k];
        worst = worst.max(relative(grad[k], (fp - fm) / (2.0 * h)));
        for r in 0..ne {
            worst = worst.max(relative(je.get(r, k), (hp[r] - hm[r]) / (2.0 * h)));
        }
        for r in 0..ni {
            worst = worst.max(relative(ji.get(r, k), (cp[r] - cm[r]) / (2.0 * h)));
        }
    }
    worst
}

fn derivative_fidelity() -> Outcome {
    let mut c = Checks::default();
    let start = Instant::now();
    let mut rng = Pcg64::seed_from_u64(7);
    let p1 = make_problem1(Problem1Params {
        b: 0.2475,
        period: 4.431736,
    })
    .unwrap();
    let p2 = make_problem2(Problem2Params::default()).unwrap();
    let mut worst1 = 0.0_f64;
    let mut worst2 = 0.0_f64;
    for periodic in [false, true] {
        let nlp = discretize(&p1, 8, periodic).unwrap();
        for _ in 0..5 {
            let z: Vec<f64> = (0..nlp.num_vars()).map(|_| rng.random_range(-2.0..2.0)).collect();
            worst1 = worst1.max(worst_derivative_error(&nlp, &z));
        }
        let nlp = discretize(&p2, 8, periodic).unwrap();
        for _ in 0..5 {
            let mut z: Vec<f64> = (0..16).map(|_| rng.random_range(5.0..45.0)).collect();
            z.extend((0..16).map(|_| rng.random_range(5000.0..25000.0)));
            worst2 = worst2.max(worst_derivative_error(&nlp, &z));
        }
    }
    c.note(format!("worst relative error p1 {worst1:.1e}, p2 {worst2:.1e}"));
    c.check(worst1 <= 1e-5, "problem 1");
    c.check(worst2 <= 1e-5, "problem 2");
    timed(&mut c, 5.0, "", start);
    c.finish()
}

fn determinism() -> Outcome {
    let mut c = Checks::default();
    for format in ["json", "csv"] {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_fips"))
                .args([
                    "solve-p1", "--b", "0.2475", "--T", "4.431736", "--N", "12", "--format", format,
                ])
                .output()
                .expect("spawn fips")
        };
        let (a, b) = (run(), run());
        c.check(
            a.status.success() && b.status.success(),
            format!("{format} exit status"),
        );
        c.check(
            !a.stdout.is_empty() && a.stdout == b.stdout,
            format!("{format} output differs"),
        );
        c.note(format!("{format} {} bytes", a.stdout.len()));
    }
    c.finish()
}

fn mu_checks() -> Outcome {
    let mut c = Checks::default();
    let limit = mu_factor(2.0 * PI, 1e6).unwrap();
    let gap = (limit - 2.0 * (2.0 * PI).sqrt()).abs();
    c.note(format!("|mu(2pi,1e6) - 2 sqrt(2pi)| = {gap:.1e}"));
    c.check(gap <= 1e-8, "limit");
    let mus: Vec<f64> = [0.5, 1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&b| mu_factor(2.0 * PI, b).unwrap())
        .collect();
    c.check(
        mus.windows(2).all(|w| w[1] < w[0]),
        format!("not strictly decreasing: {mus:?}"),
    );
    c.finish()
}

fn main() {
    // Honour the usual harness flags loosely: `--list` prints nothing, a filter is ignored.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [Criterion; 7] = [
        ("quadrature convergence", quadrature_convergence),
        ("FIM structure", fim_structure),
        ("problem 1 reference rows", problem1_rows),
        ("problem 2 properties", problem2_properties),
        ("derivative fidelity", derivative_fidelity),
        ("CLI determinism", determinism),
        ("mu limit and monotonicity", mu_checks),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}. {name}: {}", i + 1, outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
