use std::f64::consts::PI;

use fips_core::integration::build_square_fim_paired;
use fips_core::solver::NlpProblem;
use fips_core::*;
use proptest::prelude::*;

fn even_n() -> impl Strategy<Value = usize> {
    (1usize..=32).prop_map(|h| 2 * h)
}

fn period() -> impl Strategy<Value = f64> {
    0.1f64..20.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_is_cardinal(n in even_n(), t in period()) {
        let g = make_grid(n, t).unwrap();
        for j in 0..n {
            for l in 0..n {
                let v = g.lagrange_basis(j, g.node(l)).unwrap();
                let expected = if j == l { 1.0 } else { 0.0 };
                prop_assert!((v - expected).abs() <= 1e-12, "F_{}(t_{}) = {}", j, l, v);
            }
        }
    }

    #[test]
    fn basis_is_partition_of_unity(n in even_n(), t in period(), s in 0.0f64..1.0) {
        let g = make_grid(n, t).unwrap();
        let sum: f64 = g.basis_vector(s * t).iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-11);
    }

    #[test]
    fn interpolant_reproduces_trig_polynomials(
        n in (2usize..=16).prop_map(|h| 2 * h),
        t in period(),
        a in prop::collection::vec(-2.0f64..2.0, 8),
        s in -1.0f64..2.0,
    ) {
        let g = make_grid(n, t).unwrap();
        let kmax = (n / 2 - 1).min(4);
        let w = 2.0 * PI / t;
        let f = |x: f64| {
            (1..=kmax).map(|k| a[2 * (k - 1)] * (k as f64 * w * x).cos() + a[2 * k - 1] * (k as f64 * w * x).sin()).sum::<f64>()
                + 0.7
        };
        let p = TrigInterpolant::from_fn(g, f);
        let x = s * t;
        prop_assert!((p.eval(x) - f(x)).abs() <= 1e-11, "{} vs {}", p.eval(x), f(x));
    }

    #[test]
    fn dft_round_trip(v in prop::collection::vec(-1e3f64..1e3, 1..=24)) {
        let n = 2 * v.len();
        let samples: Vec<f64> = v.iter().chain(v.iter().rev()).enumerate().map(|(i, x)| x * (1.0 + i as f64)).collect();
        let g = make_grid(n, 3.0).unwrap();
        let back = dft_coefficients(&samples, &g).unwrap().inverse();
        for (a, b) in back.iter().zip(&samples) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()) * n as f64);
        }
    }

    #[test]
    fn fim_integrates_trig_modes_exactly(n in (2usize..=32).prop_map(|h| 2 * h), t in period(), pick in 0usize..64) {
        let g = make_grid(n, t).unwrap();
        let fim = build_square_fim(&g);
        let w = 2.0 * PI / t;
        let k = 1 + pick % (n / 2 - 1).max(1);
        if k < n / 2 {
            let kw = k as f64 * w;
            let cos: Vec<f64> = g.nodes().iter().map(|x| (kw * x).cos()).collect();
            let sin: Vec<f64> = g.nodes().iter().map(|x| (kw * x).sin()).collect();
            let ic = fim.apply(&cos).unwrap();
            let is = fim.apply(&sin).unwrap();
            for (l, x) in g.nodes().iter().enumerate() {
                prop_assert!((ic[l] - (kw * x).sin() / kw).abs() <= 1e-11 * (1.0 + t));
                prop_assert!((is[l] - (1.0 - (kw * x).cos()) / kw).abs() <= 1e-11 * (1.0 + t));
            }
        }
        let nyq: Vec<f64> = g.nodes().iter().map(|x| (n as f64 / 2.0 * w * x).cos()).collect();
        for v in fim.apply(&nyq).unwrap() {
            prop_assert!(v.abs() <= 1e-11 * (1.0 + t));
        }
    }

    #[test]
    fn fim_integrates_constants(n in even_n(), t in period()) {
        let g = make_grid(n, t).unwrap();
        let fim = build_square_fim(&g);
        let ones = fim.apply(&vec![1.0; n]).unwrap();
        for (a, b) in ones.iter().zip(g.nodes()) {
            prop_assert!((a - b).abs() <= 1e-13 * (1.0 + t));
        }
        let term = terminal_quadrature(&g);
        prop_assert!(term.entries().row(0).iter().all(|&w| w == t / n as f64));
    }

    #[test]
    fn complex_and_paired_forms_agree(n in even_n(), t in period()) {
        let g = make_grid(n, t).unwrap();
        let a = build_square_fim(&g);
        let b = build_square_fim_paired(&g);
        for (x, y) in a.entries().as_slice().iter().zip(b.entries().as_slice()) {
            prop_assert!((x - y).abs() <= 1e-12 * t);
        }
    }

    #[test]
    fn rectangular_rows_are_consistent_near_nodes(n in even_n(), t in period(), l in 0usize..64) {
        let g = make_grid(n, t).unwrap();
        let l = l % n;
        let delta = 1e-6 * t;
        let rect = build_rectangular_fim(&g, &[g.node(l) + delta]).unwrap();
        let square = build_square_fim(&g);
        for j in 0..n {
            // The rows differ by ∫ over [t_l, t_l + δ] of a basis function bounded by 1.
            prop_assert!((rect.get(0, j) - square.get(l, j)).abs() <= 1.01 * delta + 1e-13);
        }
    }

    #[test]
    fn mu_decreases_in_beta(t in period(), b in 0.01f64..10.0, f in 1.01f64..4.0) {
        let (lo, hi) = (mu_factor(t, b * f).unwrap(), mu_factor(t, b).unwrap());
        prop_assert!(lo <= hi);
        // coth ω rounds to 1 for large ω, after which μ no longer moves.
        if 2.0 * PI * b * f / t < 10.0 {
            prop_assert!(lo < hi);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn discrete_objective_is_rectangle_rule(seed in prop::collection::vec(-3.0f64..3.0, 24), b in 0.05f64..1.0) {
        let prob = make_problem1(Problem1Params { b, period: 4.0 }).unwrap();
        let nlp = discretize(&prob, 8, false).unwrap();
        let traj = nlp.decode(&seed).unwrap();
        let direct = (0..8)
            .map(|j| prob.running_cost(traj.x.row(j), traj.u.row(j), nlp.grid().node(j), &[0.0]))
            .sum::<f64>()
            / 8.0;
        prop_assert!((nlp.objective(&seed) - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn adfe_is_absolute_residual(seed in prop::collection::vec(-3.0f64..3.0, 24)) {
        let prob = make_problem1(Problem1Params { b: 0.3, period: 4.0 }).unwrap();
        let nlp = discretize(&prob, 8, false).unwrap();
        let (traj, _, adfe) = nlp.evaluate(&seed).unwrap();
        let direct = compute_adfe(&prob, nlp.grid(), nlp.fim(), &traj.x, &traj.u).unwrap();
        prop_assert_eq!(&adfe, &direct);
        prop_assert!(adfe.iter().all(|&v| v >= 0.0));
        let mut h = vec![0.0; nlp.num_eq()];
        nlp.eq_constraints(&seed, &mut h);
        for (a, r) in adfe.iter().zip(&h) {
            prop_assert_eq!(*a, r.abs());
        }
    }

    #[test]
    fn callbacks_are_pure(x in prop::collection::vec(0.0f64..60.0, 2), u in prop::collection::vec(0.0f64..3e4, 2), t in 0.0f64..24.0) {
        let p = make_problem2(Problem2Params::default()).unwrap();
        let m = [u[0] * 0.9, 0.0];
        prop_assert_eq!(p.dynamics(&x, &u, t), p.dynamics(&x, &u, t));
        prop_assert_eq!(p.running_cost(&x, &u, t, &m).to_bits(), p.running_cost(&x, &u, t, &m).to_bits());
        prop_assert_eq!(p.path_constraints(&x, &u, t), p.path_constraints(&x, &u, t));
    }
}
