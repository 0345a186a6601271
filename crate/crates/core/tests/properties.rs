use num_traits::ToPrimitive;
use proptest::prelude::*;
use ymflow::evolve::{linear_fit, ou_oracle, step_similarity, OuterBc, SolverConfig};
use ymflow::ggmt::{ggmt_constant, ggmt_constant_exact};
use ymflow::linalg::Tridiagonal;
use ymflow::model::{
    halfline_transform, make_dimension, weinkove, Direction, GridFunction, RadialGrid,
};
use ymflow::spectral::richardson;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn even_quadratics_interpolate_exactly(a in -5.0f64..5.0, c in -5.0f64..5.0, x in 0.0f64..1.0) {
        let grid = RadialGrid::new(10.0, 97).unwrap();
        let f = GridFunction::sample(grid, |r| a + c * r * r);
        // the last interval uses an extrapolated ghost and is not exact
        let rho = x * grid.rho(grid.nodes - 1);
        let want = a + c * rho * rho;
        prop_assert!((f.interpolate(rho) - want).abs() <= 1e-11 * (1.0 + want.abs()));
    }

    #[test]
    fn line_fit_recovers_lines(m in -10.0f64..10.0, q in -10.0f64..10.0) {
        let x: Vec<f64> = (0..30).map(|i| 0.1 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| m * x + q).collect();
        let f = linear_fit(&x, &y).unwrap();
        prop_assert!((f.slope - m).abs() < 1e-10 && (f.intercept - q).abs() < 1e-10);
    }

    #[test]
    fn richardson_removes_quadratic_error(l0 in -3.0f64..3.0, c in -10.0f64..10.0, h in 1e-3f64..1e-1, k in 1.5f64..4.0) {
        let h2 = h / k;
        let est = richardson(h, l0 + c * h * h, h2, l0 + c * h2 * h2);
        prop_assert!((est - l0).abs() < 1e-11);
    }

    #[test]
    fn ou_semigroup(beta in 0.05f64..2.0, t1 in 0.0f64..2.0, t2 in 0.0f64..2.0, rho in 0.0f64..6.0) {
        let dim = make_dimension(5).unwrap();
        let e = (-t1).exp();
        let amp = ou_oracle(&dim, beta, t1, 0.0);
        let beta1 = beta * e / (1.0 + 4.0 * (1.0 - e) * beta);
        let direct = ou_oracle(&dim, beta, t1 + t2, rho);
        let composed = amp * ou_oracle(&dim, beta1, t2, rho);
        prop_assert!((direct - composed).abs() <= 1e-12 * direct.abs().max(1e-300));
    }

    #[test]
    fn halfline_round_trip(d in 5i64..10, s in 0.2f64..3.0) {
        let dim = make_dimension(d).unwrap();
        let grid = RadialGrid::new(12.0, 600).unwrap();
        let f = GridFunction::sample(grid, |r| (-s * r * r).exp());
        let u = halfline_transform(&dim, &f, Direction::ToHalfline).unwrap();
        let back = halfline_transform(&dim, &u, Direction::FromHalfline).unwrap();
        for (x, y) in back.values.iter().zip(&f.values) {
            prop_assert!((x - y).abs() <= 1e-13 * y.abs().max(1e-300));
        }
    }

    #[test]
    fn tridiagonal_solve_inverts_apply(seed in proptest::collection::vec(-1.0f64..1.0, 60)) {
        let n = 20;
        let mut m = Tridiagonal::zeros(n);
        for i in 0..n {
            m.lower[i] = seed[i];
            m.upper[i] = seed[n + i];
            m.diag[i] = 3.0 + seed[2 * n + i];
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut b = vec![0.0; n];
        m.apply(&x, &mut b);
        let y = m.solve(&b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            prop_assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_constant_matches_exact_fraction(n in 5i64..16, p in 2u32..9) {
        let exact = ggmt_constant_exact(n, p).to_f64().unwrap();
        let float = ggmt_constant(n, p as f64).unwrap();
        prop_assert!((float - exact).abs() <= 1e-12 * exact);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn weinkove_survives_a_step(d in 5i64..10, dt in 1e-5f64..1e-3, dirichlet in any::<bool>()) {
        let dim = make_dimension(d).unwrap();
        let mut cfg = SolverConfig::similarity(d);
        cfg.dt = dt;
        cfg.bc_outer = if dirichlet { OuterBc::DirichletZero } else { OuterBc::Extrapolated };
        let w = GridFunction::sample(cfg.grid, |r| weinkove(&dim, r));
        let next = step_similarity(&dim, &w, &cfg).unwrap();
        let drift = next.zip(&w, |a, b| a - b).unwrap().sup();
        prop_assert!(drift <= 1e-9, "{}", drift);
    }

    #[test]
    fn config_hash_tracks_content(dt in 1e-4f64..1e-2) {
        let mut a = SolverConfig::similarity(6);
        a.dt = dt;
        let b = a.clone();
        prop_assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.dt = dt * 1.5;
        prop_assert_ne!(a.hash(), c.hash());
    }
}
