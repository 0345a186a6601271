use ymflow::evolve::{
    run_physical, scaling_blowup_times, scaling_check, shoot_t, PhysicalConfig, ShootOptions,
    ShootVerdict, SolverConfig,
};
use ymflow::model::{make_dimension, weinkove, GridFunction, RadialGrid};

#[test]
fn shooting_offset_is_linear_in_amplitude() {
    let dim = make_dimension(6).unwrap();
    let cfg = SolverConfig::similarity(6);
    let offset = |eps: f64| {
        let v = GridFunction::sample(cfg.grid, |r| eps * (-r * r).exp());
        let r = shoot_t(&dim, &v, &ShootOptions::default(), &cfg).unwrap();
        assert_eq!(r.verdict, ShootVerdict::Converged);
        for w in r.bracket_history.windows(2) {
            assert!(w[1].0 >= w[0].0 && w[1].1 <= w[0].1 && w[1].0 < w[1].1);
        }
        r.t - 1.0
    };
    let (a, b) = (offset(1e-2), offset(1e-3));
    assert!((a / b / 10.0 - 1.0).abs() < 0.05, "{a} {b}");
}

#[test]
fn physical_blowup_time_matches_shooting() {
    let dim = make_dimension(6).unwrap();
    let cfg = SolverConfig::similarity(6);
    let eps = 1e-2;
    let v = GridFunction::sample(cfg.grid, |r| eps * (-r * r).exp());
    let t = shoot_t(&dim, &v, &ShootOptions::default(), &cfg).unwrap().t;
    let pc = PhysicalConfig::physical(6);
    let st = t.sqrt();
    let u0 = GridFunction::sample(pc.grid, |r| {
        let x = st * r;
        t * (weinkove(&dim, x) + eps * (-x * x).exp())
    });
    let res = run_physical(&dim, &u0, &pc).unwrap();
    let tfit = res.tfit.unwrap();
    assert!((tfit - t).abs() <= 2e-2, "{tfit} vs {t}");
}

#[test]
fn rescaled_data_blows_up_at_rescaled_time() {
    let dim = make_dimension(5).unwrap();
    let pc = PhysicalConfig::physical(5);
    let u0 = GridFunction::sample(pc.grid, |r| 1.2 * weinkove(&dim, r));
    let (t, tl) = scaling_blowup_times(&dim, &u0, 0.5, &pc).unwrap();
    assert!((tl / t - 1.0).abs() <= 2e-2, "{t} {tl}");
}

#[test]
fn scaling_of_small_data_runs() {
    let dim = make_dimension(5).unwrap();
    let mut pc = PhysicalConfig::physical(5);
    pc.grid = RadialGrid::new(20.0, 2000).unwrap();
    let u0 = GridFunction::sample(pc.grid, |r| 0.01 * (-r * r).exp());
    let rep = scaling_check(&dim, &u0, 2.0, &pc, &[0.1, 0.5, 1.0]).unwrap();
    assert!(rep.max_rel_error <= 1e-3, "{rep:?}");
    assert!(scaling_check(&dim, &u0, 3.0, &pc, &[0.1]).is_err());
}
