use fracsis::model::classical_sis;
use fracsis::Method;
use fracsis_harness::runs::{
    c0_config, crossing_time, longest_a_table, run_c0_suite, run_config, run_table1, table1_row,
    C0_ALPHAS, TABLE1_ALPHAS,
};
use fracsis_harness::{linf_distance, resolve, Preset, RawConfig};

#[test]
fn linf_is_symmetric_on_real_runs() {
    let outputs = run_table1(&[0.7]).unwrap();
    let out = &outputs[0];
    let s = out.trajectory(Method::Series).unwrap();
    let p = out.trajectory(Method::Pece).unwrap();
    assert_eq!(linf_distance(s, p).unwrap(), linf_distance(p, s).unwrap());
    assert_eq!(linf_distance(s, s).unwrap(), 0.0);
}

#[test]
fn table1_near_one_series_vs_pece_order() {
    let outputs = run_table1(&TABLE1_ALPHAS).unwrap();
    let row = table1_row(&outputs[0].report).unwrap();
    assert!(row[0] > 1e-6 && row[0] < 1e-4, "{row:?}");
    for out in &outputs {
        let series = out.trajectory(Method::Series).unwrap();
        assert!(series.all_converged());
        for tr in &out.trajectories {
            for n in 0..tr.values.len() {
                assert_eq!(tr.values[n] + tr.s(n), 1.0);
            }
        }
    }
}

#[test]
fn zero_capacity_bounded_for_larger_orders() {
    let runs = run_c0_suite(&C0_ALPHAS).unwrap();
    for r in &runs {
        for m in [Method::Pece, Method::L1] {
            assert_eq!(r.is_bounded(m), Some(true), "alpha {} {m}", r.alpha());
        }
    }
    for r in runs.iter().filter(|r| r.alpha() > 0.6) {
        assert_eq!(
            r.is_bounded(Method::Series),
            Some(true),
            "alpha {}",
            r.alpha()
        );
    }
    let half = runs.iter().find(|r| r.alpha() == 0.5).unwrap();
    let t = half.series_divergence.expect("divergence flagged");
    assert!(t > 0.25 && t <= 1.0, "{t}");
    let near_one = runs.iter().find(|r| r.alpha() == 0.99).unwrap();
    assert_eq!(near_one.series_divergence, None);
}

#[test]
fn zero_capacity_near_one_matches_classical() {
    let cfg = c0_config(0.99).unwrap();
    let out = run_config(&cfg).unwrap();
    let series = out.trajectory(Method::Series).unwrap();
    let classical_params = cfg.params.with_alpha(1.0).unwrap();
    let worst = series
        .grid
        .nodes()
        .zip(&series.values)
        .map(|(t, v)| (v - classical_sis(&classical_params, t).unwrap().0).abs())
        .fold(0.0f64, f64::max);
    assert!(worst <= 1e-2, "{worst}");
}

#[test]
fn zero_capacity_tables_use_all_finite_terms() {
    assert_eq!(longest_a_table(0.5).unwrap(), 200);
    let k = longest_a_table(0.99).unwrap();
    assert!(k > 150 && k < 200, "{k}");
    assert!(fracsis::coeffs::a_coeffs(0.99, k).is_ok());
}

#[test]
fn crossing_moves_right_for_smaller_order() {
    let runs = run_c0_suite(&[0.99, 0.7]).unwrap();
    let cross = |i: usize| {
        runs[i]
            .crossing_of(Method::Series)
            .expect("series crossing")
    };
    assert!(
        cross(1) > cross(0),
        "alpha 0.7 crosses at {}, alpha 0.99 at {}",
        cross(1),
        cross(0)
    );
}

#[test]
fn schemes_cross_further_right_at_half_order() {
    let runs = run_c0_suite(&[0.7, 0.5]).unwrap();
    for m in [Method::Pece, Method::L1] {
        let a = runs[0].crossing_of(m).unwrap();
        let b = runs[1].crossing_of(m).unwrap();
        assert!(b > a, "{m}: {b} vs {a}");
    }
    assert_eq!(runs[1].crossing_of(Method::Series), None);
}

#[test]
fn crossing_of_classical_run_is_a_grid_node() {
    let mut raw = Preset::CZero.raw();
    raw.alpha = Some(0.99);
    raw.methods = Some(vec!["classical".into()]);
    let cfg = resolve(raw).unwrap();
    let out = run_config(&cfg).unwrap();
    let t = crossing_time(out.trajectory(Method::Classical).unwrap()).unwrap();
    assert!((t / cfg.grid.dt() - (t / cfg.grid.dt()).round()).abs() < 1e-9);
}

#[test]
fn resolve_rejects_series_off_its_datum() {
    let raw = RawConfig {
        i0: Some(0.1),
        methods: Some(vec!["series".into()]),
        ..Preset::CNonzero.raw()
    };
    let err = resolve(RawConfig {
        alpha: Some(0.7),
        ..raw
    })
    .unwrap_err();
    assert!(err.to_string().contains("c/2"), "{err}");
}
