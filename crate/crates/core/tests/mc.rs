mod common;

use common::params;
use rankone_core::{
    check_geodesic_curvature, check_metric_pullback, eckart_young_distance, mc_goe_det,
    mc_probability, mc_weingarten_stats, poly_to_sym_matrix, sample_kostlan, McConfig, OracleKind,
    SeedSpec, SolverOptions,
};

#[test]
fn results_do_not_depend_on_worker_count() {
    let opts = SolverOptions::default();
    for (n, d, delta) in [(1, 3, 0.3), (2, 2, 0.3), (2, 3, 0.4)] {
        let one = mc_probability(
            params(n, d),
            delta,
            &McConfig::new(3000, 5).with_workers(1),
            &opts,
            true,
        )
        .unwrap();
        let four = mc_probability(
            params(n, d),
            delta,
            &McConfig::new(3000, 5).with_workers(4),
            &opts,
            true,
        )
        .unwrap();
        assert_eq!(one, four);
    }
    let a = mc_goe_det(4, 0.7, &McConfig::new(50_000, 3).with_workers(1)).unwrap();
    let b = mc_goe_det(4, 0.7, &McConfig::new(50_000, 3).with_workers(7)).unwrap();
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_eq!(a, b);
    let a = mc_weingarten_stats(params(3, 4), &McConfig::new(20_000, 3).with_workers(1)).unwrap();
    let b = mc_weingarten_stats(params(3, 4), &McConfig::new(20_000, 3).with_workers(3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn quadratic_indicators_match_eckart_young() {
    let delta = 0.4;
    let cfg = McConfig::new(20_000, 12);
    let run = mc_probability(params(2, 2), delta, &cfg, &SolverOptions::default(), true).unwrap();
    assert_eq!(run.oracle, OracleKind::Exact);
    for rec in run.records.unwrap() {
        let p = sample_kostlan(params(2, 2), SeedSpec::new(cfg.seed, rec.index));
        let ey = eckart_young_distance(&poly_to_sym_matrix(&p).unwrap());
        assert_eq!(rec.indicator, ey < delta * p.norm(), "sample {}", rec.index);
    }
}

#[test]
fn probability_guards_and_flags() {
    let opts = SolverOptions::default();
    let cfg = McConfig::new(200, 1);
    assert!(mc_probability(params(1, 3), 0.75, &cfg, &opts, false).is_err());
    assert!(mc_probability(params(1, 3), -0.1, &cfg, &opts, false).is_err());
    let zero = mc_probability(params(2, 2), 0.0, &cfg, &opts, false).unwrap();
    assert_eq!(zero.report.estimate, 0.0);
    assert_eq!(zero.report.z_score, 0.0);
    let h = mc_probability(params(2, 3), 0.3, &cfg, &opts, false).unwrap();
    assert_eq!(h.oracle, OracleKind::HeuristicOracle);
    assert!(h.records.is_none());
    let e = mc_probability(params(1, 5), 0.3, &cfg, &opts, false).unwrap();
    assert_eq!(e.oracle, OracleKind::Exact);
    let r = &e.report;
    assert!(r.stderr >= 0.0 && r.ci_low <= r.estimate && r.estimate <= r.ci_high);
}

#[test]
fn goe_determinant_examples() {
    let r = mc_goe_det(2, 1.0, &McConfig::new(1_000_000, 41)).unwrap();
    assert_eq!(r.reference, 0.5);
    assert!(r.within(3.0), "z {}", r.z_score);
    for (lambda, seed) in [(0.3, 42), (0.7, 43)] {
        let r = mc_goe_det(4, lambda, &McConfig::new(1_000_000, seed)).unwrap();
        let expect = 1.0 - 3.0 * lambda * lambda + 0.75 * lambda.powi(4);
        assert!((r.reference - expect).abs() < 1e-15);
        assert!(r.within(3.0), "lambda {lambda}: z {}", r.z_score);
    }
}

#[test]
fn weingarten_examples() {
    let r = mc_weingarten_stats(params(3, 2), &McConfig::new(100_000, 51)).unwrap();
    assert_eq!(r.diagonal.reference, 1.0);
    assert!(r.diagonal.within(3.0));
    assert!(r.p_directions_zero);
    let r = mc_weingarten_stats(params(2, 5), &McConfig::new(100_000, 52)).unwrap();
    let off = r.off_diagonal.unwrap();
    assert!((off.reference - 0.8).abs() < 1e-15);
    assert!(off.within(3.0), "z {}", off.z_score);
    assert_eq!(r.entry_moments.len(), 2);
    let r = mc_weingarten_stats(params(1, 4), &McConfig::new(1000, 53)).unwrap();
    assert!(r.off_diagonal.is_none());
}

#[test]
fn finite_difference_examples() {
    let m = check_metric_pullback(params(2, 4));
    assert_eq!(m.reference, 2.0);
    assert!(m.max_rel_error <= 1e-6 && m.trials == 100);
    let m = check_metric_pullback(params(1, 2));
    assert!((m.max_estimate - 2f64.sqrt()).abs() <= 1e-6 * 2f64.sqrt());
    assert!(
        (m.halving_ratio - 4.0).abs() < 0.3,
        "ratio {}",
        m.halving_ratio
    );

    let c = check_geodesic_curvature(params(1, 2));
    assert!((c.max_estimate - 1.0).abs() <= 1e-4 && (c.min_estimate - 1.0).abs() <= 1e-4);
    let c = check_geodesic_curvature(params(3, 6));
    assert!((c.reference - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert!(c.max_rel_error <= 1e-4);
    assert!(c.reciprocal_rel_error.unwrap() <= 1e-4);
    assert!(
        (c.halving_ratio - 4.0).abs() < 0.3,
        "ratio {}",
        c.halving_ratio
    );
}
