//! Acceptance criteria, run as a plain binary so that every criterion
//! prints one PASS/FAIL line regardless of output capture.

use std::f64::consts::{FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::Instant;

use rankone_core::{
    best_rank_one, check_geodesic_curvature, check_metric_pullback, curvature_coefficient,
    eckart_young_distance, entanglement_geometric, entanglement_log, j_integral, mc_goe_det,
    mc_probability, mc_weingarten_stats, poly_to_sym_matrix, prob_close_rank_one,
    prob_sym3_matrices, reach, sample_kostlan, veronese_volume, McConfig, OracleKind, SeedSpec,
    SolverMethod, SolverOptions, SpaceParams,
};

type Outcome = Result<String, String>;

fn params(n: usize, d: usize) -> SpaceParams {
    SpaceParams::new(n, d).expect("valid parameters")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sphere_volume(m: usize) -> f64 {
    let h = (m as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / statrs::function::gamma::gamma(h)
}

fn reach_table() -> Outcome {
    let mut worst = 0.0f64;
    for d in 2..=12usize {
        for n in 1..=3 {
            let r = reach(params(n, d));
            let rho1 = (0.5 * (1.0 + 1.0 / (d as f64 - 1.0))).sqrt();
            let expect = if d <= 5 { FRAC_PI_4 } else { rho1 };
            let err = (r.rho - expect).abs().max((r.rho1 - rho1).abs());
            ensure(err <= 1e-15, || format!("d={d}: rho {} vs {expect}", r.rho))?;
            ensure(r.rho2 == FRAC_PI_4, || format!("d={d}: rho2 {}", r.rho2))?;
            worst = worst.max(err);
        }
    }
    let r5 = reach(params(1, 5)).rho1;
    let r6 = reach(params(1, 6)).rho1;
    ensure(r6 < FRAC_PI_4 && FRAC_PI_4 < r5, || {
        format!("crossover {r6} {r5}")
    })?;
    ensure(
        (r6 - 0.6f64.sqrt()).abs() <= 1e-15 && (r5 - 0.625f64.sqrt()).abs() <= 1e-15,
        || "rho1 at d=5,6".into(),
    )?;
    Ok(format!(
        "d=2..12, max error {worst:.1e}; sqrt(0.6) < pi/4 < sqrt(0.625)"
    ))
}

fn j_closed_form() -> Outcome {
    let mut worst = 0.0f64;
    for d in [3usize, 5, 8] {
        for eps in [0.1, 0.4, 0.7] {
            let got = j_integral(d, d - 1, eps).map_err(|e| e.to_string())?;
            let expect = eps.sin().powi(d as i32 - 1) / (d as f64 - 1.0);
            let rel = ((got - expect) / expect).abs();
            ensure(rel <= 1e-10, || {
                format!("d={d} eps={eps}: {got} vs {expect}")
            })?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("max relative error {worst:.1e}"))
}

fn rational_curves() -> Outcome {
    let mut worst = 0.0f64;
    for d in 2..=8usize {
        let edge = reach(params(1, d)).rho.sin();
        for k in 1..=20 {
            let delta = edge * k as f64 / 21.0;
            let r = prob_close_rank_one(params(1, d), delta).map_err(|e| e.to_string())?;
            let expect = (d as f64).sqrt() * delta.powi(d as i32 - 1);
            ensure(r.valid_range, || {
                format!("d={d} delta={delta} flagged invalid")
            })?;
            let err = (r.value - expect).abs();
            ensure(err <= 1e-12, || {
                format!("d={d} delta={delta}: {} vs {expect}", r.value)
            })?;
            worst = worst.max(err);
        }
    }
    Ok(format!("d=2..8 x 20 radii, max error {worst:.1e}"))
}

fn sym3_matrices() -> Outcome {
    let p = params(2, 2);
    let mut worst = 0.0f64;
    for k in 1..=13 {
        let delta = 0.05 * k as f64;
        let general = prob_close_rank_one(p, delta)
            .map_err(|e| e.to_string())?
            .value;
        let closed = prob_sym3_matrices(delta).map_err(|e| e.to_string())?;
        let err = (general - closed).abs();
        ensure(err <= 1e-10, || {
            format!("delta={delta}: {general} vs {closed}")
        })?;
        worst = worst.max(err);
    }
    let residual = |delta: f64| -> Result<f64, String> {
        let v = prob_close_rank_one(p, delta)
            .map_err(|e| e.to_string())?
            .value;
        Ok(v - 32.0 * delta.powi(3) / (3.0 * PI) + 64.0 * delta.powi(5) / (15.0 * PI))
    };
    let mut orders = Vec::new();
    let mut delta = 0.2;
    while delta > 0.03 {
        let ratio = residual(delta)? / residual(delta / 2.0)?;
        orders.push(ratio.abs().log2());
        delta /= 2.0;
    }
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(min_order >= 6.0, || format!("residual orders {orders:?}"))?;
    Ok(format!(
        "13 radii, max error {worst:.1e}; residual order >= {min_order:.2}"
    ))
}

fn curvature_identity() -> Outcome {
    let mut worst = 0.0f64;
    for (n, d) in [(1, 3), (2, 2), (2, 3), (3, 2), (3, 4)] {
        let p = params(n, d);
        let k0 = curvature_coefficient(p, 0);
        let expect = veronese_volume(p) * sphere_volume(p.sphere_dim() - n - 1);
        let rel = ((k0 - expect) / expect).abs();
        ensure(rel <= 1e-10, || format!("({n},{d}): {k0} vs {expect}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("5 cases, max relative error {worst:.1e}"))
}

fn goe_determinant() -> Outcome {
    let mut parts = Vec::new();
    for (n, lambda, expect, seed) in [(3, 0.5, 0.625, 6), (4, 0.7, -0.289925, 7)] {
        let r =
            mc_goe_det(n, lambda, &McConfig::new(1_000_000, seed)).map_err(|e| e.to_string())?;
        ensure((r.reference - expect).abs() < 1e-14, || {
            format!("reference {}", r.reference)
        })?;
        ensure(r.within(3.0), || {
            format!("n={n}: {} +- {} (z {:.2})", r.estimate, r.stderr, r.z_score)
        })?;
        parts.push(format!("n={n} z={:+.2}", r.z_score));
    }
    Ok(parts.join(", "))
}

fn weingarten_law() -> Outcome {
    let mut parts = Vec::new();
    for (d, seed) in [(2usize, 21), (3, 22), (7, 23)] {
        let r = mc_weingarten_stats(params(3, d), &McConfig::new(100_000, seed))
            .map_err(|e| e.to_string())?;
        let off = r
            .off_diagonal
            .as_ref()
            .ok_or("missing off-diagonal report")?;
        ensure(r.diagonal.within(3.0), || {
            format!("d={d} diag z {:.2}", r.diagonal.z_score)
        })?;
        ensure(off.within(3.0), || {
            format!("d={d} off z {:.2}", off.z_score)
        })?;
        ensure(r.p_directions_zero, || {
            format!("d={d}: P direction with nonzero L")
        })?;
        parts.push(format!(
            "d={d} z=({:+.2},{:+.2})",
            r.diagonal.z_score, off.z_score
        ));
    }
    Ok(parts.join(", "))
}

fn pullback_and_curvature() -> Outcome {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for (n, d) in [(1, 2), (2, 4), (3, 6)] {
        let p = params(n, d);
        let m = check_metric_pullback(p);
        let c = check_geodesic_curvature(p);
        let recip = c.reciprocal_rel_error.unwrap_or(f64::INFINITY);
        ensure(m.max_rel_error <= 1e-6, || {
            format!("({n},{d}) pullback {:.2e}", m.max_rel_error)
        })?;
        ensure(c.max_rel_error <= 1e-4, || {
            format!("({n},{d}) curvature {:.2e}", c.max_rel_error)
        })?;
        ensure(recip <= 1e-4, || {
            format!("({n},{d}) 1/curvature vs rho1 {recip:.2e}")
        })?;
        worst = (
            worst.0.max(m.max_rel_error),
            worst.1.max(c.max_rel_error),
            worst.2.max(recip),
        );
    }
    Ok(format!(
        "pullback {:.1e}, curvature {:.1e}, 1/curvature vs rho1 {:.1e}",
        worst.0, worst.1, worst.2
    ))
}

fn mc_exact_oracles() -> Outcome {
    let opts = SolverOptions::default();
    let mut parts = Vec::new();
    let cases = [(1, 3, 0.3, 91u64), (2, 2, 0.2, 92), (2, 2, 0.4, 93)];
    for (n, d, delta, seed) in cases {
        let run = mc_probability(
            params(n, d),
            delta,
            &McConfig::new(100_000, seed),
            &opts,
            false,
        )
        .map_err(|e| e.to_string())?;
        let r = &run.report;
        if n == 2 {
            let closed = prob_sym3_matrices(delta).map_err(|e| e.to_string())?;
            ensure((r.reference - closed).abs() <= 1e-10, || {
                "reference mismatch".into()
            })?;
        }
        ensure(run.oracle == OracleKind::Exact, || "oracle kind".into())?;
        ensure(r.within(3.0), || {
            format!(
                "({n},{d},{delta}): {} vs {} (z {:.2})",
                r.estimate, r.reference, r.z_score
            )
        })?;
        parts.push(format!("({n},{d},{delta}) z={:+.2}", r.z_score));
    }
    Ok(parts.join(", "))
}

fn mc_heuristic_oracle() -> Outcome {
    let run = mc_probability(
        params(2, 3),
        0.25,
        &McConfig::new(20_000, 101),
        &SolverOptions::default(),
        false,
    )
    .map_err(|e| e.to_string())?;
    let r = &run.report;
    ensure(run.oracle == OracleKind::HeuristicOracle, || {
        "not flagged heuristic-oracle".into()
    })?;
    ensure(r.within(4.0), || {
        format!("{} vs {} (z {:.2})", r.estimate, r.reference, r.z_score)
    })?;
    Ok(format!(
        "estimate {:.3e} vs {:.3e}, z={:+.2}, heuristic-oracle, {} unconverged",
        r.estimate, r.reference, r.z_score, run.nonconverged
    ))
}

fn solver_oracles() -> Outcome {
    let forced = SolverOptions::default().with_method(SolverMethod::Multistart);
    let mut worst_eig = 0.0f64;
    for i in 0..1000u64 {
        let n = 1 + (i % 4) as usize;
        let seed = SeedSpec::new(1111, i);
        let p = sample_kostlan(params(n, 2), seed);
        let r = best_rank_one(&p, &forced.with_seed(seed)).map_err(|e| e.to_string())?;
        let q = poly_to_sym_matrix(&p).map_err(|e| e.to_string())?;
        let err = (r.distance - eckart_young_distance(&q)).abs();
        ensure(err <= 1e-8, || format!("d=2 sample {i}: error {err:.2e}"))?;
        worst_eig = worst_eig.max(err);
    }
    let mut worst_grid = 0.0f64;
    for i in 0..500u64 {
        let d = 3 + (i % 6) as usize;
        let seed = SeedSpec::new(2222, i);
        let p = sample_kostlan(params(1, d), seed);
        let grid = best_rank_one(&p, &SolverOptions::default().with_seed(seed))
            .map_err(|e| e.to_string())?;
        let ms = best_rank_one(&p, &forced.with_seed(seed)).map_err(|e| e.to_string())?;
        let err = (grid.distance - ms.distance).abs();
        ensure(err <= 1e-6, || {
            format!("n=1 sample {i} (d={d}): error {err:.2e}")
        })?;
        worst_grid = worst_grid.max(err);
    }
    Ok(format!(
        "d=2 vs Eckart-Young {worst_eig:.1e}; n=1 multistart vs grid {worst_grid:.1e}"
    ))
}

fn entanglement_identities() -> Outcome {
    let opts = SolverOptions::default();
    let shapes = [(1, 3), (2, 2), (2, 3), (3, 3), (2, 4)];
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let (n, d) = shapes[i as usize % shapes.len()];
        let seed = SeedSpec::new(3333, i);
        let raw = sample_kostlan(params(n, d), seed);
        let p = raw.scaled(1.0 / raw.norm());
        let o = opts.with_seed(seed);
        let dist = best_rank_one(&p, &o).map_err(|e| e.to_string())?.distance;
        let eg = entanglement_geometric(&p, &o).map_err(|e| e.to_string())?;
        let el = entanglement_log(&p, &o).map_err(|e| e.to_string())?;
        let e1 = (eg - (1.0 - (1.0 - dist * dist).sqrt())).abs();
        let e2 = (el.value + (1.0 - dist * dist).log2()).abs();
        ensure(e1.max(e2) <= 1e-8, || {
            format!("sample {i}: errors {e1:.2e} {e2:.2e}")
        })?;
        worst = worst.max(e1).max(e2);
    }
    Ok(format!("100 tensors, max error {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("reach table", reach_table),
        ("J-integral closed form", j_closed_form),
        ("rational normal curves", rational_curves),
        ("3x3 symmetric matrices", sym3_matrices),
        ("curvature identity", curvature_identity),
        ("GOE determinant expectation", goe_determinant),
        ("Weingarten law", weingarten_law),
        ("metric pullback and curvature", pullback_and_curvature),
        ("Monte Carlo, exact oracles", mc_exact_oracles),
        ("Monte Carlo, heuristic oracle", mc_heuristic_oracle),
        ("solver oracle equivalence", solver_oracles),
        ("entanglement identities", entanglement_identities),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2}  {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
