//! Monte-Carlo and finite-difference checks of the closed forms.
//!
//! Sample `i` of a run with master seed `s` uses `SeedSpec::new(s, i)`, so a
//! run is a pure function of `(s, n_samples)`. Samples are evaluated in
//! parallel, collected in order and reduced sequentially with compensated
//! summation; results do not depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_goe, sample_kostlan, sample_normal_w, SeedSpec};
use crate::error::{Error, Result};
use crate::geometry::{geodesic_curvature_norm, normal_split, pullback_factor, weingarten};
use crate::numeric::{dot, norm, CompensatedSum};
use crate::solver::{best_rank_one, SolverOptions};
use crate::tensor_space::{veronese, BwPolynomial, SpaceParams};
use crate::tube_formula::{goe_det_expectation, prob_close_rank_one, reach};

/// Two-sided normal quantile used for reported intervals.
pub const REPORT_Z: f64 = 1.96;
/// Seed of the random directions in the finite-difference checks.
const FD_SEED: u64 = 0x5eed;
const FD_TRIALS: usize = 100;
const FIRST_DIFF_STEP: f64 = 1e-5;
const SECOND_DIFF_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
}

impl McConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            workers: 0,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }

    fn map_samples<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(SeedSpec) -> T + Sync + Send,
    {
        if self.n_samples == 0 {
            return Err(Error::out_of_range("n_samples", 0.0, ">= 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
        let seed = self.seed;
        Ok(pool.install(|| {
            (0..self.n_samples as u64)
                .into_par_iter()
                .map(|i| f(SeedSpec::new(seed, i)))
                .collect()
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    /// The per-sample distance is computed exactly (eigen or grid path).
    Exact,
    /// Multistart search; a sample may be misclassified if it misses the global maximum.
    HeuristicOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub estimate: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Normal quantile of `[ci_low, ci_high]`.
    pub z: f64,
    pub n_samples: usize,
    pub seed: SeedSpec,
    pub reference: f64,
    pub z_score: f64,
}

impl McReport {
    fn new(estimate: f64, stderr: f64, n_samples: usize, seed: u64, reference: f64) -> Self {
        let z_score = if estimate == reference {
            0.0
        } else {
            (estimate - reference) / stderr
        };
        Self {
            estimate,
            stderr,
            ci_low: estimate - REPORT_Z * stderr,
            ci_high: estimate + REPORT_Z * stderr,
            z: REPORT_Z,
            n_samples,
            seed: SeedSpec::new(seed, 0),
            reference,
            z_score,
        }
    }

    /// Whether the reference lies within `k` standard errors.
    pub fn within(&self, k: f64) -> bool {
        self.z_score.abs() <= k
    }
}

/// Sample mean with the standard error of the mean.
fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().copied().collect::<CompensatedSum>().value() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .collect::<CompensatedSum>()
        .value();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: u64,
    pub distance: f64,
    /// `distance / ‖p‖`.
    pub relative_distance: f64,
    pub indicator: bool,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRun {
    pub params: SpaceParams,
    pub delta: f64,
    pub report: McReport,
    pub oracle: OracleKind,
    /// Samples whose solver run did not meet its stationarity test.
    pub nonconverged: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<SampleRecord>>,
}

/// Fraction of Kostlan samples within relative distance `δ` of rank one,
/// against the closed-form probability. Only radii below the reach are
/// accepted, where the closed form is exact.
pub fn mc_probability(
    params: SpaceParams,
    delta: f64,
    cfg: &McConfig,
    opts: &SolverOptions,
    keep_records: bool,
) -> Result<ProbabilityRun> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    if delta.asin() >= reach(params).rho {
        return Err(Error::out_of_range("delta", delta, "arcsin(delta) < reach"));
    }
    let reference = prob_close_rank_one(params, delta)?.value;
    let records = cfg.map_samples(|seed| -> Result<SampleRecord> {
        let p = sample_kostlan(params, seed);
        let r = best_rank_one(&p, &opts.with_seed(seed))?;
        let norm_p = p.norm();
        Ok(SampleRecord {
            index: seed.stream_index,
            distance: r.distance,
            relative_distance: r.distance / norm_p,
            indicator: r.distance < delta * norm_p,
            converged: r.converged,
        })
    })?;
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;

    let n = records.len() as f64;
    let hits = records.iter().filter(|r| r.indicator).count() as f64;
    let estimate = hits / n;
    let mut stderr = (estimate * (1.0 - estimate) / n).sqrt();
    if stderr == 0.0 && estimate != reference {
        // all-or-nothing outcome: fall back to the reference binomial width
        stderr = (reference * (1.0 - reference) / n).max(0.0).sqrt();
    }
    let oracle = if params.n() >= 2 && params.d() >= 3 {
        OracleKind::HeuristicOracle
    } else {
        OracleKind::Exact
    };
    Ok(ProbabilityRun {
        params,
        delta,
        report: McReport::new(estimate, stderr, records.len(), cfg.seed, reference),
        oracle,
        nonconverged: records.iter().filter(|r| !r.converged).count(),
        records: keep_records.then_some(records),
    })
}

/// Sample mean of `det(I − λQ)` over `Q ~ GOE(n)`.
pub fn mc_goe_det(n: usize, lambda: f64, cfg: &McConfig) -> Result<McReport> {
    let reference = goe_det_expectation(n)?.evaluate(lambda);
    let values =
        cfg.map_samples(|seed| sample_goe(n, seed).map(|q| q.entries.det_identity_minus(lambda)))?;
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    let (mean, stderr) = mean_and_stderr(&values);
    Ok(McReport::new(
        mean,
        stderr,
        values.len(),
        cfg.seed,
        reference,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeingartenReport {
    pub params: SpaceParams,
    /// Mean of `L_ii²` over samples and diagonal positions, against `2(d−1)/d`.
    pub diagonal: McReport,
    /// Mean of `L_ij²` over samples and pairs `i < j`, against `(d−1)/d`; absent for `n = 1`.
    pub off_diagonal: Option<McReport>,
    /// Per-position second moments, row-major upper triangle.
    pub entry_moments: Vec<Vec<f64>>,
    /// Every basis direction of `P` yields the zero matrix.
    pub p_directions_zero: bool,
}

/// Entry variances of the Weingarten matrix of a standard Gaussian `η ∈ W`.
/// The entries have mean zero, so the second moment estimates the variance.
pub fn mc_weingarten_stats(params: SpaceParams, cfg: &McConfig) -> Result<WeingartenReport> {
    let n = params.n();
    let d = params.d() as f64;
    let mats = cfg.map_samples(|seed| weingarten(params, &sample_normal_w(params, seed)))?;
    let mats = mats.into_iter().collect::<Result<Vec<_>>>()?;

    let diag_stat: Vec<f64> = mats
        .iter()
        .map(|m| (0..n).map(|i| m.entries.get(i, i).powi(2)).sum::<f64>() / n as f64)
        .collect();
    let (mean, se) = mean_and_stderr(&diag_stat);
    let diagonal = McReport::new(mean, se, mats.len(), cfg.seed, 2.0 * (d - 1.0) / d);

    let off_diagonal = (n >= 2).then(|| {
        let pairs = (n * (n - 1) / 2) as f64;
        let stat: Vec<f64> = mats
            .iter()
            .map(|m| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in i + 1..n {
                        s += m.entries.get(i, j).powi(2);
                    }
                }
                s / pairs
            })
            .collect();
        let (mean, se) = mean_and_stderr(&stat);
        McReport::new(mean, se, mats.len(), cfg.seed, (d - 1.0) / d)
    });

    let entry_moments = (0..n)
        .map(|i| {
            (i..n)
                .map(|j| {
                    mats.iter()
                        .map(|m| m.entries.get(i, j).powi(2))
                        .collect::<CompensatedSum>()
                        .value()
                        / mats.len() as f64
                })
                .collect()
        })
        .collect();

    let split = normal_split(params);
    let mut p_directions_zero = true;
    for &k in &split.p_idx {
        let l = weingarten(params, &BwPolynomial::basis(params, k))?;
        p_directions_zero &= l.entries.rows().iter().flatten().all(|&v| v == 0.0);
    }

    Ok(WeingartenReport {
        params,
        diagonal,
        off_diagonal,
        entry_moments,
        p_directions_zero,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDifferenceReport {
    pub params: SpaceParams,
    pub reference: f64,
    pub trials: usize,
    pub step: f64,
    pub min_estimate: f64,
    pub max_estimate: f64,
    pub max_rel_error: f64,
    /// Error at a coarse step divided by the error at half that step; about 4
    /// for a second-order scheme.
    pub halving_ratio: f64,
    /// `|1/estimate − ρ₁|/ρ₁`, worst case; curvature checks only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reciprocal_rel_error: Option<f64>,
}

fn orthonormal_pair(params: SpaceParams, seed: SeedSpec) -> (Vec<f64>, Vec<f64>) {
    let m = params.n() + 1;
    let mut g = seed.normals(0);
    let a = g.unit_vector(m);
    loop {
        let mut b = g.vector(m);
        let c = dot(&a, &b);
        b.iter_mut().zip(&a).for_each(|(bi, ai)| *bi -= c * ai);
        let r = norm(&b);
        if r > 1e-8 {
            b.iter_mut().for_each(|bi| *bi /= r);
            return (a, b);
        }
    }
}

fn circle_point(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    let (s, c) = t.sin_cos();
    a.iter().zip(b).map(|(x, y)| c * x + s * y).collect()
}

fn vero(params: SpaceParams, x: &[f64]) -> Vec<f64> {
    veronese(params, x).expect("unit point").into_coeffs()
}

fn speed(params: SpaceParams, a: &[f64], b: &[f64], h: f64) -> f64 {
    let plus = vero(params, &circle_point(a, b, h));
    let minus = vero(params, &circle_point(a, b, -h));
    let diff: Vec<f64> = plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect();
    norm(&diff)
}

/// Sphere-tangential acceleration of `t ↦ V(cos(t/√d)a + sin(t/√d)b)` at `t = 0`.
fn acceleration(params: SpaceParams, a: &[f64], b: &[f64], h: f64) -> f64 {
    let rate = 1.0 / (params.d() as f64).sqrt();
    let p0 = vero(params, a);
    let plus = vero(params, &circle_point(a, b, h * rate));
    let minus = vero(params, &circle_point(a, b, -h * rate));
    let acc: Vec<f64> = (0..p0.len())
        .map(|k| (plus[k] - 2.0 * p0[k] + minus[k]) / (h * h))
        .collect();
    let radial = dot(&acc, &p0);
    let tangential: Vec<f64> = acc.iter().zip(&p0).map(|(x, y)| x - radial * y).collect();
    norm(&tangential)
}

fn summarize<F: Fn(&[f64], &[f64], f64) -> f64>(
    params: SpaceParams,
    reference: f64,
    step: f64,
    coarse: f64,
    pair: impl Fn(u64) -> (Vec<f64>, Vec<f64>),
    estimate: F,
) -> FiniteDifferenceReport {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    for k in 0..FD_TRIALS as u64 {
        let (a, b) = pair(k);
        let e = estimate(&a, &b, step);
        lo = lo.min(e);
        hi = hi.max(e);
        worst = worst.max((e - reference).abs() / reference);
    }
    let (a, b) = pair(0);
    let err = |h: f64| (estimate(&a, &b, h) - reference).abs();
    FiniteDifferenceReport {
        params,
        reference,
        trials: FD_TRIALS,
        step,
        min_estimate: lo,
        max_estimate: hi,
        max_rel_error: worst,
        halving_ratio: err(coarse) / err(coarse / 2.0),
        reciprocal_rel_error: None,
    }
}

/// Central-difference speed of the Veronese image of unit great circles,
/// against `√d`.
pub fn check_metric_pullback(params: SpaceParams) -> FiniteDifferenceReport {
    summarize(
        params,
        pullback_factor(params),
        FIRST_DIFF_STEP,
        1e-2,
        |k| orthonormal_pair(params, SeedSpec::new(FD_SEED, k)),
        |a, b, h| speed(params, a, b, h),
    )
}

/// Second-difference curvature of arclength Veronese geodesics through the
/// base point `x₀^d`, in random tangent directions, against `√2·√((d−1)/d)`.
pub fn check_geodesic_curvature(params: SpaceParams) -> FiniteDifferenceReport {
    let m = params.n() + 1;
    let mut base = vec![0.0; m];
    base[0] = 1.0;
    let direction = |k: u64| {
        let mut g = SeedSpec::new(FD_SEED, k).normals(1);
        loop {
            let mut b = g.vector(m);
            b[0] = 0.0;
            let r = norm(&b);
            if r > 1e-8 {
                b.iter_mut().for_each(|x| *x /= r);
                return (base.clone(), b);
            }
        }
    };
    let mut report = summarize(
        params,
        geodesic_curvature_norm(params),
        SECOND_DIFF_STEP,
        1e-1,
        direction,
        |a, b, h| acceleration(params, a, b, h),
    );
    let rho1 = reach(params).rho1;
    let worst = [report.min_estimate, report.max_estimate]
        .iter()
        .map(|e| (1.0 / e - rho1).abs() / rho1)
        .fold(0.0, f64::max);
    report.reciprocal_rel_error = Some(worst);
    report
}
