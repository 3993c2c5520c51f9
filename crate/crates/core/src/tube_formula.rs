//! Closed forms for the spherical Veronese variety `V_{n,d} ⊂ S^N`: reach,
//! volume, curvature coefficients, tube volumes and the probability that a
//! Bombieri–Weyl random tensor lies within relative distance `δ` of rank one.
//!
//! Everything Γ-heavy is evaluated in log space with the sign kept apart;
//! `N` grows like `n^d` and the coefficients overflow `f64` quickly otherwise.
//! Values past the reach are still returned, flagged with `valid_range = false`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{binomial, ln_gamma, ln_sphere_volume, sphere_volume};
use crate::quadrature::{integrate, Tolerance};
use crate::tensor_space::SpaceParams;

/// Above this `tan ε` the J-integral switches to its `sin/cos` form.
const TAN_SWITCH: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReachResult {
    /// Focal radius `1/√2·√(1 + 1/(d−1))`.
    pub rho1: f64,
    /// Half the shortest doubly-normal geodesic, always `π/4`.
    pub rho2: f64,
    pub rho: f64,
}

/// A formula value together with whether its argument lies below the reach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub value: f64,
    pub valid_range: bool,
}

pub fn reach(params: SpaceParams) -> ReachResult {
    reach_for_degree(params.d())
}

fn reach_for_degree(d: usize) -> ReachResult {
    let d = d as f64;
    let rho1 = std::f64::consts::FRAC_1_SQRT_2 * (1.0 + 1.0 / (d - 1.0)).sqrt();
    let rho2 = FRAC_PI_4;
    ReachResult {
        rho1,
        rho2,
        rho: rho1.min(rho2),
    }
}

/// `Vol(V_{n,d}) = d^{n/2}·Vol(S^n)`.
pub fn veronese_volume(params: SpaceParams) -> f64 {
    let n = params.n();
    (0.5 * n as f64 * (params.d() as f64).ln()).exp() * sphere_volume(n)
}

/// Euclidean counterpart `J_k(ε) = ε^k`.
pub fn j_euclidean(k: usize, eps: f64) -> f64 {
    eps.powi(k as i32)
}

/// `J_{N,k}(ε) = ∫₀^{tan ε} t^{k−1} (1+t²)^{−(N+1)/2} dt = ∫₀^ε sin^{k−1}ρ cos^{N−k}ρ dρ`.
pub fn j_integral(big_n: usize, k: usize, eps: f64) -> Result<f64> {
    if !(0.0..FRAC_PI_2).contains(&eps) {
        return Err(Error::out_of_range("eps", eps, "[0, pi/2)"));
    }
    Ok(ln_j_integral(big_n, k, eps)?.exp())
}

/// `ln J_{N,k}(ε)`, accepting the closed endpoint `ε = π/2`.
pub(crate) fn ln_j_integral(big_n: usize, k: usize, eps: f64) -> Result<f64> {
    if k < 1 || k > big_n {
        return Err(Error::Invalid(format!(
            "J-integral index k = {k} outside [1, N = {big_n}]"
        )));
    }
    if !(0.0..=FRAC_PI_2).contains(&eps) {
        return Err(Error::out_of_range("eps", eps, "[0, pi/2]"));
    }
    if eps == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let km1 = (k - 1) as f64;
    let tan_eps = eps.tan();
    if eps < FRAC_PI_2 && tan_eps <= TAN_SWITCH {
        let half_np1 = 0.5 * (big_n as f64 + 1.0);
        let log_f = move |t: f64| {
            let a = if k == 1 { 0.0 } else { km1 * t.ln() };
            a - half_np1 * (t * t).ln_1p()
        };
        let peak = (km1 / (big_n as f64 + 1.0 - km1)).sqrt();
        ln_integrate_peaked(log_f, tan_eps, peak)
    } else {
        let nmk = (big_n - k) as f64;
        let log_f = move |r: f64| {
            let a = if k == 1 { 0.0 } else { km1 * r.sin().ln() };
            let b = if big_n == k { 0.0 } else { nmk * r.cos().ln() };
            a + b
        };
        let peak = if big_n == k {
            FRAC_PI_2
        } else {
            (km1 / nmk).sqrt().atan()
        };
        ln_integrate_peaked(log_f, eps, peak)
    }
}

/// `ln ∫₀^upper exp(log_f)` for a unimodal integrand peaking at `peak`.
fn ln_integrate_peaked<F: Fn(f64) -> f64>(log_f: F, upper: f64, peak: f64) -> Result<f64> {
    let at = peak.min(upper);
    let shift = if at > 0.0 {
        log_f(at)
    } else {
        log_f(upper.min(f64::EPSILON))
    };
    let shift = if shift.is_finite() { shift } else { 0.0 };
    let f = |t: f64| (log_f(t) - shift).exp();
    let tol = Tolerance::default();
    let value = if at > 0.0 && at < upper {
        integrate(f, 0.0, at, tol)?.value + integrate(f, at, upper, tol)?.value
    } else {
        integrate(f, 0.0, upper, tol)?.value
    };
    Ok(shift + value.ln())
}

/// `ln |K_{N−n+j}|` and its sign, or `None` when the coefficient vanishes.
pub fn ln_curvature_coefficient(params: SpaceParams, j: usize) -> Option<(f64, f64)> {
    let n = params.n();
    if j % 2 == 1 || j > n {
        return None;
    }
    let (nf, jf, df) = (n as f64, j as f64, params.d() as f64);
    let big_n = params.sphere_dim() as f64;
    let ln_abs = 0.5 * nf * df.ln()
        + 0.5 * jf * ((df - 1.0) / df).ln()
        + (nf + 2.0 - jf) * LN_2
        + 0.5 * big_n * PI.ln()
        + ln_gamma(0.5 * nf + 1.0)
        - ln_gamma(0.5 * jf + 1.0)
        - ln_gamma(nf + 1.0 - jf)
        - ln_gamma(0.5 * (big_n + jf - nf));
    let sign = if (j / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((sign, ln_abs))
}

/// Curvature coefficient `K_{N−n+j}(V_{n,d})`; zero for odd `j` or `j > n`.
pub fn curvature_coefficient(params: SpaceParams, j: usize) -> f64 {
    ln_curvature_coefficient(params, j).map_or(0.0, |(s, l)| s * l.exp())
}

/// The nonzero coefficients `j ↦ K_{N−n+j}` for even `j ≤ n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTable {
    pub params: SpaceParams,
    pub entries: BTreeMap<usize, f64>,
}

impl CurvatureTable {
    pub fn get(&self, j: usize) -> f64 {
        self.entries.get(&j).copied().unwrap_or(0.0)
    }
}

pub fn curvature_table(params: SpaceParams) -> CurvatureTable {
    let entries = (0..=params.n())
        .step_by(2)
        .map(|j| (j, curvature_coefficient(params, j)))
        .collect();
    CurvatureTable { params, entries }
}

/// Sum `Σ_j K_{N−n+j} J_{N,N−n+j}(ε)`, shifted by `ln_scale` in log space.
fn weyl_sum(params: SpaceParams, eps: f64, ln_scale: f64) -> Result<f64> {
    if eps == 0.0 {
        return Ok(0.0);
    }
    let big_n = params.sphere_dim();
    let n = params.n();
    let mut total = 0.0;
    for j in (0..=n).step_by(2) {
        let (sign, ln_k) = ln_curvature_coefficient(params, j).expect("even j <= n");
        let ln_j = ln_j_integral(big_n, big_n - n + j, eps)?;
        total += sign * (ln_k + ln_j - ln_scale).exp();
    }
    Ok(total)
}

/// Volume of the `ε`-tube around `V_{n,d}` in `S^N`. Exact below the reach;
/// for `reach ≤ ε < π/2` the formula value is returned with `valid_range = false`.
pub fn tube_volume(params: SpaceParams, eps: f64) -> Result<Flagged> {
    if !(0.0..FRAC_PI_2).contains(&eps) {
        return Err(Error::out_of_range("eps", eps, "[0, pi/2)"));
    }
    Ok(Flagged {
        value: weyl_sum(params, eps, 0.0)?,
        valid_range: eps < reach(params).rho,
    })
}

/// `P(dist(p, rank one) ≤ δ‖p‖)` for `p` Bombieri–Weyl Gaussian, i.e. the
/// normalized volume of the `arcsin δ`-tube. The raw value is never clamped.
pub fn prob_close_rank_one(params: SpaceParams, delta: f64) -> Result<Flagged> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    let eps = delta.asin();
    Ok(Flagged {
        value: weyl_sum(params, eps, ln_sphere_volume(params.sphere_dim()))?,
        valid_range: eps < reach(params).rho,
    })
}

/// Rational normal curves (`n = 1`): `√d·δ^{d−1}`.
pub fn prob_rational_curve(d: usize, delta: f64) -> Result<Flagged> {
    if d < 2 {
        return Err(Error::InvalidParams { n: 1, d });
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    Ok(Flagged {
        value: (d as f64).sqrt() * delta.powi(d as i32 - 1),
        valid_range: delta.asin() <= reach_for_degree(d).rho,
    })
}

/// `3 × 3` symmetric matrices (`n = 2, d = 2`), valid for `δ ≤ 1/√2`.
pub fn prob_sym3_matrices(delta: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_1_SQRT_2).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1/sqrt(2)]"));
    }
    let c = (1.0 - delta * delta).sqrt();
    Ok((2.0 * delta * c * (-3.0 + 14.0 * delta * delta) + 6.0 * (delta / c).atan()) / (3.0 * PI))
}

/// Normalized volume of the tube whose radius is the reach: a lower bound
/// on the probability of a unique best rank-one approximation.
pub fn unique_approx_lower_bound(params: SpaceParams) -> f64 {
    weyl_sum(
        params,
        reach(params).rho,
        ln_sphere_volume(params.sphere_dim()),
    )
    .expect("reach lies inside (0, pi/2)")
}

/// `E[det(I − λQ)] = Σ_j coeffs[j] λ^j` for `Q ~ GOE(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetExpansionPoly {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

impl DetExpansionPoly {
    pub fn evaluate(&self, lambda: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * lambda + c)
    }
}

/// `c_{2k} = (−1)^k (2k)!/(2^{2k} k!)·C(n, 2k)`, odd coefficients zero.
pub fn goe_det_expectation(n: usize) -> Result<DetExpansionPoly> {
    if n < 1 {
        return Err(Error::out_of_range("n", n as f64, "n >= 1"));
    }
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    let mut c = 1.0;
    let mut k = 0;
    while 2 * k + 2 <= n {
        // ratio c_{2k+2}/c_{2k} = −(n−2k)(n−2k−1)/(4(k+1))
        c *= -(((n - 2 * k) * (n - 2 * k - 1)) as f64) / (4 * (k + 1)) as f64;
        k += 1;
        coeffs[2 * k] = c;
    }
    Ok(DetExpansionPoly { n, coeffs })
}

/// `E[g_j(Q)]` for `Q ~ GOE(n)`, with `det(I − λQ) = Σ (−1)^j λ^j g_j(Q)`.
pub fn expected_gj(n: usize, j: usize) -> Result<f64> {
    if j > n {
        return Err(Error::Invalid(format!("j = {j} exceeds n = {n}")));
    }
    if j % 2 == 1 {
        return Ok(0.0);
    }
    let half = j / 2;
    let falling: f64 = ((half + 1)..=j).map(|i| i as f64).product();
    let sign = if half.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * falling / 2f64.powi(j as i32) * binomial(n, j))
}

/// `∫₀^∞ ρ^{n(n+1)/2 + j − 1} e^{−ρ²/2} dρ = 2^{n(n+1)/4 + j/2 − 1} Γ((n² + n + 2j)/4)`.
pub fn gaussian_radial_moment(n: usize, j: usize) -> f64 {
    let a = (n * n + n + 2 * j) as f64 / 4.0;
    ((a - 1.0) * LN_2 + ln_gamma(a)).exp()
}

/// `∫_{D^m} (1 − |z|²)^{n(n+1)/4 − 1 + j/2} dz` over the unit disk of the
/// `P` block, `m = N − n − n(n+1)/2`; equals 1 when `P` is trivial.
pub fn normal_disk_integral(params: SpaceParams, j: usize) -> f64 {
    let n = params.n();
    let big_n = params.sphere_dim();
    let a = (n * n + n + 2 * j) as f64 / 4.0;
    let expo = (2 * big_n) as f64 - (n * n + 3 * n) as f64;
    (0.25 * expo * PI.ln() + ln_gamma(a) - ln_gamma(0.5 * (big_n - n + j) as f64)).exp()
}
