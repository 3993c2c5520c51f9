//! Best rank-one approximation of a symmetric tensor.
//!
//! For `p` in Bombieri–Weyl coordinates, the closest point of the rank-one
//! cone is `v·x*^{⊗d}`, where `x*` maximizes `|p(x)|` on the unit sphere and
//! `v = p(x*)`; the distance is `√(‖p‖² − v²)`. Three strategies:
//!
//! * `d = 2`: exact, from the spectrum of the associated symmetric matrix;
//! * `n = 1`: dense angular grid on `[0, π)` plus Newton polish;
//! * otherwise: multistart Riemannian gradient ascent with backtracking,
//!   finished by Riemannian Newton steps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ensembles::{SeedSpec, SUBSTREAM_SOLVER};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::numeric::{dot, norm};
use crate::tensor_space::{poly_to_sym_matrix, BwPolynomial};

/// Relative tangential-gradient norm (scaled by `d·‖p‖`) that counts as stationary.
const STATIONARY_TOL: f64 = 1e-10;
/// Gradient ascent hands over to Newton below this relative gradient norm.
const ASCENT_HANDOFF: f64 = 1e-5;
const NEWTON_ITERS: usize = 30;
/// Number of grid maxima polished on the `n = 1` path.
const GRID_CANDIDATES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    /// Eigen for `d = 2`, grid for `n = 1`, multistart otherwise.
    Auto,
    Eigen,
    Grid,
    Multistart,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub method: SolverMethod,
    /// `None` means `8·(n + 1)`.
    pub restarts: Option<usize>,
    pub max_iters: usize,
    pub step_tol: f64,
    pub grid_points: usize,
    pub seed: SeedSpec,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolverMethod::Auto,
            restarts: None,
            max_iters: 500,
            step_tol: 1e-12,
            grid_points: 4096,
            seed: SeedSpec::new(0, 0),
        }
    }
}

impl SolverOptions {
    pub fn with_seed(self, seed: SeedSpec) -> Self {
        Self { seed, ..self }
    }

    pub fn with_method(self, method: SolverMethod) -> Self {
        Self { method, ..self }
    }

    pub fn restarts_for(&self, n: usize) -> usize {
        self.restarts.unwrap_or(8 * (n + 1))
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == Some(0) {
            return Err(Error::out_of_range("restarts", 0.0, ">= 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::out_of_range("max_iters", 0.0, ">= 1"));
        }
        if self.step_tol.is_nan() || self.step_tol <= 0.0 {
            return Err(Error::out_of_range("step_tol", self.step_tol, "> 0"));
        }
        if self.grid_points < 3 {
            return Err(Error::out_of_range(
                "grid_points",
                self.grid_points as f64,
                ">= 3",
            ));
        }
        Ok(())
    }

    fn resolve(&self, n: usize, d: usize) -> Result<SolverMethod> {
        match self.method {
            SolverMethod::Auto if d == 2 => Ok(SolverMethod::Eigen),
            SolverMethod::Auto if n == 1 => Ok(SolverMethod::Grid),
            SolverMethod::Auto => Ok(SolverMethod::Multistart),
            SolverMethod::Eigen if d != 2 => Err(Error::NotQuadratic(d)),
            SolverMethod::Grid if n != 1 => Err(Error::Invalid(format!(
                "grid method needs binary forms, got n = {n}"
            ))),
            m => Ok(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneResult {
    pub x_star: Vec<f64>,
    /// `p(x*)`, signed.
    pub value: f64,
    pub abs_value: f64,
    pub distance: f64,
    pub converged: bool,
    pub restarts_used: usize,
    pub method: SolverMethod,
}

impl RankOneResult {
    /// The approximation `value·x*^{⊗d}`.
    pub fn approximation(&self, params: crate::tensor_space::SpaceParams) -> Result<BwPolynomial> {
        Ok(crate::tensor_space::veronese(params, &self.x_star)?.scaled(self.value))
    }
}

pub fn best_rank_one(p: &BwPolynomial, opts: &SolverOptions) -> Result<RankOneResult> {
    opts.validate()?;
    let norm_p = p.norm();
    if norm_p == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    let params = p.params();
    let method = opts.resolve(params.n(), params.d())?;
    let mut res = match method {
        SolverMethod::Eigen => eigen_path(p)?,
        SolverMethod::Grid => grid_path(p, opts),
        SolverMethod::Multistart => multistart_path(p, opts),
        SolverMethod::Auto => unreachable!("resolved above"),
    };
    res.method = method;
    if method != SolverMethod::Eigen {
        res.distance = (norm_p * norm_p - res.value * res.value).max(0.0).sqrt();
    }
    Ok(res)
}

fn eigen_path(p: &BwPolynomial) -> Result<RankOneResult> {
    let q = poly_to_sym_matrix(p)?;
    let eig = q.jacobi_eigen();
    let top = (0..eig.values.len())
        .max_by(|&a, &b| eig.values[a].abs().total_cmp(&eig.values[b].abs()))
        .expect("n >= 1");
    let rest: f64 = eig
        .values
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != top)
        .map(|(_, l)| l * l)
        .sum();
    let value = eig.values[top];
    Ok(RankOneResult {
        x_star: eig.vectors[top].clone(),
        value,
        abs_value: value.abs(),
        distance: rest.sqrt(),
        converged: eig.converged,
        restarts_used: 0,
        method: SolverMethod::Eigen,
    })
}

/// Frobenius distance from a symmetric matrix to the rank-one locus:
/// all singular values but the largest, in quadrature.
pub fn eckart_young_distance(q: &SymMatrix) -> f64 {
    let eig = q.jacobi_eigen();
    let mut sq: Vec<f64> = eig.values.iter().map(|l| l * l).collect();
    sq.sort_by(f64::total_cmp);
    sq.pop();
    sq.iter().sum::<f64>().sqrt()
}

/// Weighted coefficients of a binary form: `p(c, s) = Σ_k w[k] c^{d−k} s^k`.
fn binary_weights(p: &BwPolynomial) -> Vec<f64> {
    p.coeffs()
        .iter()
        .zip(p.space().sqrt_multinomial())
        .map(|(a, s)| a * s)
        .collect()
}

fn eval_binary(w: &[f64], c: f64, s: f64) -> f64 {
    let d = w.len() - 1;
    let mut acc = w[d];
    let mut cpow = 1.0;
    for i in 1..=d {
        cpow *= c;
        acc = acc * s + w[d - i] * cpow;
    }
    acc
}

thread_local! {
    static ANGLE_TABLE: std::cell::RefCell<(usize, std::rc::Rc<Vec<(f64, f64)>>)> =
        std::cell::RefCell::new((0, std::rc::Rc::new(Vec::new())));
}

/// `(cos θ_k, sin θ_k)` for `θ_k = kπ/points`, cached per thread.
fn angle_table(points: usize) -> std::rc::Rc<Vec<(f64, f64)>> {
    ANGLE_TABLE.with(|cell| {
        let mut slot = cell.borrow_mut();
        if slot.0 != points {
            let table = (0..points)
                .map(|k| {
                    let (s, c) = (k as f64 * PI / points as f64).sin_cos();
                    (c, s)
                })
                .collect();
            *slot = (points, std::rc::Rc::new(table));
        }
        slot.1.clone()
    })
}

fn grid_path(p: &BwPolynomial, opts: &SolverOptions) -> RankOneResult {
    let w = binary_weights(p);
    let table = angle_table(opts.grid_points);
    let vals: Vec<f64> = table
        .iter()
        .map(|&(c, s)| eval_binary(&w, c, s).abs())
        .collect();
    let g = vals.len();
    // |p(θ + π)| = |p(θ)|, so neighbours wrap around
    let mut peaks: Vec<usize> = (0..g)
        .filter(|&k| {
            let prev = vals[(k + g - 1) % g];
            let next = vals[(k + 1) % g];
            vals[k] >= prev && vals[k] > next
        })
        .collect();
    if peaks.is_empty() {
        peaks.push(0);
    }
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    peaks.truncate(GRID_CANDIDATES);

    let max_step = PI / g as f64;
    let mut best: Option<Candidate> = None;
    for &k in &peaks {
        let (c, s) = table[k];
        let cand = polish(p, vec![c, s], max_step, opts);
        best = Some(better(best, cand));
    }
    best.expect("at least one peak").into_result(p, peaks.len())
}

struct Candidate {
    x: Vec<f64>,
    value: f64,
    grad_norm: f64,
}

fn better(best: Option<Candidate>, cand: Candidate) -> Candidate {
    match best {
        Some(b) if b.value.abs() >= cand.value.abs() => b,
        _ => cand,
    }
}

impl Candidate {
    fn into_result(self, p: &BwPolynomial, restarts_used: usize) -> RankOneResult {
        let scale = p.params().d() as f64 * p.norm();
        RankOneResult {
            abs_value: self.value.abs(),
            value: self.value,
            x_star: self.x,
            distance: 0.0,
            converged: self.grad_norm <= STATIONARY_TOL * scale,
            restarts_used,
            method: SolverMethod::Auto,
        }
    }
}

fn normalized(mut x: Vec<f64>) -> Vec<f64> {
    let r = norm(&x);
    x.iter_mut().for_each(|v| *v /= r);
    x
}

/// Tangential part of the gradient of `sign·p` at the unit vector `x`.
fn riemannian_gradient(p: &BwPolynomial, x: &[f64], sign: f64) -> (f64, Vec<f64>) {
    let e: Vec<f64> = p.gradient(x).into_iter().map(|v| sign * v).collect();
    let radial = dot(x, &e);
    let g = e.iter().zip(x).map(|(ei, xi)| ei - radial * xi).collect();
    (radial, g)
}

/// Orthonormal basis of `x^⊥`, as rows.
fn tangent_frame(x: &[f64]) -> Vec<Vec<f64>> {
    let m = x.len();
    let skip = (0..m)
        .max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()))
        .expect("nonempty");
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
    for k in (0..m).filter(|&k| k != skip) {
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        // two Gram–Schmidt passes for orthogonality at rounding level
        for _ in 0..2 {
            let c = dot(&v, x);
            v.iter_mut().zip(x).for_each(|(vi, xi)| *vi -= c * xi);
            for u in &frame {
                let c = dot(&v, u);
                v.iter_mut().zip(u).for_each(|(vi, ui)| *vi -= c * ui);
            }
        }
        frame.push(normalized(v));
    }
    frame
}

/// Riemannian Newton iterations on `sign·p`, each step clamped to `max_step`
/// and accepted only if it does not lose ground.
fn polish(p: &BwPolynomial, x0: Vec<f64>, max_step: f64, opts: &SolverOptions) -> Candidate {
    let mut x = normalized(x0);
    let v0 = p.evaluate(&x);
    let sign = if v0 < 0.0 { -1.0 } else { 1.0 };
    let mut value = sign * v0;
    let (mut radial, mut grad) = riemannian_gradient(p, &x, sign);
    let target = 1e-2 * STATIONARY_TOL * p.params().d() as f64 * p.norm();
    for _ in 0..NEWTON_ITERS {
        if norm(&grad) <= target {
            break;
        }
        let frame = tangent_frame(&x);
        let h = p.hessian(&x).scaled(sign);
        let k = frame.len();
        let mut hr = SymMatrix::zeros(k);
        for a in 0..k {
            let hu = h.mul_vec(&frame[a]);
            for b in a..k {
                let mut v = dot(&frame[b], &hu);
                if a == b {
                    v -= radial;
                }
                hr.set(a, b, v);
            }
        }
        let gr: Vec<f64> = frame.iter().map(|u| dot(u, &grad)).collect();
        let eig = hr.jacobi_eigen();
        if eig.values.iter().any(|&l| l >= 0.0) {
            break;
        }
        let mut step = vec![0.0; k];
        for (l, u) in eig.values.iter().zip(&eig.vectors) {
            let c = -dot(u, &gr) / l;
            step.iter_mut().zip(u).for_each(|(s, ui)| *s += c * ui);
        }
        let len = norm(&step);
        if len > max_step {
            step.iter_mut().for_each(|s| *s *= max_step / len);
        }
        let mut xn = x.clone();
        for (c, u) in step.iter().zip(&frame) {
            xn.iter_mut().zip(u).for_each(|(xi, ui)| *xi += c * ui);
        }
        let xn = normalized(xn);
        let vn = sign * p.evaluate(&xn);
        let (rn, gn) = riemannian_gradient(p, &xn, sign);
        if vn < value - 1e-14 * p.norm() || (vn <= value && norm(&gn) >= norm(&grad)) {
            break;
        }
        let moved = len.min(max_step);
        x = xn;
        value = vn;
        radial = rn;
        grad = gn;
        if moved <= opts.step_tol {
            break;
        }
    }
    Candidate {
        grad_norm: norm(&grad),
        value: sign * value,
        x,
    }
}

/// Projected gradient ascent on `sign·p` with Barzilai–Borwein initial
/// steps and Armijo backtracking, followed by [`polish`].
fn ascend(p: &BwPolynomial, x0: Vec<f64>, opts: &SolverOptions) -> Candidate {
    let d = p.params().d() as f64;
    let norm_p = p.norm();
    let mut x = normalized(x0);
    let v0 = p.evaluate(&x);
    let sign = if v0 < 0.0 { -1.0 } else { 1.0 };
    let mut value = sign * v0;
    let (_, mut grad) = riemannian_gradient(p, &x, sign);
    let mut alpha = 1.0 / (d * norm_p);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for _ in 0..opts.max_iters {
        let gnorm2 = dot(&grad, &grad);
        if gnorm2.sqrt() <= ASCENT_HANDOFF * d * norm_p {
            break;
        }
        if let Some((xp, gp)) = &prev {
            let s: Vec<f64> = x.iter().zip(xp).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = grad.iter().zip(gp).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y).abs();
            if sy > 0.0 {
                alpha = dot(&s, &s) / sy;
            }
        }
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(xi, gi)| xi + alpha * gi)
                .collect();
            let xn = normalized(xn);
            let vn = sign * p.evaluate(&xn);
            if vn >= value + 1e-4 * alpha * gnorm2 {
                accepted = Some((xn, vn));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, vn)) = accepted else { break };
        let moved = norm(&x.iter().zip(&xn).map(|(a, b)| a - b).collect::<Vec<_>>());
        let (_, gn) = riemannian_gradient(p, &xn, sign);
        prev = Some((
            std::mem::replace(&mut x, xn),
            std::mem::replace(&mut grad, gn),
        ));
        value = vn;
        if moved <= opts.step_tol {
            break;
        }
    }
    polish(p, x, 0.5, opts)
}

fn multistart_path(p: &BwPolynomial, opts: &SolverOptions) -> RankOneResult {
    let m = p.params().n() + 1;
    let restarts = opts.restarts_for(m - 1);
    let mut g = opts.seed.normals(SUBSTREAM_SOLVER);
    let mut best: Option<Candidate> = None;
    for _ in 0..restarts {
        let x0 = g.unit_vector(m);
        best = Some(better(best, ascend(p, x0, opts)));
    }
    best.expect("restarts >= 1").into_result(p, restarts)
}

/// `E_G = 1 − max_x |p(x)|` for `p` scaled to unit norm.
pub fn entanglement_geometric(p: &BwPolynomial, opts: &SolverOptions) -> Result<f64> {
    let unit = normalize_state(p)?;
    Ok(1.0 - best_rank_one(&unit, opts)?.abs_value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementLog {
    /// `−log₂ max_x |p(x)|²`; `+∞` when the maximum vanishes.
    pub value: f64,
    pub infinite: bool,
}

pub fn entanglement_log(p: &BwPolynomial, opts: &SolverOptions) -> Result<EntanglementLog> {
    let unit = normalize_state(p)?;
    let v = best_rank_one(&unit, opts)?.abs_value;
    if v == 0.0 {
        return Ok(EntanglementLog {
            value: f64::INFINITY,
            infinite: true,
        });
    }
    Ok(EntanglementLog {
        value: -(v * v).log2(),
        infinite: false,
    })
}

fn normalize_state(p: &BwPolynomial) -> Result<BwPolynomial> {
    let r = p.norm();
    if r == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    Ok(p.scaled(1.0 / r))
}
