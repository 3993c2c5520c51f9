//! Homogeneous polynomials of degree `d` in `n + 1` variables, stored in the
//! orthonormal Bombieri–Weyl basis `{ C(d,α)^{1/2} x^α }`.
//!
//! Through `p_T(x) = ⟨T, x^{⊗d}⟩_F` such a polynomial is the same thing as a
//! symmetric tensor of order `d` on `R^{n+1}`, and the Bombieri–Weyl norm of
//! the coordinates is the Frobenius norm of the tensor.
//!
//! Multi-indices are ordered lexicographically, descending in `α₀`, then
//! `α₁`, and so on: for `(n, d) = (1, 2)` the order is `(2,0), (1,1), (0,2)`.
//! Every file format in this crate uses this order.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::numeric::{ln_factorial_table, norm};

/// Tolerance on `‖a‖ − 1` accepted by [`veronese`].
pub const UNIT_TOL: f64 = 1e-12;

/// The pair `(n, d)`: degree-`d` forms on `R^{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SpaceParams {
    n: usize,
    d: usize,
}

impl SpaceParams {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n < 1 || d < 2 {
            return Err(Error::InvalidParams { n, d });
        }
        Ok(Self { n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Dimension `N` of the ambient unit sphere, `N = C(n+d, d) − 1`.
    pub fn sphere_dim(&self) -> usize {
        self.num_coeffs() - 1
    }

    /// Number of Bombieri–Weyl coordinates, `N + 1`.
    pub fn num_coeffs(&self) -> usize {
        crate::numeric::binomial(self.n + self.d, self.d) as usize
    }
}

impl fmt::Display for SpaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n = {}, d = {})", self.n, self.d)
    }
}

impl<'de> Deserialize<'de> for SpaceParams {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            d: usize,
        }
        let r = Raw::deserialize(de)?;
        SpaceParams::new(r.n, r.d).map_err(serde::de::Error::custom)
    }
}

/// Exponent vector `(α₀, …, α_n)` with `|α| = d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// All multi-indices of `params` in canonical order.
pub fn enumerate_multi_indices(params: SpaceParams) -> Vec<MultiIndex> {
    fn rec(pos: usize, remaining: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if pos + 1 == cur.len() {
            cur[pos] = remaining;
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for k in (0..=remaining).rev() {
            cur[pos] = k;
            rec(pos + 1, remaining - k, cur, out);
        }
    }
    let mut out = Vec::with_capacity(params.num_coeffs());
    let mut cur = vec![0; params.n + 1];
    rec(0, params.d, &mut cur, &mut out);
    out
}

/// Index tables for one `(n, d)`: multi-indices and `C(d,α)^{1/2}` weights.
#[derive(Debug)]
pub struct TensorSpace {
    params: SpaceParams,
    indices: Vec<MultiIndex>,
    sqrt_multinomial: Vec<f64>,
    position: HashMap<MultiIndex, usize>,
}

impl TensorSpace {
    fn build(params: SpaceParams) -> Self {
        let indices = enumerate_multi_indices(params);
        let lnf = ln_factorial_table(params.d);
        let sqrt_multinomial = indices
            .iter()
            .map(|a| {
                let ln_c = lnf[params.d] - a.0.iter().map(|&k| lnf[k]).sum::<f64>();
                (0.5 * ln_c).exp()
            })
            .collect();
        let position = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Self {
            params,
            indices,
            sqrt_multinomial,
            position,
        }
    }

    /// Shared tables for `params`; built once per process.
    pub fn get(params: SpaceParams) -> Arc<TensorSpace> {
        static CACHE: OnceLock<Mutex<HashMap<SpaceParams, Arc<TensorSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(params)
            .or_insert_with(|| Arc::new(TensorSpace::build(params)))
            .clone()
    }

    pub fn params(&self) -> SpaceParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn sqrt_multinomial(&self) -> &[f64] {
        &self.sqrt_multinomial
    }

    pub fn index_of(&self, alpha: &[usize]) -> Option<usize> {
        self.position.get(&MultiIndex(alpha.to_vec())).copied()
    }

    fn powers(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.iter()
            .map(|&xi| {
                let mut row = Vec::with_capacity(self.params.d + 1);
                let mut acc = 1.0;
                for _ in 0..=self.params.d {
                    row.push(acc);
                    acc *= xi;
                }
                row
            })
            .collect()
    }
}

/// A degree-`d` form, equivalently a symmetric tensor, in Bombieri–Weyl coordinates.
#[derive(Clone)]
pub struct BwPolynomial {
    space: Arc<TensorSpace>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for BwPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BwPolynomial")
            .field("params", &self.space.params)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for BwPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.params() == other.params() && self.coeffs == other.coeffs
    }
}

impl BwPolynomial {
    pub fn new(params: SpaceParams, coeffs: Vec<f64>) -> Result<Self> {
        let space = TensorSpace::get(params);
        if coeffs.len() != space.len() {
            return Err(Error::CoefficientLength {
                expected: space.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { space, coeffs })
    }

    pub fn zeros(params: SpaceParams) -> Self {
        let space = TensorSpace::get(params);
        let coeffs = vec![0.0; space.len()];
        Self { space, coeffs }
    }

    /// The `k`-th orthonormal basis polynomial.
    pub fn basis(params: SpaceParams, k: usize) -> Self {
        let mut p = Self::zeros(params);
        p.coeffs[k] = 1.0;
        p
    }

    pub fn params(&self) -> SpaceParams {
        self.space.params
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn coeff(&self, alpha: &[usize]) -> Option<f64> {
        self.space.index_of(alpha).map(|i| self.coeffs[i])
    }

    pub fn set_coeff(&mut self, alpha: &[usize], value: f64) -> Result<()> {
        let i = self.space.index_of(alpha).ok_or_else(|| {
            Error::Invalid(format!(
                "{alpha:?} is not a multi-index of {}",
                self.params()
            ))
        })?;
        self.coeffs[i] = value;
        Ok(())
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        let (a, b) = (self.params(), other.params());
        if a != b {
            return Err(Error::SpaceMismatch(a.n, a.d, b.n, b.d));
        }
        Ok(())
    }

    /// Bombieri–Weyl inner product `Σ a_α b_α`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(crate::numeric::dot(&self.coeffs, &other.coeffs))
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    fn check_point(&self, x: &[f64]) {
        assert_eq!(
            x.len(),
            self.params().n + 1,
            "point has {} coordinates, polynomial has {} variables",
            x.len(),
            self.params().n + 1
        );
    }

    /// `p(x) = Σ_α a_α C(d,α)^{1/2} x^α`; on the unit sphere this is the
    /// generalized Rayleigh quotient `T x^d`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.check_point(x);
        let pw = self.space.powers(x);
        let mut acc = 0.0;
        for ((alpha, w), &a) in self
            .space
            .indices
            .iter()
            .zip(&self.space.sqrt_multinomial)
            .zip(&self.coeffs)
        {
            if a == 0.0 {
                continue;
            }
            let mono: f64 = alpha.0.iter().enumerate().map(|(i, &k)| pw[i][k]).product();
            acc += a * w * mono;
        }
        acc
    }

    /// Euclidean gradient of [`evaluate`](Self::evaluate) at `x`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.check_point(x);
        let m = x.len();
        let pw = self.space.powers(x);
        let mut grad = vec![0.0; m];
        for ((alpha, w), &a) in self
            .space
            .indices
            .iter()
            .zip(&self.space.sqrt_multinomial)
            .zip(&self.coeffs)
        {
            if a == 0.0 {
                continue;
            }
            let c = a * w;
            for i in 0..m {
                let ai = alpha.0[i];
                if ai == 0 {
                    continue;
                }
                let mut term = c * ai as f64 * pw[i][ai - 1];
                for (k, &ak) in alpha.0.iter().enumerate() {
                    if k != i {
                        term *= pw[k][ak];
                    }
                }
                grad[i] += term;
            }
        }
        grad
    }

    /// Euclidean Hessian at `x`.
    pub fn hessian(&self, x: &[f64]) -> SymMatrix {
        self.check_point(x);
        let m = x.len();
        let pw = self.space.powers(x);
        let mut h = vec![vec![0.0; m]; m];
        for ((alpha, w), &a) in self
            .space
            .indices
            .iter()
            .zip(&self.space.sqrt_multinomial)
            .zip(&self.coeffs)
        {
            if a == 0.0 {
                continue;
            }
            let c = a * w;
            for i in 0..m {
                let ai = alpha.0[i];
                if ai == 0 {
                    continue;
                }
                for j in i..m {
                    let aj = alpha.0[j];
                    let mut term = c;
                    if i == j {
                        if ai < 2 {
                            continue;
                        }
                        term *= (ai * (ai - 1)) as f64 * pw[i][ai - 2];
                    } else {
                        if aj == 0 {
                            continue;
                        }
                        term *= (ai * aj) as f64 * pw[i][ai - 1] * pw[j][aj - 1];
                    }
                    for (k, &ak) in alpha.0.iter().enumerate() {
                        if k != i && k != j {
                            term *= pw[k][ak];
                        }
                    }
                    h[i][j] += term;
                }
            }
        }
        let mut out = SymMatrix::zeros(m);
        for i in 0..m {
            for j in i..m {
                out.set(i, j, h[i][j]);
            }
        }
        out
    }

    /// `q(x) = p(y)` with `y_{perm[i]} = signs[i]·x_i`, a signed permutation
    /// of the variables. Such substitutions permute the basis up to sign and
    /// are exact isometries.
    pub fn substitute_signed_permutation(&self, perm: &[usize], signs: &[f64]) -> Result<Self> {
        let m = self.params().n + 1;
        if perm.len() != m || signs.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: perm.len().min(signs.len()),
            });
        }
        let mut seen = vec![false; m];
        for &p in perm {
            if p >= m || seen[p] {
                return Err(Error::Invalid(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let mut out = Self::zeros(self.params());
        for (k, beta) in self.space.indices.iter().enumerate() {
            // y^β with y_{perm[i]} = s_i x_i gives Π_i s_i^{β_{perm[i]}} x_i^{β_{perm[i]}}
            let alpha: Vec<usize> = (0..m).map(|i| beta.0[perm[i]]).collect();
            let sign: f64 = (0..m)
                .map(|i| if alpha[i] % 2 == 1 { signs[i] } else { 1.0 })
                .product();
            let j = self.space.index_of(&alpha).expect("same degree");
            out.coeffs[j] = sign * self.coeffs[k];
        }
        Ok(out)
    }
}

/// The spherical Veronese map `a ↦ (C(d,α)^{1/2} a^α)_α`, i.e. the
/// polynomial `(a₀x₀ + ⋯ + a_n x_n)^d`. Inputs within [`UNIT_TOL`] of the
/// unit sphere are renormalized.
pub fn veronese(params: SpaceParams, a: &[f64]) -> Result<BwPolynomial> {
    if a.len() != params.n + 1 {
        return Err(Error::DimensionMismatch {
            expected: params.n + 1,
            got: a.len(),
        });
    }
    let r = norm(a);
    if !((r - 1.0).abs() <= UNIT_TOL) {
        return Err(Error::NotUnit(r));
    }
    let a: Vec<f64> = a.iter().map(|v| v / r).collect();
    Ok(veronese_unchecked(params, &a))
}

pub(crate) fn veronese_unchecked(params: SpaceParams, a: &[f64]) -> BwPolynomial {
    let space = TensorSpace::get(params);
    let pw = space.powers(a);
    let coeffs = space
        .indices
        .iter()
        .zip(&space.sqrt_multinomial)
        .map(|(alpha, w)| {
            w * alpha
                .0
                .iter()
                .enumerate()
                .map(|(i, &k)| pw[i][k])
                .product::<f64>()
        })
        .collect();
    BwPolynomial { space, coeffs }
}

/// `Q ↦ xᵀQx` as a degree-2 polynomial on `R^{size}`; an isometry from
/// `(Sym, tr(AB))` onto the Bombieri–Weyl space.
pub fn sym_matrix_to_poly(q: &SymMatrix) -> Result<BwPolynomial> {
    let m = q.size();
    let params = SpaceParams::new(m.saturating_sub(1), 2)?;
    let mut p = BwPolynomial::zeros(params);
    let mut alpha = vec![0; m];
    for i in 0..m {
        for j in i..m {
            alpha.iter_mut().for_each(|a| *a = 0);
            alpha[i] += 1;
            alpha[j] += 1;
            let v = if i == j {
                q.get(i, i)
            } else {
                std::f64::consts::SQRT_2 * q.get(i, j)
            };
            p.set_coeff(&alpha, v)?;
        }
    }
    Ok(p)
}

/// Inverse of [`sym_matrix_to_poly`].
pub fn poly_to_sym_matrix(p: &BwPolynomial) -> Result<SymMatrix> {
    let params = p.params();
    if params.d != 2 {
        return Err(Error::NotQuadratic(params.d));
    }
    let m = params.n + 1;
    let mut q = SymMatrix::zeros(m);
    for (alpha, &c) in p.space.indices.iter().zip(&p.coeffs) {
        let support: Vec<usize> = (0..m).filter(|&i| alpha.0[i] > 0).collect();
        match support.as_slice() {
            [i] => q.set(*i, *i, c),
            [i, j] => q.set(*i, *j, c * std::f64::consts::FRAC_1_SQRT_2),
            _ => unreachable!("degree-2 multi-index"),
        }
    }
    Ok(q)
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    n: usize,
    d: usize,
    coeffs: Vec<f64>,
}

impl Serialize for BwPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            n: self.params().n,
            d: self.params().d,
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BwPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = PolyRepr::deserialize(de)?;
        let params = SpaceParams::new(r.n, r.d).map_err(serde::de::Error::custom)?;
        BwPolynomial::new(params, r.coeffs).map_err(serde::de::Error::custom)
    }
}
