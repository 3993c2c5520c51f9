//! Seeded Gaussian ensembles: Kostlan (Bombieri–Weyl) polynomials, GOE
//! matrices and Gaussian normal vectors in the `W` block of the Veronese
//! normal space.
//!
//! Randomness is counter based. A [`SeedSpec`] `(master_seed, stream_index)`
//! selects a ChaCha8 stream, and each stream is split into substreams of
//! `2^48` words (substream `k` starts at word position `k·2^48`).
//! Substream 0 feeds ensemble draws, substream 1 feeds solver restarts.
//! Gaussian variates use the Box–Muller transform on pairs of uniforms
//! `u₁ ∈ (0, 1]`, `u₂ ∈ [0, 1)`: `√(−2 ln u₁)·(cos 2πu₂, sin 2πu₂)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::normal_split;
use crate::linalg::SymMatrix;
use crate::tensor_space::{BwPolynomial, SpaceParams};

pub const SUBSTREAM_SAMPLE: u64 = 0;
pub const SUBSTREAM_SOLVER: u64 = 1;
const SUBSTREAM_SHIFT: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Same master seed, different stream.
    pub fn with_stream(self, stream_index: u64) -> Self {
        Self {
            stream_index,
            ..self
        }
    }

    pub fn rng(&self, substream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng.set_word_pos((substream as u128) << SUBSTREAM_SHIFT);
        rng
    }

    pub fn normals(&self, substream: u64) -> Normals<ChaCha8Rng> {
        Normals::new(self.rng(substream))
    }
}

/// Standard normal variates by Box–Muller.
#[derive(Debug, Clone)]
pub struct Normals<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: Rng> Normals<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn vector(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.next_normal()).collect()
    }

    /// Uniform point on the unit sphere of `R^dim`.
    pub fn unit_vector(&mut self, dim: usize) -> Vec<f64> {
        loop {
            let v = self.vector(dim);
            let r = crate::numeric::norm(&v);
            if r > 1e-300 {
                return v.into_iter().map(|x| x / r).collect();
            }
        }
    }
}

/// A matrix drawn from `GOE(n)`: `N(0, 1)` diagonal, `N(0, 1/2)` off-diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoeSample {
    pub n: usize,
    pub entries: SymMatrix,
}

/// Bombieri–Weyl random polynomial: i.i.d. standard Gaussian coordinates.
pub fn sample_kostlan(params: SpaceParams, seed: SeedSpec) -> BwPolynomial {
    let mut g = seed.normals(SUBSTREAM_SAMPLE);
    let coeffs = g.vector(params.num_coeffs());
    BwPolynomial::new(params, coeffs).expect("length matches")
}

/// `Q = Σ η_ii E_ii + Σ_{i<j} η_ij (E_ij + E_ji)/√2`, with the `η` drawn
/// in row-major upper-triangular order. That order coincides with the
/// canonical multi-index order for `d = 2`, so `sym_matrix_to_poly` maps
/// `sample_goe(n + 1, s)` exactly onto `sample_kostlan((n, 2), s)`.
pub fn sample_goe(n: usize, seed: SeedSpec) -> Result<GoeSample> {
    if n < 1 {
        return Err(Error::out_of_range("n", n as f64, "n >= 1"));
    }
    let mut g = seed.normals(SUBSTREAM_SAMPLE);
    let mut q = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let eta = g.next_normal();
            let v = if i == j {
                eta
            } else {
                eta * std::f64::consts::FRAC_1_SQRT_2
            };
            q.set(i, j, v);
        }
    }
    Ok(GoeSample { n, entries: q })
}

/// Standard Gaussian on the monomials `x₀^{d−2} x_i x_j` (`i, j ≥ 1`), zero elsewhere.
pub fn sample_normal_w(params: SpaceParams, seed: SeedSpec) -> BwPolynomial {
    let split = normal_split(params);
    let mut g = seed.normals(SUBSTREAM_SAMPLE);
    let mut p = BwPolynomial::zeros(params);
    let coeffs = p.coeffs_mut();
    for &k in &split.w_idx {
        coeffs[k] = g.next_normal();
    }
    p
}
