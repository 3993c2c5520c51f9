//! Extrinsic geometry of the spherical Veronese `Σ_{n,d} ⊂ S^N` at the base
//! point `x₀^d`.
//!
//! `O(n+1)` acts transitively on the Veronese by isometries of the ambient
//! sphere, so the base point carries all the information. The tangent
//! space there is spanned by `e_i = √d x₀^{d−1} x_i` (which are Bombieri–Weyl
//! basis vectors), and the normal space splits orthogonally as `W ⊕ P` with
//! `W = span{x₀^{d−2} x_i x_j}` and `P = span{x^α : α₀ < d − 2}`.
//!
//! Weingarten matrices are expressed in the basis `(e_1, …, e_n)`. Any
//! orthogonal change of that basis conjugates them and leaves spectra alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::tensor_space::{BwPolynomial, SpaceParams};

/// Relative size of a tangential or radial component tolerated by [`weingarten`].
pub const NORMAL_TOL: f64 = 1e-12;

/// Index bookkeeping for `x₀^d`, the tangent block, `W` and `P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalSplit {
    pub params: SpaceParams,
    pub base_idx: usize,
    /// `tangent_idx[i − 1]` holds `x₀^{d−1} x_i`.
    pub tangent_idx: Vec<usize>,
    pub w_idx: Vec<usize>,
    pub p_idx: Vec<usize>,
    /// For each entry of `w_idx`, the pair `(i, j)` with `1 ≤ i ≤ j ≤ n`.
    pub w_pairs: Vec<(usize, usize)>,
}

impl NormalSplit {
    pub fn tangent_dim(&self) -> usize {
        self.tangent_idx.len()
    }

    pub fn w_dim(&self) -> usize {
        self.w_idx.len()
    }

    pub fn p_dim(&self) -> usize {
        self.p_idx.len()
    }
}

pub fn normal_split(params: SpaceParams) -> NormalSplit {
    let space = crate::tensor_space::TensorSpace::get(params);
    let d = params.d();
    let n = params.n();
    let mut split = NormalSplit {
        params,
        base_idx: 0,
        tangent_idx: vec![0; n],
        w_idx: Vec::new(),
        p_idx: Vec::new(),
        w_pairs: Vec::new(),
    };
    for (k, alpha) in space.indices().iter().enumerate() {
        let a = alpha.as_slice();
        if a[0] == d {
            split.base_idx = k;
        } else if a[0] == d - 1 {
            let i = (1..=n).find(|&i| a[i] == 1).expect("one remaining unit");
            split.tangent_idx[i - 1] = k;
        } else if a[0] == d - 2 {
            let support: Vec<usize> = (1..=n).filter(|&i| a[i] > 0).collect();
            let pair = match support.as_slice() {
                [i] => (*i, *i),
                [i, j] => (*i, *j),
                _ => unreachable!("two remaining units"),
            };
            split.w_idx.push(k);
            split.w_pairs.push(pair);
        } else {
            split.p_idx.push(k);
        }
    }
    split
}

/// Matrix of the Weingarten operator `L_η` in the basis `(e_1, …, e_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeingartenMatrix {
    pub n: usize,
    pub entries: SymMatrix,
}

/// `L_{η,ii} = √(2(d−1)/d)·η_{x₀^{d−2}x_i²}`, `L_{η,ij} = √((d−1)/d)·η_{x₀^{d−2}x_i x_j}`;
/// coordinates in `P` do not contribute.
pub fn weingarten(params: SpaceParams, eta: &BwPolynomial) -> Result<WeingartenMatrix> {
    if eta.params() != params {
        let (a, b) = (params, eta.params());
        return Err(Error::SpaceMismatch(a.n(), a.d(), b.n(), b.d()));
    }
    let split = normal_split(params);
    let c = eta.coeffs();
    let scale = eta.norm().max(f64::MIN_POSITIVE);
    let off_normal = std::iter::once(split.base_idx)
        .chain(split.tangent_idx.iter().copied())
        .map(|k| c[k].abs())
        .fold(0.0, f64::max);
    if off_normal > NORMAL_TOL * scale {
        return Err(Error::NotNormal(off_normal));
    }

    let d = params.d() as f64;
    let off = ((d - 1.0) / d).sqrt();
    let diag = (2.0 * (d - 1.0) / d).sqrt();
    let n = params.n();
    let mut l = SymMatrix::zeros(n);
    for (&k, &(i, j)) in split.w_idx.iter().zip(&split.w_pairs) {
        let v = if i == j { diag * c[k] } else { off * c[k] };
        l.set(i - 1, j - 1, v);
    }
    Ok(WeingartenMatrix { n, entries: l })
}

/// Orthonormal tangent frame `e_i = √d x₀^{d−1} x_i` at `x₀^d`.
pub fn tangent_basis(params: SpaceParams) -> Vec<BwPolynomial> {
    normal_split(params)
        .tangent_idx
        .iter()
        .map(|&k| BwPolynomial::basis(params, k))
        .collect()
}

/// Length scale of the Veronese embedding: a unit-speed great circle in
/// `S^n` maps to a curve of speed `√d`.
pub fn pullback_factor(params: SpaceParams) -> f64 {
    (params.d() as f64).sqrt()
}

/// Norm of the (sphere-tangential) acceleration of an arclength Veronese
/// geodesic, `√2·√((d−1)/d)`; its reciprocal is the focal radius `ρ₁`.
pub fn geodesic_curvature_norm(params: SpaceParams) -> f64 {
    let d = params.d() as f64;
    (2.0 * (d - 1.0) / d).sqrt()
}
