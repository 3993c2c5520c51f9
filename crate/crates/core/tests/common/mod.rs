//! Independent oracles shared by the integration tests. Nothing here reuses
//! the crate's own combinatorics: multinomials come from integer factorials
//! and tensors are handled in dense `(n+1)^d` form.

#![allow(dead_code)]

use rankone_core::{BwPolynomial, SpaceParams};

pub fn params(n: usize, d: usize) -> SpaceParams {
    SpaceParams::new(n, d).expect("valid parameters")
}

pub fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// `d! / (α₀! ⋯ α_n!)` in exact integer arithmetic.
pub fn multinomial(alpha: &[usize]) -> f64 {
    let d: usize = alpha.iter().sum();
    let den: u128 = alpha.iter().map(|&a| factorial(a)).product();
    (factorial(d) / den) as f64
}

/// `Σ_α a_α √C(d,α) x^α` evaluated term by term.
pub fn eval_monomial(p: &BwPolynomial, x: &[f64]) -> f64 {
    p.space()
        .indices()
        .iter()
        .zip(p.coeffs())
        .map(|(alpha, a)| {
            let alpha = alpha.as_slice();
            let mono: f64 = alpha
                .iter()
                .zip(x)
                .map(|(&k, xi)| xi.powi(k as i32))
                .product();
            a * multinomial(alpha).sqrt() * mono
        })
        .sum()
}

/// Dense symmetric tensor with `T[i₁…i_d] = a_α / √C(d,α)`, `α` the index counts.
pub struct Dense {
    pub m: usize,
    pub d: usize,
    pub data: Vec<f64>,
}

fn counts(flat: usize, m: usize, d: usize) -> Vec<usize> {
    let mut alpha = vec![0; m];
    let mut r = flat;
    for _ in 0..d {
        alpha[r % m] += 1;
        r /= m;
    }
    alpha
}

impl Dense {
    pub fn from_poly(p: &BwPolynomial) -> Self {
        let params = p.params();
        let (m, d) = (params.n() + 1, params.d());
        let data = (0..m.pow(d as u32))
            .map(|flat| {
                let alpha = counts(flat, m, d);
                p.coeff(&alpha).expect("degree d") / multinomial(&alpha).sqrt()
            })
            .collect();
        Self { m, d, data }
    }

    pub fn to_poly(&self, params: SpaceParams) -> BwPolynomial {
        let mut p = BwPolynomial::zeros(params);
        for flat in 0..self.data.len() {
            let alpha = counts(flat, self.m, self.d);
            // each α is written several times with the same value
            p.set_coeff(&alpha, self.data[flat] * multinomial(&alpha).sqrt())
                .expect("degree d");
        }
        p
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `T x^d = Σ T[i₁…i_d] x_{i₁}⋯x_{i_d}`.
    pub fn contract(&self, x: &[f64]) -> f64 {
        (0..self.data.len())
            .map(|flat| {
                let mut r = flat;
                let mut w = self.data[flat];
                for _ in 0..self.d {
                    w *= x[r % self.m];
                    r /= self.m;
                }
                w
            })
            .sum()
    }

    /// `T'[i₁…i_d] = Σ_j T[j₁…j_d] Π_k r[j_k][i_k]`, the tensor of `x ↦ p(Rx)`;
    /// applied one mode at a time.
    pub fn rotate(&self, r: &[Vec<f64>]) -> Self {
        let m = self.m;
        let mut data = self.data.clone();
        let mut stride = 1;
        for _ in 0..self.d {
            let mut out = vec![0.0; data.len()];
            for flat in 0..data.len() {
                let i = (flat / stride) % m;
                let base = flat - i * stride;
                let mut acc = 0.0;
                for j in 0..m {
                    acc += data[base + j * stride] * r[j][i];
                }
                out[flat] = acc;
            }
            data = out;
            stride *= m;
        }
        Self { m, d: self.d, data }
    }
}

/// Random orthogonal matrix by Gram–Schmidt on Gaussian columns.
pub fn random_rotation(m: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut g = rankone_core::SeedSpec::new(seed, 0).normals(0);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < m {
        let mut v = g.vector(m);
        for _ in 0..2 {
            for c in &cols {
                let t: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= t * b);
            }
        }
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if r > 1e-6 {
            cols.push(v.into_iter().map(|a| a / r).collect());
        }
    }
    // row i, column j
    (0..m)
        .map(|i| (0..m).map(|j| cols[j][i]).collect())
        .collect()
}

pub fn unit(v: Vec<f64>) -> Vec<f64> {
    let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / r).collect()
}
