//! Dense symmetric matrices: cyclic Jacobi eigensolver and determinants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute symmetry tolerance, scaled by the largest entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

const JACOBI_REL_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 30;

/// A real symmetric `n × n` matrix stored densely in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Eigen-decomposition `Q = V diag(values) Vᵀ`; column `k` of `vectors` pairs with `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
    pub converged: bool,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged or non-symmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        let m = Self { n, data };
        let scale = m.data.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let asym = m.max_asymmetry();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(m.symmetrized())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.n.max(1))
            .map(|r| r.to_vec())
            .take(self.n)
            .collect()
    }

    fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn symmetrized(mut self) -> Self {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let v = 0.5 * (self.get(i, j) + self.get(j, i));
                self.set(i, j, v);
            }
        }
        self
    }

    /// `tr(Q²)`, the squared Frobenius norm.
    pub fn trace_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.trace_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Congruence `Rᵀ Q R` for a square (not necessarily orthogonal) `r`.
    pub fn congruence(&self, r: &[Vec<f64>]) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        acc += r[k][i] * self.get(k, l) * r[l][j];
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// `det(I − λ Q)` by Gaussian elimination with partial pivoting.
    pub fn det_identity_minus(&self, lambda: f64) -> f64 {
        let n = self.n;
        let mut a: Vec<f64> = self.data.iter().map(|v| -lambda * v).collect();
        for i in 0..n {
            a[i * n + i] += 1.0;
        }
        determinant_in_place(&mut a, n)
    }

    pub fn determinant(&self) -> f64 {
        let mut a = self.data.clone();
        determinant_in_place(&mut a, self.n)
    }

    /// Cyclic Jacobi sweeps until the off-diagonal Frobenius norm drops
    /// below `1e-13 ‖Q‖_F` (at most 30 sweeps).
    pub fn jacobi_eigen(&self) -> SymEigen {
        let n = self.n;
        let mut a = self.data.clone();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        let threshold = JACOBI_REL_TOL * self.frobenius_norm();

        let off_norm = |a: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += a[i * n + j] * a[i * n + j];
                    }
                }
            }
            s.sqrt()
        };

        let mut sweeps = 0;
        let mut converged = off_norm(&a) <= threshold;
        while !converged && sweeps < JACOBI_MAX_SWEEPS {
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    // A ← Jᵀ A J with J the (p, q) plane rotation
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
            converged = off_norm(&a) <= threshold;
        }

        SymEigen {
            values: (0..n).map(|i| a[i * n + i]).collect(),
            vectors: (0..n)
                .map(|k| (0..n).map(|i| v[i * n + k]).collect())
                .collect(),
            sweeps,
            converged,
        }
    }
}

fn determinant_in_place(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .expect("non-empty range");
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for row in (col + 1)..n {
            let factor = a[row * n + col] / p;
            if factor != 0.0 {
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    det
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMatrix::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &SymEigen) -> SymMatrix {
        let n = e.values.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = (0..n)
                    .map(|k| e.values[k] * e.vectors[k][i] * e.vectors[k][j])
                    .sum();
                m.set(i, j, v);
            }
        }
        m
    }

    #[test]
    fn rejects_asymmetric_input() {
        let err = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric(_)));
        let err = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn jacobi_diagonal_input_needs_no_sweep() {
        let e = SymMatrix::from_diagonal(&[3.0, -1.0, 2.0]).jacobi_eigen();
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.values, vec![3.0, -1.0, 2.0]);
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let q = SymMatrix::from_rows(&[
            vec![2.0, -1.0, 0.5, 0.1],
            vec![-1.0, 0.3, 0.7, -2.0],
            vec![0.5, 0.7, -1.2, 0.4],
            vec![0.1, -2.0, 0.4, 1.1],
        ])
        .unwrap();
        let e = q.jacobi_eigen();
        assert!(e.converged);
        let r = reconstruct(&e);
        for i in 0..4 {
            for j in 0..4 {
                assert!((r.get(i, j) - q.get(i, j)).abs() < 1e-12);
            }
        }
        // orthonormal eigenvectors
        for a in 0..4 {
            for b in 0..4 {
                let d: f64 = (0..4).map(|i| e.vectors[a][i] * e.vectors[b][i]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-13);
            }
        }
        let sum: f64 = e.values.iter().sum();
        assert!((sum - (2.0 + 0.3 - 1.2 + 1.1)).abs() < 1e-13);
    }

    #[test]
    fn determinants() {
        let q = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert!((q.determinant() - 5.0).abs() < 1e-14);
        // det(I - 0.5 Q) = (1-1)(1-1.5) - 0.25 = -0.25
        assert!((q.det_identity_minus(0.5) + 0.25).abs() < 1e-14);
        assert_eq!(SymMatrix::zeros(3).determinant(), 0.0);
        assert_eq!(SymMatrix::zeros(3).det_identity_minus(0.7), 1.0);
    }

    #[test]
    fn serde_as_rows() {
        let q = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, -1.0]]).unwrap();
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, "[[1.0,0.5],[0.5,-1.0]]");
        let back: SymMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<SymMatrix>("[[1.0,0.5],[0.4,-1.0]]").is_err());
    }
}
