//! Dense computational-basis matrices, used as independent oracles.

use crate::{DSMatrix, DsError};
use combinat::{dense_len, flat_occupation};
use numkernel::{psd_check, DenseSym};

/// Largest dense dimension `dⁿ` accepted by the exporters.
pub const MAX_DENSE_DIM: usize = 2048;

/// A dense real square matrix on `(ℝᵈ)^{⊗n}` with the first leg as the
/// most significant base-`d` digit.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub n: u32,
    pub d: usize,
    pub dim: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    /// `Σ_α λ_α |D_α⟩⟨D_α|`: entry `(a,b)` is `Q_{γ(a)}` when `γ(a) = γ(b)`.
    pub fn from_ds(x: &DSMatrix) -> Result<Self, DsError> {
        let (n, d) = (x.order(), x.dim());
        let dim = dense_len(n, d).filter(|&v| v <= MAX_DENSE_DIM).ok_or(DsError::TooLarge(
            dense_len(n, d).unwrap_or(usize::MAX),
        ))?;
        let q = x.q_view();
        let occ: Vec<usize> = (0..dim).map(|a| flat_occupation(a, n, d).rank()).collect();
        let mut data = vec![0.0; dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                if occ[a] == occ[b] {
                    data[a * dim + b] = q.values()[occ[a]];
                }
            }
        }
        Ok(DenseMatrix { n, d, dim, data })
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.dim + b]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|a| self.get(a, a)).sum()
    }

    /// `tr(XY)`.
    pub fn trace_product(&self, other: &DenseMatrix) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc += self.get(a, b) * other.get(b, a);
            }
        }
        acc
    }

    /// Traces out the last `r` legs.
    pub fn partial_trace_last(&self, r: u32) -> DenseMatrix {
        let tail = dense_len(r, self.d).unwrap();
        let head = self.dim / tail;
        let mut data = vec![0.0; head * head];
        for a in 0..head {
            for b in 0..head {
                data[a * head + b] =
                    (0..tail).map(|c| self.get(a * tail + c, b * tail + c)).sum();
            }
        }
        DenseMatrix { n: self.n - r, d: self.d, dim: head, data }
    }

    /// Transposes the first `k` legs: `⟨a₁a₂|X^Γ|b₁b₂⟩ = ⟨b₁a₂|X|a₁b₂⟩`.
    pub fn partial_transpose_first(&self, k: u32) -> DenseMatrix {
        let rest = dense_len(self.n - k, self.d).unwrap();
        let n = self.dim;
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            let (a1, a2) = (a / rest, a % rest);
            for b in 0..n {
                let (b1, b2) = (b / rest, b % rest);
                data[a * n + b] = self.get(b1 * rest + a2, a1 * rest + b2);
            }
        }
        DenseMatrix { n: self.n, d: self.d, dim: n, data }
    }

    /// As a symmetric matrix (fails if not symmetric).
    pub fn to_sym(&self) -> Result<DenseSym, DsError> {
        DenseSym::new(self.dim, self.data.clone()).map_err(|e| DsError::Domain(e.to_string()))
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64, DsError> {
        Ok(psd_check(&self.to_sym()?, 0.0).map_err(|e| DsError::Domain(e.to_string()))?.min_eigenvalue)
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}
