//! Real symmetric tensors in occupation coordinates.
//!
//! A symmetric tensor `T ∈ ∨ⁿℝᵈ` is determined by one value per occupation
//! vector: the dense entry `T_i` equals `T_α` for `α = γ(i)`. Values are
//! stored in the lexicographic order of [`combinat::enumerate_occupations`].

use combinat::{
    enumerate_occupations, flat_occupation, sub_occupations, Bounds, CombinatError,
    OccupationVector,
};
use numkernel::DenseSym;
use serde::{Deserialize, Serialize};

mod json;

pub use json::{SymTensorEntry, SymTensorJson};

/// Errors raised by tensor operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TensorError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Combinat(#[from] CombinatError),
}

/// A real symmetric tensor of order `n` and dimension `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    n: u32,
    d: usize,
    keys: Vec<OccupationVector>,
    values: Vec<f64>,
}

/// A symmetric matrix whose rows and columns are labelled by occupation
/// vectors of a common order `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatteningMatrix {
    pub labels: Vec<OccupationVector>,
    pub matrix: DenseSym,
}

impl SymTensor {
    /// The zero tensor, subject to the default desk-scale bounds.
    pub fn zeros(n: u32, d: usize) -> Result<Self, TensorError> {
        Self::zeros_with_bounds(n, d, &Bounds::default())
    }

    /// The zero tensor, subject to explicit bounds.
    pub fn zeros_with_bounds(n: u32, d: usize, bounds: &Bounds) -> Result<Self, TensorError> {
        bounds.check(n, d)?;
        let keys = enumerate_occupations(n, d);
        let values = vec![0.0; keys.len()];
        Ok(SymTensor { n, d, keys, values })
    }

    /// Evaluates `f` on every occupation vector.
    pub fn from_fn(
        n: u32,
        d: usize,
        mut f: impl FnMut(&OccupationVector) -> f64,
    ) -> Result<Self, TensorError> {
        let mut t = Self::zeros(n, d)?;
        for (k, v) in t.keys.iter().zip(t.values.iter_mut()) {
            *v = f(k);
        }
        Ok(t)
    }

    /// Builds a tensor from `(α, value)` pairs; unmentioned entries are zero
    /// and a repeated `α` is rejected.
    pub fn from_entries<'a>(
        n: u32,
        d: usize,
        entries: impl IntoIterator<Item = (&'a OccupationVector, f64)>,
    ) -> Result<Self, TensorError> {
        let mut t = Self::zeros(n, d)?;
        let mut seen = vec![false; t.values.len()];
        for (a, v) in entries {
            t.check_key(a)?;
            let r = a.rank();
            if seen[r] {
                return Err(TensorError::Parse(format!("duplicate occupation vector {a}")));
            }
            seen[r] = true;
            t.values[r] = v;
        }
        Ok(t)
    }

    fn check_key(&self, a: &OccupationVector) -> Result<(), TensorError> {
        if a.dim() != self.d || a.order() != self.n {
            return Err(TensorError::Shape(format!(
                "occupation vector {a} does not belong to order {} dimension {}",
                self.n, self.d
            )));
        }
        Ok(())
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of stored values, `sym_dim(n,d)`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Occupation vectors in storage order.
    pub fn keys(&self) -> &[OccupationVector] {
        &self.keys
    }

    /// Values in storage order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// `(α, T_α)` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (&OccupationVector, f64)> {
        self.keys.iter().zip(self.values.iter().copied())
    }

    /// `T_α`; vectors of the wrong order or dimension read as zero.
    pub fn get(&self, a: &OccupationVector) -> f64 {
        if a.dim() != self.d || a.order() != self.n {
            return 0.0;
        }
        self.values[a.rank()]
    }

    pub fn set(&mut self, a: &OccupationVector, v: f64) -> Result<(), TensorError> {
        self.check_key(a)?;
        let r = a.rank();
        self.values[r] = v;
        Ok(())
    }

    /// Dense entry at 0-based multi-index `i`.
    pub fn dense_entry(&self, i: &[usize]) -> f64 {
        let mut counts = vec![0u32; self.d];
        for &k in i {
            counts[k] += 1;
        }
        self.get(&OccupationVector::new(counts))
    }

    /// Symmetrizes a dense order-`n` array of shape `dⁿ` (first leg most
    /// significant): each occupation value is the average over its orbit.
    pub fn from_dense(n: u32, d: usize, dense: &[f64]) -> Result<Self, TensorError> {
        let expected = combinat::dense_len(n, d)
            .ok_or_else(|| TensorError::Shape("dense size overflows".into()))?;
        if dense.len() != expected {
            return Err(TensorError::Shape(format!(
                "dense array has {} entries, expected {expected}",
                dense.len()
            )));
        }
        let mut t = Self::zeros(n, d)?;
        for (flat, &v) in dense.iter().enumerate() {
            let r = flat_occupation(flat, n, d).rank();
            t.values[r] += v;
        }
        for (k, v) in t.keys.iter().zip(t.values.iter_mut()) {
            *v /= k.weight();
        }
        Ok(t)
    }

    /// The dense array of shape `dⁿ` (first leg most significant).
    pub fn to_dense(&self) -> Vec<f64> {
        let len = combinat::dense_len(self.n, self.d).expect("dense size within bounds");
        (0..len)
            .map(|flat| self.values[flat_occupation(flat, self.n, self.d).rank()])
            .collect()
    }

    /// `v^⊗n`, i.e. `T_α = ∏_j v_j^{α_j}`.
    pub fn rank_one(v: &[f64], n: u32) -> Result<Self, TensorError> {
        Self::from_fn(n, v.len(), |a| monomial(v, a))
    }

    fn check_same_shape(&self, other: &SymTensor) -> Result<(), TensorError> {
        if self.n != other.n || self.d != other.d {
            return Err(TensorError::Shape(format!(
                "(n,d) = ({},{}) vs ({},{})",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(())
    }

    /// `⟨T, S⟩ = Σ_α multinomial(n,α) T_α S_α`, the full contraction.
    pub fn euclid_inner(&self, other: &SymTensor) -> Result<f64, TensorError> {
        self.check_same_shape(other)?;
        Ok(self
            .keys
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(k, (a, b))| k.weight() * a * b)
            .sum())
    }

    /// `sqrt(⟨T, T⟩)`, the Frobenius norm of the dense tensor.
    pub fn weighted_norm(&self) -> f64 {
        self.euclid_inner(self).unwrap_or(0.0).sqrt()
    }

    /// `T + s·S`.
    pub fn add_scaled(&self, other: &SymTensor, s: f64) -> Result<SymTensor, TensorError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
        Ok(out)
    }

    /// `s·T`.
    pub fn scale(&self, s: f64) -> SymTensor {
        let mut out = self.clone();
        for a in out.values.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Sum of all dense entries, `Σ_α multinomial(n,α) T_α`.
    pub fn dense_sum(&self) -> f64 {
        self.iter().map(|(k, v)| k.weight() * v).sum()
    }

    /// Contraction of the last `r` legs with the all-ones vector:
    /// `(tr_r T)_α = Σ_{|δ|=r} multinomial(r,δ) T_{α+δ}`.
    pub fn marginal(&self, r: u32) -> Result<SymTensor, TensorError> {
        if r > self.n {
            return Err(TensorError::Domain(format!(
                "cannot trace {r} legs of an order-{} tensor",
                self.n
            )));
        }
        let deltas: Vec<(OccupationVector, f64)> = enumerate_occupations(r, self.d)
            .into_iter()
            .map(|dl| {
                let w = dl.weight();
                (dl, w)
            })
            .collect();
        let mut out = Self::zeros_with_bounds(self.n - r, self.d, &Bounds::relaxed())?;
        for (k, v) in out.keys.iter().zip(out.values.iter_mut()) {
            *v = deltas.iter().map(|(dl, w)| w * self.get(&k.add(dl))).sum();
        }
        Ok(out)
    }

    /// The moment matrix `ℳ^(α,j)`: rows and columns indexed by `|β| = j`,
    /// entry `T_{α+β+β′}`.
    pub fn moment_matrix(&self, alpha: &OccupationVector, j: u32) -> Result<FlatteningMatrix, TensorError> {
        if alpha.dim() != self.d || alpha.order() + 2 * j != self.n {
            return Err(TensorError::Domain(format!(
                "moment matrix needs |α| = n − 2j; got |α| = {}, n = {}, j = {j}",
                alpha.order(),
                self.n
            )));
        }
        let labels = enumerate_occupations(j, self.d);
        let matrix = DenseSym::from_fn(labels.len(), |p, q| {
            self.get(&alpha.add(&labels[p]).add(&labels[q]))
        });
        Ok(FlatteningMatrix { labels, matrix })
    }

    /// Every moment matrix of level `j`, paired with its `α`.
    pub fn moment_matrices(&self, j: u32) -> Result<Vec<(OccupationVector, FlatteningMatrix)>, TensorError> {
        if 2 * j > self.n {
            return Err(TensorError::Domain(format!("level {j} exceeds n/2 for n = {}", self.n)));
        }
        enumerate_occupations(self.n - 2 * j, self.d)
            .into_iter()
            .map(|a| self.moment_matrix(&a, j).map(|m| (a, m)))
            .collect()
    }

    /// The order-`(n+r)` symmetrization of `T ⊗ e^⊗r` with `e` the all-ones
    /// vector.
    ///
    /// Among the dense positions with occupation `β`, exactly
    /// `multinomial(n, β−δ)·multinomial(r, δ)` have occupation `β−δ` on the
    /// first `n` legs, so the orbit average is
    /// `Σ_{δ≤β, |δ|=r} multinomial(n,β−δ) multinomial(r,δ) T_{β−δ} / multinomial(n+r,β)`.
    pub fn tensor_with_ones(&self, r: u32) -> Result<SymTensor, TensorError> {
        let mut out = Self::zeros_with_bounds(self.n + r, self.d, &Bounds::relaxed())?;
        for (beta, v) in out.keys.iter().zip(out.values.iter_mut()) {
            let mut acc = 0.0;
            for delta in sub_occupations(beta, r) {
                let rest = beta.checked_sub(&delta).expect("δ ≤ β");
                acc += rest.weight() * delta.weight() * self.get(&rest);
            }
            *v = acc / beta.weight();
        }
        Ok(out)
    }

    /// Serializable form with every entry listed.
    pub fn to_json(&self) -> SymTensorJson {
        SymTensorJson {
            n: self.n,
            d: self.d,
            entries: self
                .iter()
                .map(|(a, v)| SymTensorEntry { alpha: a.entries().to_vec(), value: v })
                .collect(),
        }
    }

    /// Parses `{"n":…, "d":…, "entries":[{"alpha":[…],"value":…},…]}`.
    pub fn from_json_str(s: &str) -> Result<Self, TensorError> {
        let j: SymTensorJson =
            serde_json::from_str(s).map_err(|e| TensorError::Parse(e.to_string()))?;
        j.to_tensor()
    }
}

/// `∏_j v_j^{α_j}`.
pub fn monomial(v: &[f64], a: &OccupationVector) -> f64 {
    a.entries()
        .iter()
        .zip(v)
        .map(|(&k, &x)| x.powi(k as i32))
        .product()
}
