//! Mixtures of Dicke states.
//!
//! A diagonally symmetric (DS) matrix is `X = Σ_α λ_α |D_α⟩⟨D_α|`. The
//! λ-vector is the stored representation; the `Q` view
//! (`Q_α = λ_α / multinomial(n,α)`, the diagonal of `X` in the computational
//! basis) and the `W` view (`W_α = λ_α`) are computed on demand.

use combinat::{orbit, CombinatError, OccupationVector, Partition};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use symtensor::{SymTensor, SymTensorEntry, TensorError};

pub mod dense;

pub use dense::DenseMatrix;

/// Errors raised by DS-matrix operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DsError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Combinat(#[from] CombinatError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dense export of size {0} exceeds the bound {max}", max = dense::MAX_DENSE_DIM)]
    TooLarge(usize),
}

/// A mixture of Dicke states stored through its λ-vector.
#[derive(Clone, Debug, PartialEq)]
pub struct DSMatrix {
    lambda: SymTensor,
}

impl DSMatrix {
    /// Wraps λ, read as a tensor keyed by occupation vectors.
    pub fn from_lambda(lambda: SymTensor) -> Self {
        DSMatrix { lambda }
    }

    /// Builds λ from `(α, λ_α)` pairs.
    pub fn from_lambda_entries<'a>(
        n: u32,
        d: usize,
        entries: impl IntoIterator<Item = (&'a OccupationVector, f64)>,
    ) -> Result<Self, DsError> {
        Ok(DSMatrix { lambda: SymTensor::from_entries(n, d, entries)? })
    }

    pub fn order(&self) -> u32 {
        self.lambda.order()
    }

    pub fn dim(&self) -> usize {
        self.lambda.dim()
    }

    /// λ as a tensor.
    pub fn lambda(&self) -> &SymTensor {
        &self.lambda
    }

    /// `Q_α = λ_α / multinomial(n,α)`.
    pub fn q_view(&self) -> SymTensor {
        let mut q = self.lambda.clone();
        let w: Vec<f64> = q.keys().iter().map(|k| k.weight()).collect();
        for (v, w) in q.values_mut().iter_mut().zip(w) {
            *v /= w;
        }
        q
    }

    /// Inverse of [`DSMatrix::q_view`].
    pub fn lambda_from_q(q: &SymTensor) -> Self {
        let mut l = q.clone();
        let w: Vec<f64> = l.keys().iter().map(|k| k.weight()).collect();
        for (v, w) in l.values_mut().iter_mut().zip(w) {
            *v *= w;
        }
        DSMatrix { lambda: l }
    }

    /// `W_α = multinomial(n,α)·Q_α = λ_α`.
    pub fn w_view(&self) -> SymTensor {
        self.lambda.clone()
    }

    /// Inverse of [`DSMatrix::w_view`].
    pub fn from_w(w: &SymTensor) -> Self {
        DSMatrix { lambda: w.clone() }
    }

    /// `Σ_α λ_α`.
    pub fn trace(&self) -> f64 {
        self.lambda.values().iter().sum()
    }

    /// Number of nonzero λ entries.
    pub fn rank(&self) -> usize {
        self.lambda.values().iter().filter(|v| **v != 0.0).count()
    }

    /// PSD iff every λ is at least `−tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.lambda.values().iter().all(|v| *v >= -tol)
    }

    /// Hilbert–Schmidt inner product `tr(XY) = ⟨Q[X], W[Y]⟩ = Σ_α λ(X)_α λ(Y)_α`.
    pub fn hs_inner(&self, other: &DSMatrix) -> Result<f64, DsError> {
        Ok(self.q_view().euclid_inner(&other.w_view())?)
    }

    /// Partial trace over `r` parties, computed as the tensor marginal of `Q`.
    pub fn marginal(&self, r: u32) -> Result<DSMatrix, DsError> {
        Ok(DSMatrix::lambda_from_q(&self.q_view().marginal(r)?))
    }

    /// `Σ_α λ_α |D_α⟩⟨D_α|` as a dense real `dⁿ×dⁿ` matrix.
    pub fn to_dense(&self) -> Result<DenseMatrix, DsError> {
        DenseMatrix::from_ds(self)
    }

    /// The projector onto `|D_α⟩`.
    pub fn pure_dicke(alpha: &OccupationVector) -> Result<Self, DsError> {
        DSMatrix::from_lambda_entries(alpha.order(), alpha.dim(), [(alpha, 1.0)])
    }

    /// State with `λ = 1/|orbit(μ)|` on the orbit of `μ`.
    pub fn sd_orbit_state(mu: &Partition) -> Result<Self, DsError> {
        let members = orbit(mu);
        let w = 1.0 / members.len() as f64;
        DSMatrix::from_lambda_entries(
            mu.parts().order(),
            mu.parts().dim(),
            members.iter().map(|a| (a, w)),
        )
    }

    /// Averages λ over every orbit of the slot permutations.
    pub fn sd_symmetrize(&self) -> DSMatrix {
        let mut sums: BTreeMap<Partition, (f64, usize)> = BTreeMap::new();
        for (a, v) in self.lambda.iter() {
            let e = sums.entry(Partition::of(a)).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
        let mut out = self.lambda.clone();
        let keys: Vec<OccupationVector> = out.keys().to_vec();
        for (k, v) in keys.iter().zip(out.values_mut()) {
            let (s, c) = sums[&Partition::of(k)];
            *v = s / c as f64;
        }
        DSMatrix { lambda: out }
    }

    /// Probability weight of each orbit, for a permutation-invariant state.
    pub fn sd_coordinates(&self, tol: f64) -> Result<BTreeMap<Partition, f64>, DsError> {
        let mut groups: BTreeMap<Partition, Vec<f64>> = BTreeMap::new();
        for (a, v) in self.lambda.iter() {
            groups.entry(Partition::of(a)).or_default().push(v);
        }
        let mut out = BTreeMap::new();
        for (mu, vals) in groups {
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo > tol {
                return Err(DsError::Domain(format!(
                    "λ varies by {:e} on the orbit of {}",
                    hi - lo,
                    mu.parts()
                )));
            }
            out.insert(mu, vals.iter().sum());
        }
        Ok(out)
    }

    /// Serializable form keyed by λ.
    pub fn to_json(&self) -> DSMatrixJson {
        DSMatrixJson {
            n: self.order(),
            d: self.dim(),
            lambda: Some(
                self.lambda
                    .iter()
                    .map(|(a, v)| SymTensorEntry { alpha: a.entries().to_vec(), value: v })
                    .collect(),
            ),
            q: None,
        }
    }

    /// Parses the JSON form; exactly one of `lambda` and `q` must be present.
    pub fn from_json_str(s: &str) -> Result<Self, DsError> {
        let j: DSMatrixJson = serde_json::from_str(s).map_err(|e| DsError::Parse(e.to_string()))?;
        j.to_matrix()
    }
}

/// JSON form `{"n":…, "d":…, "lambda":[…]}` or the same with `"q"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DSMatrixJson {
    pub n: u32,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<SymTensorEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<SymTensorEntry>>,
}

impl DSMatrixJson {
    pub fn to_matrix(&self) -> Result<DSMatrix, DsError> {
        let build = |entries: &Vec<SymTensorEntry>| -> Result<SymTensor, DsError> {
            let j = symtensor::SymTensorJson { n: self.n, d: self.d, entries: entries.clone() };
            j.to_tensor().map_err(|e| DsError::Parse(e.to_string()))
        };
        match (&self.lambda, &self.q) {
            (Some(l), None) => Ok(DSMatrix::from_lambda(build(l)?)),
            (None, Some(q)) => Ok(DSMatrix::lambda_from_q(&build(q)?)),
            _ => Err(DsError::Parse("exactly one of \"lambda\" or \"q\" is required".into())),
        }
    }
}

/// `Q` of the `r`-party marginal of `|D_α⟩⟨D_α|`:
/// `Q_β = multinomial(r, α−β)/multinomial(n, α)` for `β ≤ α`, else zero.
pub fn dicke_marginal_closed_form(alpha: &OccupationVector, r: u32) -> Result<SymTensor, DsError> {
    let n = alpha.order();
    if r >= n {
        return Err(DsError::Domain(format!("r = {r} must be below n = {n}")));
    }
    let denom = alpha.multinomial()? as f64;
    Ok(SymTensor::from_fn(n - r, alpha.dim(), |beta| match alpha.checked_sub(beta) {
        Some(delta) => delta.weight() / denom,
        None => 0.0,
    })?)
}

/// Exact form of [`dicke_marginal_closed_form`] as (numerator, denominator)
/// pairs in storage order.
pub fn dicke_marginal_exact(alpha: &OccupationVector, r: u32) -> Result<Vec<(u128, u128)>, DsError> {
    let n = alpha.order();
    if r >= n {
        return Err(DsError::Domain(format!("r = {r} must be below n = {n}")));
    }
    let denom = alpha.multinomial()?;
    combinat::enumerate_occupations(n - r, alpha.dim())
        .iter()
        .map(|beta| match alpha.checked_sub(beta) {
            Some(delta) => Ok((delta.multinomial()?, denom)),
            None => Ok((0, denom)),
        })
        .collect()
}

/// Negative partial transpose of the two-body marginal of a Dicke state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NptReport {
    pub entangled: bool,
    /// 1-based slots `(l, m)` with `Q_lm² > Q_ll Q_mm`.
    pub pair: Option<(usize, usize)>,
    /// `Q_lm² − Q_ll Q_mm`.
    pub gap: f64,
}

/// Checks `Q_ll Q_mm < Q_lm²` on the two-body marginal for the first pair
/// `l < m` of the support of `α`.
pub fn npt_2body(alpha: &OccupationVector) -> Result<NptReport, DsError> {
    let supp = alpha.support();
    let n = alpha.order();
    if supp.len() <= 1 || n < 2 {
        return Ok(NptReport { entangled: false, pair: None, gap: 0.0 });
    }
    let two = if n == 2 {
        DSMatrix::pure_dicke(alpha)?.q_view()
    } else {
        dicke_marginal_closed_form(alpha, n - 2)?
    };
    let d = alpha.dim();
    let (l, m) = (supp[0], supp[1]);
    let q_ll = two.get(&OccupationVector::unit(d, l, 2));
    let q_mm = two.get(&OccupationVector::unit(d, m, 2));
    let q_lm = two.get(&OccupationVector::unit(d, l, 1).add(&OccupationVector::unit(d, m, 1)));
    let gap = q_lm * q_lm - q_ll * q_mm;
    Ok(NptReport { entangled: gap > 0.0, pair: Some((l + 1, m + 1)), gap })
}
