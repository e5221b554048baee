//! Membership tests for the primal tensor cones.
//!
//! * `NN`: entrywise nonnegative tensors (PSD DS states).
//! * `Mom(n,k)`: tensors whose balanced moment matrices up to level `k` are
//!   PSD (PPT DS states).
//! * `CP`: sums of tensor powers of nonnegative vectors (separable DS
//!   states); only membership can be certified.
//! * Copositivity is probed numerically by minimizing the form on the simplex.

use combinat::OccupationVector;
use serde::{Deserialize, Serialize};

mod copositive;
mod cp;
mod mom;

pub use copositive::{copositive_min, CopositiveMin};
pub use cp::{cp_decompose, cp_residual, CpAtom, CpOptions};
pub use mom::{is_mom, is_nn, qubit_separability, ConeError};

/// Outcome of a membership test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeStatus {
    Member,
    NonMember,
    Inconclusive,
}

/// Evidence attached to a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeCertificate {
    /// Smallest entry of a nonnegative tensor.
    MinEntry { alpha: OccupationVector, value: f64 },
    /// An entry below `−ε`.
    NegativeEntry { alpha: OccupationVector, value: f64 },
    /// Smallest eigenvalue over all checked moment matrices.
    MomentSpectrum { min_eigenvalue: f64, blocks: usize },
    /// `vᵀ M^(α,j) v = eigenvalue < −threshold` for the unit vector `v`
    /// indexed by `labels`.
    MomentEigenvector {
        alpha: OccupationVector,
        j: u32,
        labels: Vec<OccupationVector>,
        eigenvalue: f64,
        threshold: f64,
        eigenvector: Vec<f64>,
    },
    /// `T ≈ Σ_q w_q v_q^⊗n` with `v_q ≥ 0` on the simplex.
    Decomposition { atoms: Vec<CpAtom>, relative_residual: f64 },
}

/// A membership verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeVerdict {
    pub cone: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    pub status: ConeStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ConeCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub details: String,
}

impl ConeVerdict {
    pub fn is_member(&self) -> bool {
        self.status == ConeStatus::Member
    }

    pub fn is_non_member(&self) -> bool {
        self.status == ConeStatus::NonMember
    }
}
