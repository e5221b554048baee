//! Inner and outer hierarchies around the copositive and completely
//! positive cones.
//!
//! * `RSOS(n,r)`: `p_T(x⊙x)·‖x‖^{2r}` is a sum of squares (inner
//!   approximation of copositivity).
//! * `PNN(n,r)`: `p_T·(Σx)^r` has nonnegative coefficients (inner
//!   approximation of copositivity).
//! * `NNExt(n,r)`: `Q` is the marginal of a nonnegative order-`(n+r)`
//!   tensor (outer approximation of CP, bosonic extendibility).
//! * `MomExt(n,r)`: the extension is additionally a moment tensor (PPT
//!   bosonic extendibility).

use combinat::OccupationVector;
use cones::ConeVerdict;
use numkernel::FeasibilityCertificate;
use serde::{Deserialize, Serialize};
use soscone::SosVerdict;
use symtensor::{SymTensor, SymTensorJson, TensorError};

mod extension;
mod reznick;

pub use extension::{
    check_nn_ext_farkas, ds_extendibility, ext_witness_check, extension_state, mom_ext_feasible,
    nn_ext_feasible, nn_ext_system,
};
pub use reznick::{pnn_member, polya_coefficients, rsos_member};

/// Errors raised by the hierarchy tests.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HierarchyError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("SOS test failed: {0}")]
    Sos(String),
    #[error("cone test failed: {0}")]
    Cone(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// The four hierarchy families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "RSOS")]
    Rsos,
    #[serde(rename = "PNN")]
    Pnn,
    #[serde(rename = "NNExt")]
    NnExt,
    #[serde(rename = "MomExt")]
    MomExt,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Rsos => "RSOS",
            Family::Pnn => "PNN",
            Family::NnExt => "NNExt",
            Family::MomExt => "MomExt",
        };
        f.write_str(s)
    }
}

/// Outcome of a hierarchy test. For the extension families `Member` means
/// an extension was found and `NonMember` that none exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HierarchyStatus {
    Member,
    NonMember,
    Inconclusive,
}

/// Evidence attached to a hierarchy verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HierarchyCertificate {
    /// Verdict of the SOS test on `p_T(x⊙x)·‖x‖^{2r}`.
    Sos { verdict: Box<SosVerdict> },
    /// Smallest coefficient of `p_T·(Σx)^r`, computed in exact rational
    /// arithmetic from the binary values of `T`.
    PolyaCoefficient { exponent: OccupationVector, value: f64 },
    /// An order-`(n+r)` extension with its marginal mismatch.
    Extension {
        extension: SymTensorJson,
        marginal_error: f64,
        min_entry: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        min_moment_eigenvalue: Option<f64>,
    },
    /// `y` indexed by `labels` (the occupation vectors `|α| = n`) with
    /// `yᵀA ≤ 0` and `yᵀQ > 0` for the marginal system `A t = Q, t ≥ 0`.
    FarkasRay { labels: Vec<OccupationVector>, y: Vec<f64>, value: f64 },
    /// Infeasibility certificate of the moment extension system.
    Separator { certificate: FeasibilityCertificate },
    /// The input already fails the cone the family is contained in.
    Precondition { verdict: Box<ConeVerdict> },
}

/// A hierarchy verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyVerdict {
    pub family: Family,
    pub level: u32,
    pub status: HierarchyStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<HierarchyCertificate>,
    pub details: String,
}

impl HierarchyVerdict {
    pub fn is_member(&self) -> bool {
        self.status == HierarchyStatus::Member
    }

    pub fn is_non_member(&self) -> bool {
        self.status == HierarchyStatus::NonMember
    }

    /// The extension tensor of a feasible extension verdict.
    pub fn extension(&self) -> Option<SymTensor> {
        match &self.certificate {
            Some(HierarchyCertificate::Extension { extension, .. }) => extension.to_tensor().ok(),
            _ => None,
        }
    }
}
