//! Entrywise nonnegativity and moment-matrix positivity.

use crate::{ConeCertificate, ConeStatus, ConeVerdict};
use numkernel::psd_check;
use symtensor::{SymTensor, TensorError};

/// Errors raised by the cone tests.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConeError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical kernel failure: {0}")]
    Kernel(String),
}

/// Member iff `min_α T_α ≥ −eps`.
pub fn is_nn(t: &SymTensor, eps: f64) -> ConeVerdict {
    let (alpha, value) = t
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(a, v)| (a.clone(), v))
        .expect("tensors are never empty");
    let member = value >= -eps;
    ConeVerdict {
        cone: "NN".into(),
        level: None,
        status: if member { ConeStatus::Member } else { ConeStatus::NonMember },
        certificate: Some(if member {
            ConeCertificate::MinEntry { alpha, value }
        } else {
            ConeCertificate::NegativeEntry { alpha, value }
        }),
        residual: Some((-value).max(0.0)),
        seed: None,
        details: format!("min entry {value:e}"),
    }
}

/// Checks a list of `(α, j)` moment matrices for positivity after an NN test.
fn moment_test(
    t: &SymTensor,
    blocks: &[(combinat::OccupationVector, u32)],
    eps: f64,
    cone: &str,
    level: u32,
) -> Result<ConeVerdict, ConeError> {
    let nn = is_nn(t, eps);
    if !nn.is_member() {
        return Ok(ConeVerdict { cone: cone.into(), level: Some(level), ..nn });
    }
    let mut min_eig = f64::INFINITY;
    for (alpha, j) in blocks {
        let flat = t.moment_matrix(alpha, *j)?;
        let chk = psd_check(&flat.matrix, eps).map_err(|e| ConeError::Kernel(e.to_string()))?;
        if !chk.is_psd {
            return Ok(ConeVerdict {
                cone: cone.into(),
                level: Some(level),
                status: ConeStatus::NonMember,
                residual: Some(-chk.min_eigenvalue),
                certificate: Some(ConeCertificate::MomentEigenvector {
                    alpha: alpha.clone(),
                    j: *j,
                    labels: flat.labels,
                    eigenvalue: chk.min_eigenvalue,
                    threshold: chk.threshold,
                    eigenvector: chk.min_eigenvector,
                }),
                seed: None,
                details: format!("moment matrix ({alpha}, {j}) has eigenvalue {:e}", chk.min_eigenvalue),
            });
        }
        min_eig = min_eig.min(chk.min_eigenvalue);
    }
    Ok(ConeVerdict {
        cone: cone.into(),
        level: Some(level),
        status: ConeStatus::Member,
        residual: Some((-min_eig).max(0.0).min(f64::MAX)),
        certificate: Some(ConeCertificate::MomentSpectrum {
            min_eigenvalue: if blocks.is_empty() { 0.0 } else { min_eig },
            blocks: blocks.len(),
        }),
        seed: None,
        details: format!("{} moment matrices PSD", blocks.len()),
    })
}

/// Member of `Mom(n,k)`: `T ∈ NN` and `M^(α,j) ⪰ 0` for every `1 ≤ j ≤ k`
/// and every `|α| = n − 2j`.
pub fn is_mom(t: &SymTensor, k: u32, eps: f64) -> Result<ConeVerdict, ConeError> {
    let n = t.order();
    if 2 * k > n {
        return Err(ConeError::Domain(format!("level {k} exceeds ⌊{n}/2⌋")));
    }
    let mut blocks = Vec::new();
    for j in 1..=k {
        for alpha in combinat::enumerate_occupations(n - 2 * j, t.dim()) {
            blocks.push((alpha, j));
        }
    }
    moment_test(t, &blocks, eps, "Mom", k)
}

/// Exact separability test for qubit DS states (`d = 2`): `T ∈ NN` plus
/// positivity of the two most balanced moment matrices.
pub fn qubit_separability(t: &SymTensor, eps: f64) -> Result<ConeVerdict, ConeError> {
    if t.dim() != 2 {
        return Err(ConeError::Domain(format!("qubit test needs d = 2, got {}", t.dim())));
    }
    let n = t.order();
    let m = n / 2;
    let ov = |a: u32, b: u32| combinat::OccupationVector::new(vec![a, b]);
    let mut blocks = Vec::new();
    if n.is_multiple_of(2) {
        if m >= 1 {
            blocks.push((ov(0, 0), m));
            blocks.push((ov(1, 1), m - 1));
        }
    } else {
        blocks.push((ov(1, 0), m));
        blocks.push((ov(0, 1), m));
    }
    blocks.retain(|(_, j)| *j >= 1);
    moment_test(t, &blocks, eps, "Sep", m)
}
