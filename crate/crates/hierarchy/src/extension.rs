//! Extension hierarchies `NNExt` and `MomExt` and their state and witness
//! forms.

use crate::reznick::{pnn_member, rsos_member};
use crate::{Family, HierarchyCertificate, HierarchyError, HierarchyStatus, HierarchyVerdict};
use cones::{is_mom, is_nn, ConeVerdict};
use combinat::{enumerate_occupations, OccupationVector};
use dsmatrix::DSMatrix;
use numkernel::{
    lp_feasibility, verify_farkas, BlockProblem, ConstraintTerm, FeasibilityCertificate,
    FeasibilityStatus, NumericContext, SolveOptions,
};
use symtensor::SymTensor;

/// The marginal system `A t = Q` of an order-`(n+r)` extension.
///
/// Rows are indexed by `|α| = n` and columns by `|β| = n+r`, both in
/// lexicographic order; `A[α][β] = multinomial(r, β−α)` when `α ≤ β`.
pub fn nn_ext_system(n: u32, d: usize, r: u32) -> (Vec<OccupationVector>, Vec<OccupationVector>, Vec<Vec<f64>>) {
    let rows = enumerate_occupations(n, d);
    let cols = enumerate_occupations(n + r, d);
    let a = rows
        .iter()
        .map(|alpha| {
            cols.iter()
                .map(|beta| beta.checked_sub(alpha).map_or(0.0, |dl| dl.weight()))
                .collect()
        })
        .collect();
    (rows, cols, a)
}

/// Independent check of an `NNExt` Farkas ray: `yᵀA ≤ 0` columnwise and
/// `yᵀQ > 0`, both to `tol`.
pub fn check_nn_ext_farkas(q: &SymTensor, r: u32, y: &[f64], tol: f64) -> bool {
    let (_, _, a) = nn_ext_system(q.order(), q.dim(), r);
    y.len() == a.len() && verify_farkas(&a, q.values(), y, tol)
}

fn max_abs(t: &SymTensor) -> f64 {
    t.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn extension_certificate(q: &SymTensor, t: SymTensor, r: u32, moment_eig: Option<f64>) -> (f64, HierarchyCertificate) {
    let marg = t.marginal(r).expect("extension order is n + r");
    let err = marg
        .values()
        .iter()
        .zip(q.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let min_entry = t.values().iter().copied().fold(f64::INFINITY, f64::min);
    (
        err,
        HierarchyCertificate::Extension {
            extension: t.to_json(),
            marginal_error: err,
            min_entry,
            min_moment_eigenvalue: moment_eig,
        },
    )
}

fn precondition_failure(family: Family, r: u32, v: cones::ConeVerdict) -> HierarchyVerdict {
    HierarchyVerdict {
        family,
        level: r,
        status: HierarchyStatus::NonMember,
        details: format!("input fails {}: {}", v.cone, v.details),
        certificate: Some(HierarchyCertificate::Precondition { verdict: Box::new(v) }),
    }
}

/// Whether `Q` is the marginal of an entrywise nonnegative order-`(n+r)`
/// tensor, decided by a phase-one LP.
///
/// A feasible verdict carries the extension (marginal mismatch at most
/// `1e−9·max(1, ‖Q‖_∞)`); an infeasible one carries a verified Farkas ray.
pub fn nn_ext_feasible(q: &SymTensor, r: u32, ctx: &NumericContext) -> HierarchyVerdict {
    let nn = is_nn(q, ctx.eps_nn);
    if !nn.is_member() {
        return precondition_failure(Family::NnExt, r, nn);
    }
    let scale = max_abs(q);
    if scale == 0.0 {
        let t = SymTensor::zeros_with_bounds(q.order() + r, q.dim(), &combinat::Bounds::relaxed())
            .expect("relaxed bounds");
        let (_, cert) = extension_certificate(q, t, r, None);
        return HierarchyVerdict {
            family: Family::NnExt,
            level: r,
            status: HierarchyStatus::Member,
            details: "zero tensor".into(),
            certificate: Some(cert),
        };
    }
    let (rows, cols, a) = nn_ext_system(q.order(), q.dim(), r);
    let b: Vec<f64> = q.values().iter().map(|v| v / scale).collect();
    let lp = lp_feasibility(&a, &b, ctx.eps_lp);
    match lp.status {
        FeasibilityStatus::Feasible(x) => {
            let t = SymTensor::from_entries(
                q.order() + r,
                q.dim(),
                cols.iter().zip(x.iter().map(|v| v * scale)),
            )
            .expect("columns enumerate the extension order");
            let (err, cert) = extension_certificate(q, t, r, None);
            let ok = err <= 1e-9 * scale.max(1.0);
            HierarchyVerdict {
                family: Family::NnExt,
                level: r,
                status: if ok { HierarchyStatus::Member } else { HierarchyStatus::Inconclusive },
                details: format!("extension found, marginal error {err:e}"),
                certificate: Some(cert),
            }
        }
        FeasibilityStatus::Infeasible(FeasibilityCertificate::FarkasRay { y }) => {
            let value: f64 = y.iter().zip(q.values()).map(|(p, s)| p * s).sum();
            HierarchyVerdict {
                family: Family::NnExt,
                level: r,
                status: HierarchyStatus::NonMember,
                details: format!("Farkas ray with yᵀQ = {value:e}"),
                certificate: Some(HierarchyCertificate::FarkasRay { labels: rows, y, value }),
            }
        }
        _ => HierarchyVerdict {
            family: Family::NnExt,
            level: r,
            status: HierarchyStatus::Inconclusive,
            details: format!("LP inconclusive after {} pivots", lp.iterations),
            certificate: None,
        },
    }
}

/// Whether `Q` is the marginal of an order-`(n+r)` moment tensor.
///
/// Unknowns are the extension entries (as scalar PSD blocks, hence
/// nonnegative) and every moment matrix `ℳ^(α,j)`, `1 ≤ j ≤ ⌊(n+r)/2⌋`, of
/// the extension, tied together by equality constraints. The returned
/// extension is re-verified by [`is_mom`].
pub fn mom_ext_feasible(q: &SymTensor, r: u32, ctx: &NumericContext) -> Result<HierarchyVerdict, HierarchyError> {
    let n = q.order();
    let d = q.dim();
    let pre = is_mom(q, n / 2, ctx.eps_psd).map_err(|e| HierarchyError::Cone(e.to_string()))?;
    if !pre.is_member() {
        return Ok(precondition_failure(Family::MomExt, r, pre));
    }
    let nn = nn_ext_feasible(q, r, ctx);
    if nn.is_non_member() {
        return Ok(HierarchyVerdict { family: Family::MomExt, details: format!("NNExt fails: {}", nn.details), ..nn });
    }
    let scale = max_abs(q);
    let m = n + r;
    let top = m / 2;
    let cols = enumerate_occupations(m, d);
    let flattenings: Vec<(OccupationVector, Vec<OccupationVector>)> = (1..=top)
        .flat_map(|j| {
            let labels = enumerate_occupations(j, d);
            enumerate_occupations(m - 2 * j, d).into_iter().map(move |alpha| (alpha, labels.clone()))
        })
        .collect();
    let mut sizes = vec![1; cols.len()];
    sizes.extend(flattenings.iter().map(|(_, labels)| labels.len()));
    let mut problem = BlockProblem::new(sizes);
    for (b, (alpha, labels)) in flattenings.iter().enumerate() {
        let block = cols.len() + b;
        for p in 0..labels.len() {
            for s in p..labels.len() {
                let beta = alpha.add(&labels[p]).add(&labels[s]);
                problem.add_constraint(
                    vec![
                        ConstraintTerm { block, i: p, j: s, coef: 1.0 },
                        ConstraintTerm { block: beta.rank(), i: 0, j: 0, coef: -1.0 },
                    ],
                    0.0,
                );
            }
        }
    }
    let (_, _, a) = nn_ext_system(n, d, r);
    for (row, qa) in a.iter().zip(q.values()) {
        let terms = row
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(col, c)| ConstraintTerm { block: col, i: 0, j: 0, coef: *c })
            .collect();
        problem.add_constraint(terms, qa / scale.max(f64::MIN_POSITIVE));
    }
    let opts = SolveOptions { eps: ctx.eps_feas, max_iter: ctx.max_iter, polish: ctx.polish };
    let extension_of = |point: &[numkernel::DenseSym]| -> Result<(SymTensor, ConeVerdict), HierarchyError> {
        let t = SymTensor::from_entries(m, d, cols.iter().zip(point.iter().map(|g| g.get(0, 0) * scale)))
            .expect("columns enumerate the extension order");
        let check = is_mom(&t, top, ctx.eps_psd).map_err(|e| HierarchyError::Cone(e.to_string()))?;
        Ok((t, check))
    };
    let mut sol = problem.solve(&opts);
    if let FeasibilityStatus::Feasible(point) = &sol.status {
        // The moment matrices rebuilt from the scalar unknowns differ from
        // the PSD blocks by the affine residual; a tighter solve moves a
        // point that fails the re-check by that margin.
        if !extension_of(point)?.1.is_member() {
            let tight = problem.solve(&SolveOptions { eps: 1e-4 * opts.eps, ..opts });
            if matches!(tight.status, FeasibilityStatus::Feasible(_)) {
                sol = tight;
            }
        }
    }
    let verdict = match sol.status {
        FeasibilityStatus::Feasible(point) => {
            let (t, check) = extension_of(&point)?;
            let eig = match &check.certificate {
                Some(cones::ConeCertificate::MomentSpectrum { min_eigenvalue, .. }) => Some(*min_eigenvalue),
                Some(cones::ConeCertificate::MomentEigenvector { eigenvalue, .. }) => Some(*eigenvalue),
                _ => None,
            };
            let (err, cert) = extension_certificate(q, t, r, eig);
            let ok = check.is_member() && err <= 10.0 * ctx.eps_feas * scale.max(1.0);
            HierarchyVerdict {
                family: Family::MomExt,
                level: r,
                status: if ok { HierarchyStatus::Member } else { HierarchyStatus::Inconclusive },
                details: format!(
                    "extension after {} iterations, marginal error {err:e}, {}",
                    sol.iterations, check.details
                ),
                certificate: Some(cert),
            }
        }
        FeasibilityStatus::Infeasible(certificate) => HierarchyVerdict {
            family: Family::MomExt,
            level: r,
            status: HierarchyStatus::NonMember,
            details: format!("infeasible after {} iterations", sol.iterations),
            certificate: Some(HierarchyCertificate::Separator { certificate }),
        },
        FeasibilityStatus::Inconclusive => HierarchyVerdict {
            family: Family::MomExt,
            level: r,
            status: HierarchyStatus::Inconclusive,
            details: format!(
                "no extension within {} iterations (residual {:e})",
                sol.iterations, sol.affine_residual
            ),
            certificate: None,
        },
    };
    Ok(verdict)
}

/// Bosonic (`ppt = false`) or PPT bosonic (`ppt = true`) `r`-extendibility
/// of a DS state, decided on `Q[X]`. It suffices to search over DS
/// extensions.
pub fn ds_extendibility(
    x: &DSMatrix,
    r: u32,
    ppt: bool,
    ctx: &NumericContext,
) -> Result<HierarchyVerdict, HierarchyError> {
    let q = x.q_view();
    if ppt {
        mom_ext_feasible(&q, r, ctx)
    } else {
        Ok(nn_ext_feasible(&q, r, ctx))
    }
}

/// The DS extension state carried by a feasible verdict.
pub fn extension_state(v: &HierarchyVerdict) -> Option<DSMatrix> {
    v.extension().map(|t| DSMatrix::lambda_from_q(&t))
}

/// Whether `O` is an extendibility witness (`W[O] ∈ PNN(n,r)`) or, with
/// `decomposable`, a decomposable one (`W[O] ∈ RSOS(n,r)`).
pub fn ext_witness_check(
    o: &DSMatrix,
    r: u32,
    decomposable: bool,
    ctx: &NumericContext,
) -> Result<HierarchyVerdict, HierarchyError> {
    let w = o.w_view();
    if decomposable {
        rsos_member(&w, r, ctx)
    } else {
        Ok(pnn_member(&w, r, ctx))
    }
}
