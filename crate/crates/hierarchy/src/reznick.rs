//! Reznick (RSOS) and Polya (PNN) levels.

use crate::{Family, HierarchyCertificate, HierarchyError, HierarchyStatus, HierarchyVerdict};
use combinat::{enumerate_occupations, OccupationVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use numkernel::NumericContext;
use polynomial::{norm_square_power, poly_from_tensor};
use soscone::{is_sos_poly, SosStatus};
use std::collections::BTreeMap;
use symtensor::SymTensor;

/// Member of `RSOS(n,r)`: `p_T(x⊙x)·‖x‖^{2r}` is a sum of squares.
pub fn rsos_member(t: &SymTensor, r: u32, ctx: &NumericContext) -> Result<HierarchyVerdict, HierarchyError> {
    let p = poly_from_tensor(t)
        .and_then(|p| p.substitute_squares().multiply(&norm_square_power(t.dim(), r)?))
        .map_err(|e| HierarchyError::Sos(e.to_string()))?;
    let v = is_sos_poly(&p, ctx).map_err(|e| HierarchyError::Sos(e.to_string()))?;
    let status = match v.status {
        SosStatus::Sos => HierarchyStatus::Member,
        SosStatus::NotSos => HierarchyStatus::NonMember,
        SosStatus::Inconclusive => HierarchyStatus::Inconclusive,
    };
    Ok(HierarchyVerdict {
        family: Family::Rsos,
        level: r,
        status,
        details: v.details.clone(),
        certificate: Some(HierarchyCertificate::Sos { verdict: Box::new(v) }),
    })
}

/// Exact coefficients of `p_T·(Σx)^r`, keyed by exponent.
///
/// Every `f64` is a dyadic rational, so the expansion is exact in the
/// values actually stored in `T`.
pub fn polya_coefficients(t: &SymTensor, r: u32) -> BTreeMap<OccupationVector, BigRational> {
    let deltas: Vec<(OccupationVector, BigRational)> = enumerate_occupations(r, t.dim())
        .into_iter()
        .map(|dl| {
            let m = BigRational::from_integer(BigInt::from(dl.multinomial().expect("small order")));
            (dl, m)
        })
        .collect();
    let mut out: BTreeMap<OccupationVector, BigRational> = BTreeMap::new();
    for (alpha, v) in t.iter() {
        if v == 0.0 {
            continue;
        }
        let c = BigRational::from_float(v).expect("finite entry")
            * BigRational::from_integer(BigInt::from(alpha.multinomial().expect("small order")));
        for (dl, m) in &deltas {
            let e = out.entry(alpha.add(dl)).or_insert_with(|| BigRational::from_integer(BigInt::from(0)));
            *e += &c * m;
        }
    }
    out
}

/// Member of `PNN(n,r)`: every coefficient of `p_T·(Σx)^r` is at least
/// `−ctx.eps_pnn`.
pub fn pnn_member(t: &SymTensor, r: u32, ctx: &NumericContext) -> HierarchyVerdict {
    let coeffs = polya_coefficients(t, r);
    let fallback = OccupationVector::unit(t.dim(), 0, t.order() + r);
    let (exponent, value) = coeffs
        .iter()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(a, v)| (a.clone(), v.to_f64().unwrap_or(f64::NAN)))
        .unwrap_or((fallback, 0.0));
    let member = value >= -ctx.eps_pnn;
    HierarchyVerdict {
        family: Family::Pnn,
        level: r,
        status: if member { HierarchyStatus::Member } else { HierarchyStatus::NonMember },
        details: format!("smallest coefficient {value:e} at {exponent}"),
        certificate: Some(HierarchyCertificate::PolyaCoefficient { exponent, value }),
    }
}
