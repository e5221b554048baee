//! Sum-of-squares tensors.
//!
//! `T` is an SOS tensor when `p_T(x⊙x)` is a sum of squares of forms. The
//! test first looks for exact obstructions on the monomial supports and
//! only then solves the Gram feasibility problem numerically.

use combinat::OccupationVector;
use numkernel::{FeasibilityCertificate, NumericContext, SolveOptions};
use polynomial::{poly_from_tensor, HomPoly, PolyError};
use serde::{Deserialize, Serialize};
use symtensor::SymTensor;

mod gram;
mod obstruction;

pub use gram::{gram_reexpansion_error, GramBlock, GramSystem};
pub use obstruction::{
    choi_lam_copositive_minimum, choi_lam_params, choi_lam_sos_minimum, newton_obstruction,
    strip_square_factor,
};

/// Errors raised by the SOS tests.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SosError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SosStatus {
    Sos,
    NotSos,
    Inconclusive,
}

/// Reason why a form is not a sum of squares.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SosObstruction {
    /// A monomial of the target that no product of two basis monomials
    /// (times an allowed multiplier) produces.
    UnreachableMonomial { exponent: OccupationVector, coefficient: f64 },
    /// A negative coefficient at an exponent reachable only from diagonal
    /// Gram entries, which are nonnegative in any decomposition. For the
    /// plain Gram problem the exponent is `2·half`.
    DiagonalOnly { exponent: OccupationVector, coefficient: f64, half: Option<OccupationVector> },
    /// Symmetric cubic `aM₃ + bM₁M₂ + cM₁³` whose `p*(t) = a + bt + ct²` is
    /// negative at `t ∈ {1} ∪ [2,d]`.
    ChoiLam { a: f64, b: f64, c: f64, d: usize, t: f64, value: f64 },
    /// Numerical infeasibility certificate of the Gram system.
    Numeric { certificate: FeasibilityCertificate },
}

impl SosObstruction {
    /// Whether the obstruction follows from exact support and sign reasoning.
    pub fn is_exact(&self) -> bool {
        !matches!(self, SosObstruction::Numeric { .. })
    }
}

/// Outcome of an SOS test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SosVerdict {
    pub status: SosStatus,
    /// Structured level, absent for the plain SOS test.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    /// Square monomial `x^{2γ}` divided out before the test (`γ` stored).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stripped_factor: Option<OccupationVector>,
    /// Monomial basis of the plain Gram problem.
    pub basis: Vec<OccupationVector>,
    pub gram: Vec<GramBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<SosObstruction>,
    /// Largest coefficient mismatch of the Gram certificate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reexpansion_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    pub iterations: usize,
    pub details: String,
}

impl SosVerdict {
    pub fn is_sos(&self) -> bool {
        self.status == SosStatus::Sos
    }

    pub fn is_not_sos(&self) -> bool {
        self.status == SosStatus::NotSos
    }

    fn not_sos(level: Option<u32>, obstruction: SosObstruction, details: String) -> Self {
        SosVerdict {
            status: SosStatus::NotSos,
            level,
            stripped_factor: None,
            basis: vec![],
            gram: vec![],
            obstruction: Some(obstruction),
            reexpansion_error: None,
            min_eigenvalue: None,
            iterations: 0,
            details,
        }
    }
}

fn solve_options(ctx: &NumericContext) -> SolveOptions {
    SolveOptions { eps: ctx.eps_feas, max_iter: ctx.max_iter, polish: ctx.polish }
}

/// Exact obstructions for `p` being SOS. Returns the stripped factor, the
/// reduced form, its half-Newton basis and an obstruction if one applies.
fn exact_sos_analysis(
    p: &HomPoly,
) -> Result<(OccupationVector, HomPoly, Vec<OccupationVector>, Option<SosObstruction>), SosError> {
    let (gamma, q) = strip_square_factor(p)?;
    if q.is_zero() {
        return Ok((gamma, q, vec![], None));
    }
    if q.degree() % 2 == 1 {
        return Err(SosError::Domain("odd degree".into()));
    }
    let basis = polynomial::half_newton_basis(&q)?;
    let system = GramSystem::plain(&q, &basis);
    if let Some(ob) = system.exact_obstruction() {
        return Ok((gamma, q, basis, Some(ob)));
    }
    if let Some((a, b, c)) = choi_lam_params(&q) {
        let d = q.num_vars();
        let (t, value) = choi_lam_sos_minimum(a, b, c, d);
        if value < 0.0 {
            return Ok((gamma, q, basis, Some(SosObstruction::ChoiLam { a, b, c, d, t, value })));
        }
    }
    Ok((gamma, q, basis, None))
}

/// SOS test of a form of even degree.
pub fn is_sos_poly(p: &HomPoly, ctx: &NumericContext) -> Result<SosVerdict, SosError> {
    if p.degree() % 2 == 1 && !p.is_zero() {
        return Err(SosError::Domain(format!("degree {} is odd", p.degree())));
    }
    let (gamma, q, basis, obstruction) = exact_sos_analysis(p)?;
    let stripped = (gamma.order() > 0).then(|| gamma.clone());
    if let Some(ob) = obstruction {
        let mut v = SosVerdict::not_sos(None, ob, "exact obstruction".into());
        v.stripped_factor = stripped;
        v.basis = basis;
        return Ok(v);
    }
    if q.is_zero() {
        return Ok(SosVerdict {
            status: SosStatus::Sos,
            level: None,
            stripped_factor: stripped,
            basis,
            gram: vec![],
            obstruction: None,
            reexpansion_error: Some(0.0),
            min_eigenvalue: None,
            iterations: 0,
            details: "zero form".into(),
        });
    }
    let system = GramSystem::plain(&q, &basis);
    let mut v = system.solve(&q, ctx);
    v.stripped_factor = stripped;
    v.basis = basis;
    Ok(v)
}

/// Whether `p_T(x⊙x)` is a sum of squares.
pub fn is_sos_tensor(t: &SymTensor, ctx: &NumericContext) -> Result<SosVerdict, SosError> {
    is_sos_poly(&poly_from_tensor(t)?.substitute_squares(), ctx)
}

/// Membership of `p_T` in `cone{x^α ψ : |α| = n − 2j, j ≤ l, ψ SOS}`.
///
/// Exact obstructions of the plain SOS test (which contains this cone) are
/// consulted first.
pub fn structured_sos_level(t: &SymTensor, l: u32, ctx: &NumericContext) -> Result<SosVerdict, SosError> {
    let n = t.order();
    if 2 * l > n {
        return Err(SosError::Domain(format!("level {l} exceeds ⌊{n}/2⌋")));
    }
    let p = poly_from_tensor(t)?;
    let sq = p.substitute_squares();
    if let (_, _, _, Some(ob)) = exact_sos_analysis(&sq)? {
        return Ok(SosVerdict::not_sos(Some(l), ob, "obstruction of the full SOS cone".into()));
    }
    let system = GramSystem::structured(&p, l);
    if let Some(ob) = system.exact_obstruction() {
        return Ok(SosVerdict::not_sos(Some(l), ob, "exact obstruction at this level".into()));
    }
    let mut v = system.solve(&p, ctx);
    if v.status == SosStatus::Inconclusive && l > 0 {
        // A certificate at a lower level is one at this level with the
        // higher multiplier blocks set to zero. The smaller system is
        // sometimes solved where the larger one stalls near a face.
        let lower = structured_sos_level(t, l - 1, ctx)?;
        if lower.is_sos() {
            v = SosVerdict { details: format!("{} (certified at level {})", lower.details, l - 1), ..lower };
        }
    }
    v.level = Some(l);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(e: &[u32]) -> OccupationVector {
        OccupationVector::new(e.to_vec())
    }

    fn motzkin() -> SymTensor {
        SymTensor::from_entries(
            3,
            3,
            [
                (&ov(&[2, 1, 0]), 1.0 / 3.0),
                (&ov(&[1, 2, 0]), 1.0 / 3.0),
                (&ov(&[0, 0, 3]), 1.0),
                (&ov(&[1, 1, 1]), -0.5),
            ],
        )
        .unwrap()
    }

    fn robinson() -> SymTensor {
        SymTensor::from_fn(3, 3, |a| match a.support().len() {
            1 => 1.0,
            2 => -1.0 / 3.0,
            _ => 0.5,
        })
        .unwrap()
    }

    #[test]
    fn diagonal_identity_is_sos() {
        let t = SymTensor::from_entries(2, 2, [(&ov(&[2, 0]), 1.0), (&ov(&[0, 2]), 1.0)]).unwrap();
        let v = is_sos_tensor(&t, &NumericContext::default()).unwrap();
        assert!(v.is_sos(), "{v:?}");
        assert!(v.reexpansion_error.unwrap() < 1e-8);
    }

    #[test]
    fn motzkin_has_newton_obstruction() {
        let v = is_sos_tensor(&motzkin(), &NumericContext::default()).unwrap();
        assert!(v.is_not_sos());
        assert_eq!(
            v.obstruction,
            Some(SosObstruction::DiagonalOnly {
                exponent: ov(&[2, 2, 2]),
                coefficient: -3.0,
                half: Some(ov(&[1, 1, 1])),
            })
        );
        assert_eq!(v.basis, vec![ov(&[0, 0, 3]), ov(&[1, 1, 1]), ov(&[1, 2, 0]), ov(&[2, 1, 0])]);
    }

    #[test]
    fn robinson_fails_choi_lam_criterion() {
        let v = is_sos_tensor(&robinson(), &NumericContext::default()).unwrap();
        match v.obstruction {
            Some(SosObstruction::ChoiLam { a, b, c, t, value, .. }) => {
                assert_eq!((a, b, c), (3.0, -2.5, 0.5));
                assert_eq!(t, 2.5);
                assert_eq!(value, -0.125);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn structured_levels() {
        let ctx = NumericContext::default();
        // [[1,−1],[−1,1]] is PSD, so it lies in the level-1 cone but not level 0.
        let t = SymTensor::from_entries(2, 2, [(&ov(&[2, 0]), 1.0), (&ov(&[1, 1]), -1.0), (&ov(&[0, 2]), 1.0)])
            .unwrap();
        assert!(structured_sos_level(&t, 0, &ctx).unwrap().is_not_sos());
        let v = structured_sos_level(&t, 1, &ctx).unwrap();
        assert!(v.is_sos(), "{v:?}");
        assert!(structured_sos_level(&motzkin(), 1, &ctx).unwrap().is_not_sos());
        assert!(structured_sos_level(&motzkin(), 2, &ctx).is_err());
        let nn = SymTensor::from_fn(3, 2, |_| 0.25).unwrap();
        assert!(structured_sos_level(&nn, 0, &ctx).unwrap().is_sos());
    }
}
