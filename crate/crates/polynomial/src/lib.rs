//! Homogeneous real polynomials and their Newton polytopes.
//!
//! A symmetric tensor `T` of order `n` corresponds to the form
//! `p_T(x) = Σ_α multinomial(n,α)·T_α·x^α`.

use combinat::{enumerate_occupations, Bounds, CombinatError, OccupationVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use numkernel::{lp_feasibility_exact, ExactLpOutcome};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use symtensor::{SymTensor, TensorError};

/// Coefficients below this magnitude are dropped after arithmetic.
pub const COEFF_CUTOFF: f64 = 1e-14;

/// Errors raised by polynomial operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Combinat(#[from] CombinatError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// A homogeneous polynomial in `d` variables of degree `deg`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomPoly {
    d: usize,
    deg: u32,
    coeffs: BTreeMap<OccupationVector, f64>,
}

impl HomPoly {
    pub fn zero(d: usize, deg: u32) -> Self {
        HomPoly { d, deg, coeffs: BTreeMap::new() }
    }

    /// The constant polynomial `c`.
    pub fn constant(d: usize, c: f64) -> Self {
        let mut p = HomPoly::zero(d, 0);
        p.add_term(&OccupationVector::zeros(d), c);
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms(
        d: usize,
        deg: u32,
        terms: impl IntoIterator<Item = (OccupationVector, f64)>,
    ) -> Result<Self, PolyError> {
        let mut p = HomPoly::zero(d, deg);
        for (a, c) in terms {
            if a.dim() != d || a.order() != deg {
                return Err(PolyError::Shape(format!(
                    "exponent {a} does not have {d} variables and degree {deg}"
                )));
            }
            *p.coeffs.entry(a).or_insert(0.0) += c;
        }
        p.prune();
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^α` (zero when absent).
    pub fn coeff(&self, a: &OccupationVector) -> f64 {
        self.coeffs.get(a).copied().unwrap_or(0.0)
    }

    /// Nonzero terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, f64)> {
        self.coeffs.iter().map(|(a, c)| (a, *c))
    }

    /// Exponents with nonzero coefficient.
    pub fn support(&self) -> Vec<OccupationVector> {
        self.coeffs.keys().cloned().collect()
    }

    fn add_term(&mut self, a: &OccupationVector, c: f64) {
        *self.coeffs.entry(a.clone()).or_insert(0.0) += c;
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.abs() >= COEFF_CUTOFF);
    }

    /// `p(x)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms().map(|(a, c)| c * symtensor::monomial(x, a)).sum()
    }

    /// `p + s·q`.
    pub fn add_scaled(&self, other: &HomPoly, s: f64) -> Result<HomPoly, PolyError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, c) in other.terms() {
            out.add_term(a, s * c);
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> HomPoly {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= s;
        }
        out.prune();
        out
    }

    fn same_shape(&self, other: &HomPoly) -> Result<(), PolyError> {
        if self.d != other.d || self.deg != other.deg {
            return Err(PolyError::Shape(format!(
                "(d={}, deg={}) vs (d={}, deg={})",
                self.d, self.deg, other.d, other.deg
            )));
        }
        Ok(())
    }

    /// Product of two forms in the same variables.
    pub fn multiply(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        if self.d != other.d {
            return Err(PolyError::Shape(format!("{} vs {} variables", self.d, other.d)));
        }
        let mut out = HomPoly::zero(self.d, self.deg + other.deg);
        for (a, c) in self.terms() {
            for (b, e) in other.terms() {
                out.add_term(&a.add(b), c * e);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `p(x₁², …, x_d²)`.
    pub fn substitute_squares(&self) -> HomPoly {
        HomPoly {
            d: self.d,
            deg: 2 * self.deg,
            coeffs: self.coeffs.iter().map(|(a, c)| (a.scale(2), *c)).collect(),
        }
    }

    /// Variables dividing every monomial, with their minimal exponent.
    pub fn common_factor(&self) -> OccupationVector {
        let mut m: Option<Vec<u32>> = None;
        for a in self.coeffs.keys() {
            m = Some(match m {
                None => a.entries().to_vec(),
                Some(v) => v.iter().zip(a.entries()).map(|(p, q)| (*p).min(*q)).collect(),
            });
        }
        OccupationVector::new(m.unwrap_or_else(|| vec![0; self.d]))
    }

    /// Divides every monomial by `x^γ`; `γ` must divide each monomial.
    pub fn divide_monomial(&self, gamma: &OccupationVector) -> Result<HomPoly, PolyError> {
        let mut out = HomPoly::zero(self.d, self.deg - gamma.order().min(self.deg));
        for (a, c) in self.terms() {
            let q = a
                .checked_sub(gamma)
                .ok_or_else(|| PolyError::Domain(format!("x^{gamma} does not divide x^{a}")))?;
            out.coeffs.insert(q, c);
        }
        Ok(out)
    }

    /// Serializable form.
    pub fn to_json(&self) -> HomPolyJson {
        HomPolyJson {
            d: self.d,
            deg: self.deg,
            terms: self
                .terms()
                .map(|(a, c)| HomPolyTerm { exponent: a.entries().to_vec(), value: c })
                .collect(),
        }
    }
}

/// JSON form `{"d":…, "deg":…, "terms":[{"exponent":[…],"value":…}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomPolyJson {
    pub d: usize,
    pub deg: u32,
    pub terms: Vec<HomPolyTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomPolyTerm {
    pub exponent: Vec<u32>,
    pub value: f64,
}

impl HomPolyJson {
    pub fn to_poly(&self) -> Result<HomPoly, PolyError> {
        HomPoly::from_terms(
            self.d,
            self.deg,
            self.terms.iter().map(|t| (OccupationVector::new(t.exponent.clone()), t.value)),
        )
    }
}

/// `p_T` with `coeff(α) = multinomial(n,α)·T_α`.
pub fn poly_from_tensor(t: &SymTensor) -> Result<HomPoly, PolyError> {
    let mut p = HomPoly::zero(t.dim(), t.order());
    for (a, v) in t.iter() {
        if v != 0.0 {
            p.coeffs.insert(a.clone(), a.multinomial()? as f64 * v);
        }
    }
    Ok(p)
}

/// Inverse of [`poly_from_tensor`].
pub fn tensor_from_poly(p: &HomPoly) -> Result<SymTensor, PolyError> {
    let mut t = SymTensor::zeros_with_bounds(p.deg, p.d, &Bounds::relaxed())?;
    for (a, c) in p.terms() {
        t.set(a, c / a.multinomial()? as f64)?;
    }
    Ok(t)
}

/// `(x₁ + … + x_d)^r`.
pub fn power_of_linear_sum(d: usize, r: u32) -> Result<HomPoly, PolyError> {
    let mut p = HomPoly::zero(d, r);
    for a in enumerate_occupations(r, d) {
        let c = a.multinomial()? as f64;
        p.coeffs.insert(a, c);
    }
    Ok(p)
}

/// `(x₁² + … + x_d²)^r`.
pub fn norm_square_power(d: usize, r: u32) -> Result<HomPoly, PolyError> {
    Ok(power_of_linear_sum(d, r)?.substitute_squares())
}

fn rational(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Whether `point` lies in the convex hull of `vertices`, decided by an
/// exact rational LP.
pub fn in_convex_hull(vertices: &[OccupationVector], point: &[u32]) -> bool {
    if vertices.is_empty() {
        return false;
    }
    if vertices.iter().any(|v| v.entries() == point) {
        return true;
    }
    let d = point.len();
    let mut a: Vec<Vec<BigRational>> = (0..d)
        .map(|i| vertices.iter().map(|v| rational(v.entries()[i] as i64)).collect())
        .collect();
    a.push(vertices.iter().map(|_| rational(1)).collect());
    let mut b: Vec<BigRational> = point.iter().map(|&v| rational(v as i64)).collect();
    b.push(rational(1));
    matches!(lp_feasibility_exact(&a, &b), ExactLpOutcome::Feasible(_))
}

/// All `β` with `|β| = deg/2` and `2β` in the Newton polytope of `p`,
/// in ascending lexicographic order.
pub fn half_newton_basis(p: &HomPoly) -> Result<Vec<OccupationVector>, PolyError> {
    if !p.deg.is_multiple_of(2) {
        return Err(PolyError::Domain(format!("degree {} is odd", p.deg)));
    }
    let support = p.support();
    // Each coordinate of 2β is bounded by the per-variable extremes of the support.
    let (lo, hi): (Vec<u32>, Vec<u32>) = (0..p.d)
        .map(|i| {
            let col = support.iter().map(|a| a.entries()[i]);
            (col.clone().min().unwrap_or(0), col.max().unwrap_or(0))
        })
        .unzip();
    Ok(enumerate_occupations(p.deg / 2, p.d)
        .into_iter()
        .filter(|beta| {
            let twice: Vec<u32> = beta.entries().iter().map(|v| 2 * v).collect();
            twice.iter().zip(lo.iter().zip(&hi)).all(|(v, (l, h))| l <= v && v <= h)
                && in_convex_hull(&support, &twice)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(e: &[u32]) -> OccupationVector {
        OccupationVector::new(e.to_vec())
    }

    fn poly(d: usize, deg: u32, t: &[(&[u32], f64)]) -> HomPoly {
        HomPoly::from_terms(d, deg, t.iter().map(|(a, c)| (ov(a), *c))).unwrap()
    }

    #[test]
    fn tensor_bijection_examples() {
        let t = SymTensor::from_entries(2, 2, [(&ov(&[1, 1]), 0.5)]).unwrap();
        let p = poly_from_tensor(&t).unwrap();
        assert_eq!(p, poly(2, 2, &[(&[1, 1], 1.0)]));
        assert_eq!(tensor_from_poly(&p).unwrap(), t);
    }

    #[test]
    fn multiply_examples() {
        let a = poly(2, 1, &[(&[1, 0], 1.0), (&[0, 1], 1.0)]);
        let b = poly(2, 1, &[(&[1, 0], 1.0), (&[0, 1], -1.0)]);
        assert_eq!(a.multiply(&b).unwrap(), poly(2, 2, &[(&[2, 0], 1.0), (&[0, 2], -1.0)]));
        assert_eq!(
            a.multiply(&a).unwrap(),
            poly(2, 2, &[(&[2, 0], 1.0), (&[1, 1], 2.0), (&[0, 2], 1.0)])
        );
        assert_eq!(a.multiply(&HomPoly::constant(2, 1.0)).unwrap(), a);
    }

    #[test]
    fn power_examples() {
        assert_eq!(
            power_of_linear_sum(2, 2).unwrap(),
            poly(2, 2, &[(&[2, 0], 1.0), (&[1, 1], 2.0), (&[0, 2], 1.0)])
        );
        assert_eq!(
            norm_square_power(3, 1).unwrap(),
            poly(3, 2, &[(&[2, 0, 0], 1.0), (&[0, 2, 0], 1.0), (&[0, 0, 2], 1.0)])
        );
        assert_eq!(power_of_linear_sum(3, 0).unwrap(), HomPoly::constant(3, 1.0));
    }

    #[test]
    fn substitute_examples() {
        let p = poly(2, 2, &[(&[1, 1], 1.0)]);
        assert_eq!(p.substitute_squares(), poly(2, 4, &[(&[2, 2], 1.0)]));
        let m = poly(3, 3, &[(&[2, 1, 0], 1.0), (&[1, 2, 0], 1.0), (&[0, 0, 3], 1.0), (&[1, 1, 1], -3.0)]);
        let m6 = m.substitute_squares();
        assert_eq!(m6.degree(), 6);
        assert_eq!(m6.coeff(&ov(&[4, 2, 0])), 1.0);
        assert_eq!(m6.coeff(&ov(&[2, 2, 2])), -3.0);
        let c = HomPoly::constant(2, 3.0);
        assert_eq!(c.substitute_squares(), c);
    }

    #[test]
    fn half_newton_examples() {
        let m = poly(3, 3, &[(&[2, 1, 0], 1.0), (&[1, 2, 0], 1.0), (&[0, 0, 3], 1.0), (&[1, 1, 1], -3.0)]);
        let b = half_newton_basis(&m.substitute_squares()).unwrap();
        assert_eq!(b, vec![ov(&[0, 0, 3]), ov(&[1, 1, 1]), ov(&[1, 2, 0]), ov(&[2, 1, 0])]);
        let q = norm_square_power(2, 2).unwrap();
        assert_eq!(half_newton_basis(&q).unwrap(), vec![ov(&[0, 2]), ov(&[1, 1]), ov(&[2, 0])]);
        let single = poly(3, 4, &[(&[2, 0, 2], 5.0)]);
        assert_eq!(half_newton_basis(&single).unwrap(), vec![ov(&[1, 0, 1])]);
        assert!(half_newton_basis(&poly(2, 1, &[(&[1, 0], 1.0)])).is_err());
    }

    #[test]
    fn factor_helpers() {
        let p = poly(3, 4, &[(&[2, 1, 1], 1.0), (&[1, 2, 1], -2.0)]);
        assert_eq!(p.common_factor(), ov(&[1, 1, 1]));
        let q = p.divide_monomial(&ov(&[1, 1, 1])).unwrap();
        assert_eq!(q, poly(3, 1, &[(&[1, 0, 0], 1.0), (&[0, 1, 0], -2.0)]));
    }

    #[test]
    fn json_round_trip() {
        let p = poly(2, 2, &[(&[1, 1], 1.5)]);
        assert_eq!(p.to_json().to_poly().unwrap(), p);
    }
}
