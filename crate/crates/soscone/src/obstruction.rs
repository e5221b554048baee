//! Exact non-SOS reasoning on supports and on symmetric cubics.

use crate::gram::GramSystem;
use crate::{SosError, SosObstruction};
use combinat::{enumerate_occupations, OccupationVector};
use polynomial::{half_newton_basis, HomPoly};

/// Writes `p = x^{2γ}·q` with `γ` maximal. Since `x_v² q = Σ f_k²` forces
/// every `f_k` to vanish on `x_v = 0`, `p` is SOS exactly when `q` is.
pub fn strip_square_factor(p: &HomPoly) -> Result<(OccupationVector, HomPoly), SosError> {
    if p.is_zero() {
        return Ok((OccupationVector::zeros(p.num_vars()), p.clone()));
    }
    let common = p.common_factor();
    let gamma = OccupationVector::new(common.entries().iter().map(|v| v / 2).collect());
    let q = p.divide_monomial(&gamma.scale(2))?;
    Ok((gamma, q))
}

/// Support obstruction on the half-Newton basis of `p`: an exponent of `p`
/// outside `B + B`, or a negative coefficient at `2β` whose only
/// representation in `B + B` is `β + β`.
pub fn newton_obstruction(p: &HomPoly) -> Result<Option<SosObstruction>, SosError> {
    let basis = half_newton_basis(p)?;
    Ok(GramSystem::plain(p, &basis).exact_obstruction())
}

/// Recognizes `q = r(x⊙x)` with `r = aM₃ + bM₁M₂ + cM₁³` in `d ≥ 3`
/// variables (`M_k = Σ x_i^k`) and returns `(a, b, c)`.
pub fn choi_lam_params(q: &HomPoly) -> Option<(f64, f64, f64)> {
    let d = q.num_vars();
    if d < 3 || q.degree() != 6 || q.terms().any(|(a, _)| a.entries().iter().any(|v| v % 2 == 1)) {
        return None;
    }
    // Coefficient of x^{2α} keyed by the sorted shape of α.
    let mut by_shape: [Option<f64>; 3] = [None, None, None];
    for alpha in enumerate_occupations(3, d) {
        let c = q.coeff(&alpha.scale(2));
        let slot = 3 - alpha.support().len();
        match by_shape[slot] {
            None => by_shape[slot] = Some(c),
            Some(prev) if prev == c => {}
            Some(_) => return None,
        }
    }
    let [Some(k1), Some(k2), Some(k3)] = [by_shape[2], by_shape[1], by_shape[0]] else {
        return None;
    };
    // x₁³ ↦ a + b + c, x₁²x₂ ↦ b + 3c, x₁x₂x₃ ↦ 6c.
    let c = k3 / 6.0;
    let b = k2 - 3.0 * c;
    let a = k1 - b - c;
    Some((a, b, c))
}

fn pstar(a: f64, b: f64, c: f64, t: f64) -> f64 {
    a + b * t + c * t * t
}

/// Minimum of `p*(t) = a + bt + ct²` over `{1} ∪ [2, d]`, with its argmin.
pub fn choi_lam_sos_minimum(a: f64, b: f64, c: f64, d: usize) -> (f64, f64) {
    let mut cands = vec![1.0];
    if d >= 2 {
        cands.extend([2.0, d as f64]);
        if c > 0.0 {
            let v = -b / (2.0 * c);
            if v > 2.0 && v < d as f64 {
                cands.push(v);
            }
        }
    }
    cands
        .into_iter()
        .map(|t| (t, pstar(a, b, c, t)))
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Minimum of `p*(k)` over the integers `k ∈ [1, d]`, with its argmin.
pub fn choi_lam_copositive_minimum(a: f64, b: f64, c: f64, d: usize) -> (usize, f64) {
    (1..=d.max(1))
        .map(|k| (k, pstar(a, b, c, k as f64)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}
