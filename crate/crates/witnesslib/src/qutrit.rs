//! The three-qutrit DS state with `Q` constant on each orbit shape:
//! `Q_(3,0,0) = p`, `Q_(2,1,0) = q`, `Q_(1,1,1) = r`.
//!
//! Trace one reads `3p + 18q + 6r = 1`. The level-one moment matrices are
//! all permutations of `[[p,q,q],[q,q,r],[q,r,q]]`, which is PSD iff
//! `q ≥ r` and `p(q+r) ≥ 2q²`. The pairing with the Robinson witness is
//! `3p + 3r − 6q`.

use combinat::OccupationVector;
use dsmatrix::DSMatrix;
use symtensor::SymTensor;

/// Optimizer of the Robinson pairing over the PPT family.
#[derive(Clone, Debug, PartialEq)]
pub struct Qutrit3Result {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    /// `3p + 3r − 6q` at the returned point.
    pub eta: f64,
    pub state: DSMatrix,
    pub grid_points: usize,
    pub refinement_steps: usize,
}

const GRID: usize = 200;
const STEP_FLOOR: f64 = 1e-10;

fn p_of(q: f64, r: f64) -> f64 {
    (1.0 - 18.0 * q - 6.0 * r) / 3.0
}

fn feasible(q: f64, r: f64) -> bool {
    let p = p_of(q, r);
    r >= 0.0 && q >= r && p >= q && p * (q + r) >= 2.0 * q * q
}

/// `3p + 3r − 6q` with `p` eliminated by the normalization.
pub fn qutrit3_objective(q: f64, r: f64) -> f64 {
    3.0 * p_of(q, r) + 3.0 * r - 6.0 * q
}

/// The DS state with orbit values `(p, q, r)`.
pub fn qutrit3_state(p: f64, q: f64, r: f64) -> DSMatrix {
    let t = SymTensor::from_fn(3, 3, |a: &OccupationVector| match a.support().len() {
        1 => p,
        2 => q,
        _ => r,
    })
    .expect("order 3, dimension 3");
    DSMatrix::lambda_from_q(&t)
}

/// Largest feasible `r` for a given `q`, which minimizes the objective
/// `1 − 24q − 3r` along that line.
///
/// With `p` eliminated, `3·(p(q+r) − 2q²) = −6r² + (1−24q)r + q − 24q²`
/// is concave in `r`, so the feasible `r` form an interval whose right end
/// is the larger root, capped by `r ≤ q` and `p ≥ q ⇔ r ≤ (1−21q)/6`.
fn best_r(q: f64) -> Option<f64> {
    let (a, b, c) = (-6.0, 1.0 - 24.0 * q, q - 24.0 * q * q);
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let root = (-b - disc.sqrt()) / (2.0 * a);
    let r = root.min(q).min((1.0 - 21.0 * q) / 6.0);
    if r >= 0.0 && feasible(q, r) {
        Some(r)
    } else if feasible(q, 0.0) {
        Some(0.0)
    } else {
        None
    }
}

/// Grid search on `(q, r)` over `q ∈ [0, 1/21]`, `r ∈ [0, q]` (the region
/// allowed by `p ≥ q ≥ r ≥ 0`), followed by coordinate descent with step
/// halving down to `1e−10`: moves in `q` are paired with the optimal `r`
/// for the new `q`, which keeps iterates on the curved boundary. Ties are
/// broken lexicographically on `(q, r)`.
pub fn qutrit3_search() -> Qutrit3Result {
    let qmax = 1.0 / 21.0;
    let mut best: Option<(f64, f64, f64)> = None;
    let mut grid_points = 0;
    for i in 0..GRID {
        let q = qmax * i as f64 / (GRID - 1) as f64;
        for j in 0..GRID {
            let r = q * j as f64 / (GRID - 1) as f64;
            grid_points += 1;
            if !feasible(q, r) {
                continue;
            }
            let f = qutrit3_objective(q, r);
            if best.is_none_or(|(bf, _, _)| f < bf) {
                best = Some((f, q, r));
            }
        }
    }
    let (mut f, mut q, mut r) = best.expect("the point q = r = 0 is feasible");
    if let Some(rb) = best_r(q) {
        let fb = qutrit3_objective(q, rb);
        if fb < f {
            (f, r) = (fb, rb);
        }
    }
    let mut h = qmax / (GRID - 1) as f64;
    let mut steps = 0;
    while h > STEP_FLOOR {
        let mut moved = false;
        for dq in [h, -h] {
            let qn = q + dq;
            if let Some(rn) = best_r(qn) {
                let fn_ = qutrit3_objective(qn, rn);
                if fn_ < f {
                    (f, q, r) = (fn_, qn, rn);
                    moved = true;
                    steps += 1;
                    break;
                }
            }
        }
        if !moved {
            h /= 2.0;
        }
    }
    let p = p_of(q, r);
    Qutrit3Result { p, q, r, eta: f, state: qutrit3_state(p, q, r), grid_points, refinement_steps: steps }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimum_lies_on_the_moment_boundary() {
        let res = qutrit3_search();
        assert!(res.eta > -0.03 && res.eta < -0.015, "η* = {}", res.eta);
        let slack = res.p * (res.q + res.r) - 2.0 * res.q * res.q;
        assert!((0.0..1e-8).contains(&slack), "slack {slack:e}");
        assert!((res.state.trace() - 1.0).abs() < 1e-12);
    }
}
