use crate::sdp::{FeasibilityCertificate, FeasibilityStatus, FeasibilityVerdict};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar field used by the simplex tableau.
///
/// `f64` uses a small pivot tolerance; `BigRational` is exact.
pub trait LpScalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Values at or below this magnitude are treated as zero.
    fn tolerance() -> Self;
    fn abs_val(&self) -> Self;
    fn to_f64(&self) -> f64;
}

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn tolerance() -> Self {
        1e-11
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn tolerance() -> Self {
        Zero::zero()
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Raw outcome of phase one.
enum PhaseOne<S> {
    Feasible { x: Vec<S>, pivots: usize },
    Infeasible { y: Vec<S>, pivots: usize },
}

/// Phase-one simplex for `A x = b, x ≥ 0` with Bland's anti-cycling rule.
///
/// Rows with negative right-hand side are negated, one artificial variable
/// is attached to every row and their sum is minimized. A positive optimum
/// yields the dual vector `y` with `yᵀA ≤ 0` and `yᵀb > 0`.
fn phase_one<S: LpScalar>(a: &[Vec<S>], b: &[S]) -> PhaseOne<S> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let width = n + m + 1;
    let tol = S::tolerance();
    let mut sign = vec![S::one(); m];
    let mut t: Vec<Vec<S>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i] < S::zero();
        if flip {
            sign[i] = -S::one();
        }
        let mut row = Vec::with_capacity(width);
        for j in 0..n {
            row.push(if flip { -a[i][j].clone() } else { a[i][j].clone() });
        }
        for k in 0..m {
            row.push(if k == i { S::one() } else { S::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(row);
    }
    // Reduced costs of the phase-one objective (last entry: −objective).
    let mut cost = vec![S::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] = cost[j].clone() - row[j].clone();
        }
        cost[width - 1] = cost[width - 1].clone() - row[width - 1].clone();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0usize;
    loop {
        let neg_tol = -tol.clone();
        let entering = (0..n + m).find(|&j| cost[j] < neg_tol);
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, S)> = None;
        for i in 0..m {
            if t[i][e] > tol {
                let ratio = t[i][width - 1].clone() / t[i][e].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // The phase-one objective is bounded below, so a column with a
        // negative reduced cost always has a positive pivot candidate.
        let Some((r, _)) = leave else { break };
        pivot(&mut t, &mut cost, r, e);
        basis[r] = e;
        pivots += 1;
    }
    let objective = -cost[width - 1].clone();
    if objective > tol.clone() * scale_of(b) {
        // Artificial column k has reduced cost 1 − y'_k.
        let y: Vec<S> = (0..m)
            .map(|k| (S::one() - cost[n + k].clone()) * sign[k].clone())
            .collect();
        return PhaseOne::Infeasible { y, pivots };
    }
    let mut x = vec![S::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    PhaseOne::Feasible { x, pivots }
}

fn scale_of<S: LpScalar>(b: &[S]) -> S {
    let mut s = S::one();
    for v in b {
        let a = v.abs_val();
        if a > s {
            s = a;
        }
    }
    s
}

fn pivot<S: LpScalar>(t: &mut [Vec<S>], cost: &mut [S], r: usize, e: usize) {
    let width = t[r].len();
    let p = t[r][e].clone();
    for j in 0..width {
        t[r][j] = t[r][j].clone() / p.clone();
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let f = row[e].clone();
        if f == S::zero() {
            continue;
        }
        for j in 0..width {
            row[j] = row[j].clone() - f.clone() * pivot_row[j].clone();
        }
    }
    let f = cost[e].clone();
    if f != S::zero() {
        for j in 0..width {
            cost[j] = cost[j].clone() - f.clone() * pivot_row[j].clone();
        }
    }
}

/// Checks `x ≥ −tol` and `‖Ax − b‖_∞ ≤ tol · max(1, ‖b‖_∞)`.
pub fn verify_lp_point(a: &[Vec<f64>], b: &[f64], x: &[f64], tol: f64) -> bool {
    let scale = b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    x.iter().all(|&v| v >= -tol)
        && a.iter().zip(b).all(|(row, bi)| {
            let ax: f64 = row.iter().zip(x).map(|(p, q)| p * q).sum();
            (ax - bi).abs() <= tol * scale
        })
}

/// Checks a Farkas ray: every entry of `yᵀA` is at most `tol·‖y‖_∞·‖A‖_∞`
/// and `yᵀb > tol·‖y‖_∞`.
///
/// Such a `y` proves that `Ax = b, x ≥ 0` has no solution, since any
/// solution would give `0 < yᵀb = (yᵀA)x ≤ 0`.
pub fn verify_farkas(a: &[Vec<f64>], b: &[f64], y: &[f64], tol: f64) -> bool {
    let ynorm = y.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if ynorm == 0.0 {
        return false;
    }
    let anorm = a.iter().flatten().fold(1.0f64, |s, v| s.max(v.abs()));
    let n = a.first().map_or(0, |r| r.len());
    let yb: f64 = y.iter().zip(b).map(|(p, q)| p * q).sum();
    let columns_ok = (0..n).all(|j| {
        let v: f64 = a.iter().zip(y).map(|(row, yi)| row[j] * yi).sum();
        v <= tol * ynorm * anorm
    });
    columns_ok && yb > tol * ynorm
}

/// Feasibility of `A x = b, x ≥ 0` by phase-one simplex in `f64`.
///
/// Feasible points are checked to `tol` (absolute, relative to `‖b‖_∞`);
/// infeasible verdicts carry a Farkas ray normalised to `‖y‖_∞ = 1` and
/// checked by [`verify_farkas`]. When the floating tableau produces a
/// result that fails its own check the verdict is inconclusive.
pub fn lp_feasibility(a: &[Vec<f64>], b: &[f64], tol: f64) -> FeasibilityVerdict<Vec<f64>> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    if b.len() != m || a.iter().any(|r| r.len() != n) {
        return FeasibilityVerdict {
            status: FeasibilityStatus::Inconclusive,
            iterations: 0,
            affine_residual: f64::INFINITY,
            cone_residual: f64::INFINITY,
        };
    }
    match phase_one(a, b) {
        PhaseOne::Feasible { x, pivots } => {
            let scale = b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
            let res = a
                .iter()
                .zip(b)
                .map(|(row, bi)| {
                    (row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() - bi).abs()
                })
                .fold(0.0f64, f64::max)
                / scale;
            let x: Vec<f64> = x.into_iter().map(|v| v.max(0.0)).collect();
            let status = if verify_lp_point(a, b, &x, tol) {
                FeasibilityStatus::Feasible(x)
            } else {
                FeasibilityStatus::Inconclusive
            };
            FeasibilityVerdict { status, iterations: pivots, affine_residual: res, cone_residual: 0.0 }
        }
        PhaseOne::Infeasible { y, pivots } => {
            let ynorm = y.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            let y: Vec<f64> = y.iter().map(|v| v / ynorm).collect();
            let status = if verify_farkas(a, b, &y, tol) {
                FeasibilityStatus::Infeasible(FeasibilityCertificate::FarkasRay { y })
            } else {
                FeasibilityStatus::Inconclusive
            };
            FeasibilityVerdict { status, iterations: pivots, affine_residual: f64::INFINITY, cone_residual: 0.0 }
        }
    }
}

/// Outcome of the exact rational phase-one simplex.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactLpOutcome {
    Feasible(Vec<BigRational>),
    /// `y` with `yᵀA ≤ 0` and `yᵀb > 0` in exact arithmetic.
    Infeasible(Vec<BigRational>),
}

/// Exact feasibility of `A x = b, x ≥ 0` over the rationals.
pub fn lp_feasibility_exact(a: &[Vec<BigRational>], b: &[BigRational]) -> ExactLpOutcome {
    match phase_one(a, b) {
        PhaseOne::Feasible { x, .. } => ExactLpOutcome::Feasible(x),
        PhaseOne::Infeasible { y, .. } => ExactLpOutcome::Infeasible(y),
    }
}
