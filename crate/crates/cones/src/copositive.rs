//! Numerical minimization of `p_T` over the probability simplex.

use crate::mom::ConeError;
use combinat::{enumerate_occupations, sym_dim};
use polynomial::{poly_from_tensor, HomPoly};
use serde::{Deserialize, Serialize};
use symtensor::SymTensor;

/// Smallest value of `p_T` found on the simplex. A negative value proves
/// that `T` is not copositive; a nonnegative value is only evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopositiveMin {
    pub value: f64,
    pub argmin: Vec<f64>,
    pub evaluations: usize,
}

/// Euclidean projection onto `{x ≥ 0, Σx = 1}`.
fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut s = y.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (k, v) in s.iter().enumerate() {
        acc += v;
        let t = (acc - 1.0) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|v| (v - theta).max(0.0)).collect()
}

fn gradient(p: &HomPoly, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    for (a, c) in p.terms() {
        for (i, gi) in g.iter_mut().enumerate() {
            let ai = a.entries()[i];
            if ai == 0 {
                continue;
            }
            let mut m = c * ai as f64;
            for (l, &al) in a.entries().iter().enumerate() {
                let e = if l == i { al - 1 } else { al };
                m *= x[l].powi(e as i32);
            }
            *gi += m;
        }
    }
    g
}

struct Search<'a> {
    p: &'a HomPoly,
    evaluations: usize,
}

impl Search<'_> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        self.p.eval(x)
    }

    /// Moves mass `h` between coordinates while that lowers `p`, shrinking
    /// `h` by a factor of three per level.
    fn pattern(&mut self, mut x: Vec<f64>, mut fx: f64, mut h: f64, depth: u32) -> (Vec<f64>, f64) {
        let d = x.len();
        for _ in 0..=depth {
            for _ in 0..200 {
                let mut best: Option<(Vec<f64>, f64)> = None;
                for i in 0..d {
                    for j in 0..d {
                        if i == j || x[j] <= 0.0 {
                            continue;
                        }
                        let step = h.min(x[j]);
                        let mut y = x.clone();
                        y[i] += step;
                        y[j] -= step;
                        let fy = self.eval(&y);
                        if fy < best.as_ref().map_or(fx, |b| b.1) {
                            best = Some((y, fy));
                        }
                    }
                }
                match best {
                    Some((y, fy)) => {
                        x = y;
                        fx = fy;
                    }
                    None => break,
                }
            }
            h /= 3.0;
        }
        (x, fx)
    }

    /// Projected gradient descent with backtracking.
    fn descend(&mut self, mut x: Vec<f64>, mut fx: f64) -> (Vec<f64>, f64) {
        let mut step = 1.0;
        for _ in 0..300 {
            let g = gradient(self.p, &x);
            let mut accepted = false;
            while step > 1e-14 {
                let y = project_simplex(&x.iter().zip(&g).map(|(a, b)| a - step * b).collect::<Vec<_>>());
                let fy = self.eval(&y);
                if fy < fx {
                    let moved: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
                    x = y;
                    fx = fy;
                    accepted = moved > 1e-16;
                    step *= 2.0;
                    break;
                }
                step /= 2.0;
            }
            if !accepted {
                break;
            }
        }
        (x, fx)
    }
}

/// Minimizes `p_T(x)` over the probability simplex by a uniform grid with
/// face barycenters, `grid_depth` levels of local refinement around the
/// best grid points, and projected gradient descent.
pub fn copositive_min(t: &SymTensor, grid_depth: u32) -> Result<CopositiveMin, ConeError> {
    let p = poly_from_tensor(t).map_err(|e| ConeError::Domain(e.to_string()))?;
    let d = t.dim();
    let mut search = Search { p: &p, evaluations: 0 };
    let mut m = 1u32;
    while sym_dim(m + 1, d) <= 4000 && m < 2000 {
        m += 1;
    }
    let mut points: Vec<Vec<f64>> = enumerate_occupations(m, d)
        .iter()
        .map(|a| a.entries().iter().map(|&v| v as f64 / m as f64).collect())
        .collect();
    if d <= 12 {
        for mask in 1u32..(1 << d) {
            let k = mask.count_ones() as f64;
            points.push((0..d).map(|i| if mask >> i & 1 == 1 { 1.0 / k } else { 0.0 }).collect());
        }
    }
    let mut scored: Vec<(f64, Vec<f64>)> = points.into_iter().map(|x| (search.eval(&x), x)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = scored[0].clone();
    for (fx, x) in scored.into_iter().take(12) {
        let (y, fy) = search.pattern(x, fx, 1.0 / m as f64, grid_depth);
        let (z, fz) = search.descend(y, fy);
        if fz < best.0 {
            best = (fz, z);
        }
    }
    Ok(CopositiveMin { value: best.0, argmin: best.1, evaluations: search.evaluations })
}
