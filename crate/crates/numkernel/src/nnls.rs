use crate::dense::{cholesky_solve, Matrix};

/// Solution of a nonnegative least squares problem.
#[derive(Clone, Debug, PartialEq)]
pub struct NnlsResult {
    pub x: Vec<f64>,
    /// `‖Ax − b‖₂`.
    pub residual: f64,
}

/// Lawson–Hanson active-set method for `min ‖Ax − b‖₂` subject to `x ≥ 0`.
///
/// Least squares subproblems on the passive set are solved through the
/// normal equations with a tiny ridge, which is adequate for the
/// well-scaled dictionaries this workspace builds.
pub fn nnls(a: &Matrix, b: &[f64]) -> NnlsResult {
    let n = a.cols;
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let tol = 1e-13 * bnorm;
    let residual_of = |x: &[f64]| -> Vec<f64> {
        a.mul_vec(x).iter().zip(b).map(|(p, q)| q - p).collect()
    };
    for _outer in 0..3 * n + 10 {
        let w = a.tr_mul_vec(&residual_of(&x));
        let cand = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&p, &q| w[p].total_cmp(&w[q]));
        let Some(t) = cand else { break };
        passive[t] = true;
        let mut guard = 0;
        loop {
            guard += 1;
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let z_p = match passive_ls(a, b, &idx) {
                Some(z) => z,
                None => {
                    passive[t] = false;
                    break;
                }
            };
            let mut z = vec![0.0; n];
            for (k, &j) in idx.iter().enumerate() {
                z[j] = z_p[k];
            }
            if idx.iter().all(|&j| z[j] > 0.0) || guard > n + 5 {
                for &j in &idx {
                    x[j] = z[j].max(0.0);
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for &j in &idx {
                if z[j] <= 0.0 {
                    let step = x[j] / (x[j] - z[j]);
                    if step < alpha {
                        alpha = step;
                    }
                }
            }
            for &j in &idx {
                x[j] += alpha * (z[j] - x[j]);
                if x[j] <= 1e-15 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    let r = residual_of(&x);
    NnlsResult { x, residual: r.iter().map(|v| v * v).sum::<f64>().sqrt() }
}

fn passive_ls(a: &Matrix, b: &[f64], idx: &[usize]) -> Option<Vec<f64>> {
    let k = idx.len();
    let mut g = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for (p, &jp) in idx.iter().enumerate() {
        for i in 0..a.rows {
            rhs[p] += a.get(i, jp) * b[i];
        }
        for (q, &jq) in idx.iter().enumerate().skip(p) {
            let v: f64 = (0..a.rows).map(|i| a.get(i, jp) * a.get(i, jq)).sum();
            g[p * k + q] = v;
            g[q * k + p] = v;
        }
    }
    let tr: f64 = (0..k).map(|p| g[p * k + p]).sum();
    for p in 0..k {
        g[p * k + p] += 1e-14 * tr.max(1e-300);
    }
    cholesky_solve(&g, k, &rhs).ok()
}
