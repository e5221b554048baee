use crate::dense::{DenseSym, KernelError};
use serde::{Deserialize, Serialize};

/// Eigendecomposition `M = V Λ Vᵀ` with eigenvalues in ascending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Eigenvectors; `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

impl SymEigen {
    /// Reassembles `V Λ Vᵀ`, optionally with a transformed spectrum.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DenseSym {
        let m = self.values.len();
        let lam: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        DenseSym::from_fn(m, |i, j| {
            (0..m).map(|k| lam[k] * self.vectors[k][i] * self.vectors[k][j]).sum()
        })
    }
}

/// Cyclic Jacobi eigenvalue algorithm.
///
/// Each sweep visits every off-diagonal pair `(p,q)` and applies the plane
/// rotation that annihilates it. Sweeps stop when the off-diagonal mass
/// falls below `1e−15‖M‖_F` or after 100 sweeps.
pub fn sym_eig(m: &DenseSym) -> Result<SymEigen, KernelError> {
    let n = m.size();
    if m.data().iter().any(|x| !x.is_finite()) {
        return Err(KernelError::NonFinite);
    }
    let mut a = m.data().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm = m.frobenius();
    let target = (1e-15 * norm).powi(2);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        if off <= target || norm == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
        .collect();
    Ok(SymEigen { values, vectors })
}

/// Outcome of a semidefiniteness test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Unit eigenvector of the smallest eigenvalue; when the test fails,
    /// `vᵀ M v < 0` certifies it.
    pub min_eigenvector: Vec<f64>,
    /// The absolute threshold that was applied.
    pub threshold: f64,
}

/// PSD iff `λ_min ≥ −ε · max(1, ‖M‖_∞)`.
pub fn psd_check(m: &DenseSym, eps: f64) -> Result<PsdCheck, KernelError> {
    let threshold = eps * m.norm_inf().max(1.0);
    if m.size() == 0 {
        return Ok(PsdCheck {
            is_psd: true,
            min_eigenvalue: 0.0,
            min_eigenvector: vec![],
            threshold,
        });
    }
    let e = sym_eig(m)?;
    let min_eigenvalue = e.values[0];
    Ok(PsdCheck {
        is_psd: min_eigenvalue >= -threshold,
        min_eigenvalue,
        min_eigenvector: e.vectors[0].clone(),
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn identity_spectrum() {
        let e = sym_eig(&DenseSym::identity(4)).unwrap();
        assert!(close(&e.values, &[1.0; 4], 1e-15));
    }

    #[test]
    fn swap_matrix_spectrum() {
        let e = sym_eig(&DenseSym::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()).unwrap();
        assert!(close(&e.values, &[-1.0, 1.0], 1e-14));
    }

    #[test]
    fn ones_matrix_spectrum() {
        let ones = DenseSym::from_fn(3, |_, _| 1.0);
        let e = sym_eig(&ones).unwrap();
        assert!(close(&e.values, &[0.0, 0.0, 3.0], 1e-13));
    }

    #[test]
    fn psd_examples() {
        let ones = DenseSym::from_fn(3, |_, _| 1.0);
        assert!(psd_check(&ones, 1e-8).unwrap().is_psd);
        let swap = DenseSym::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = psd_check(&swap, 1e-8).unwrap();
        assert!(!c.is_psd);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = &c.min_eigenvector;
        assert!((v[0].abs() - s).abs() < 1e-12 && (v[0] + v[1]).abs() < 1e-12);
        assert!(swap.quad_form(v) < 0.0);
    }

    #[test]
    fn pentagon_dnn_matrix_is_psd() {
        let c = 2.0 * (std::f64::consts::PI / 5.0).cos();
        let a = DenseSym::from_fn(5, |i, j| {
            let gap = (j + 5 - i) % 5;
            match gap {
                0 => c,
                1 | 4 => 1.0,
                _ => 0.0,
            }
        });
        let chk = psd_check(&a, 1e-8).unwrap();
        assert!(chk.is_psd);
        assert!(chk.min_eigenvalue.abs() < 1e-12);
    }
}
