use serde::{Deserialize, Serialize};

/// Errors raised by the dense kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: max asymmetry {0:e}")]
    NotSymmetric(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("linear system is singular or not positive definite")]
    Singular,
}

/// A real symmetric `m×m` matrix stored densely in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseSym {
    m: usize,
    data: Vec<f64>,
}

impl DenseSym {
    /// Accepts row-major data whose asymmetry is at most `1e−12` relative to
    /// the largest entry; the two triangles are then averaged.
    pub fn new(m: usize, data: Vec<f64>) -> Result<Self, KernelError> {
        if data.len() != m * m {
            return Err(KernelError::Dimension(format!(
                "expected {} entries, got {}",
                m * m,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(KernelError::NonFinite);
        }
        let scale = data.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        let mut out = DenseSym { m, data };
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in i + 1..m {
                let a = out.data[i * m + j];
                let b = out.data[j * m + i];
                worst = worst.max((a - b).abs());
                let avg = 0.5 * (a + b);
                out.data[i * m + j] = avg;
                out.data[j * m + i] = avg;
            }
        }
        if worst > 1e-12 * scale {
            return Err(KernelError::NotSymmetric(worst));
        }
        Ok(out)
    }

    /// Builds the matrix from a function evaluated on the upper triangle.
    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v = f(i, j);
                data[i * m + j] = v;
                data[j * m + i] = v;
            }
        }
        DenseSym { m, data }
    }

    /// Builds the matrix from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, KernelError> {
        let m = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != m) {
            return Err(KernelError::NotSquare { rows: m, cols: r.len() });
        }
        DenseSym::new(m, rows.iter().flatten().copied().collect())
    }

    pub fn zeros(m: usize) -> Self {
        DenseSym { m, data: vec![0.0; m * m] }
    }

    pub fn identity(m: usize) -> Self {
        DenseSym::from_fn(m, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        DenseSym::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    /// Sets entries `(i,j)` and `(j,i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.m + j] = v;
        self.data[j * self.m + i] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.m.max(1)).take(self.m).map(|r| r.to_vec()).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Induced ∞-norm (largest absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.m).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `uᵀ M v`.
    pub fn quad_form_pair(&self, u: &[f64], v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(u).map(|(a, b)| a * b).sum()
    }

    /// Frobenius inner product `⟨A, B⟩`.
    pub fn inner(&self, other: &DenseSym) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn add_scaled(&self, other: &DenseSym, s: f64) -> DenseSym {
        DenseSym {
            m: self.m,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> DenseSym {
        DenseSym { m: self.m, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// `M + t I`.
    pub fn shift(&self, t: f64) -> DenseSym {
        let mut out = self.clone();
        for i in 0..self.m {
            out.data[i * self.m + i] += t;
        }
        out
    }
}

/// A general real matrix stored densely in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, KernelError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(KernelError::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.iter().flatten().copied().collect() })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Mᵀ y`.
    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            if *yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += yi * a;
            }
        }
        out
    }
}

/// Solves `A x = b` for a symmetric positive definite `A` given row-major.
pub fn cholesky_solve(a: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>, KernelError> {
    if a.len() != n * n || b.len() != n {
        return Err(KernelError::Dimension("cholesky_solve".into()));
    }
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return Err(KernelError::Singular);
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Ok(x)
}
