use crate::dense::{cholesky_solve, DenseSym};
use crate::eig::sym_eig;
use serde::{Deserialize, Serialize};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// One term `coef · G_block[i][j]` of a linear constraint on a symmetric
/// block-diagonal unknown. `(i,j)` and `(j,i)` address the same entry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintTerm {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub coef: f64,
}

/// A point of a block problem: one symmetric matrix per block.
pub type BlockPoint = Vec<DenseSym>;

/// Machine-checkable reasons for infeasibility.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeasibilityCertificate {
    /// `yᵀA ≤ 0` and `yᵀb > 0` for a linear system with nonnegative unknowns.
    FarkasRay { y: Vec<f64> },
    /// `Σ y_k A_k = 0` while `yᵀb ≠ 0`: the affine constraints are inconsistent.
    InconsistentSystem { y: Vec<f64> },
    /// `S = Σ y_k A_k` has `λ_max(S) ≤ max_eigenvalue` and `yᵀb = value > 0`,
    /// so every PSD point satisfying the constraints has trace at least
    /// `trace_bound = value / max_eigenvalue` (infinite when `S ⪯ 0`).
    PsdSeparator { y: Vec<f64>, max_eigenvalue: f64, value: f64, trace_bound: f64 },
}

/// Three-valued status of a feasibility search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "payload", rename_all = "snake_case")]
pub enum FeasibilityStatus<P> {
    Feasible(P),
    Infeasible(FeasibilityCertificate),
    Inconclusive,
}

/// Status plus bookkeeping of a feasibility search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict<P> {
    pub status: FeasibilityStatus<P>,
    pub iterations: usize,
    /// Largest constraint violation of the reported point, relative to
    /// `max(1, ‖b‖_∞)`.
    pub affine_residual: f64,
    /// Magnitude of the most negative eigenvalue of the last affine iterate.
    pub cone_residual: f64,
}

impl<P> FeasibilityVerdict<P> {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, FeasibilityStatus::Feasible(_))
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self.status, FeasibilityStatus::Infeasible(_))
    }
}

/// Budgets and tolerances of [`BlockProblem::solve`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub eps: f64,
    pub max_iter: usize,
    pub polish: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { eps: 1e-8, max_iter: 5000, polish: true }
    }
}

/// Find `G = diag(G_1, …, G_B)` with every `G_b ⪰ 0` and
/// `Σ_terms coef·G_b[i][j] = rhs_k` for every constraint `k`.
///
/// Blocks of size one are nonnegative scalars.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockProblem {
    pub block_sizes: Vec<usize>,
    pub constraints: Vec<Vec<ConstraintTerm>>,
    pub rhs: Vec<f64>,
}

/// Orthonormalised constraint system in scaled half-vectorised coordinates.
struct AffineProjector {
    /// Orthonormal rows spanning the constraint row space.
    q: Vec<Vec<f64>>,
    /// Right-hand sides matching `q`.
    beta: Vec<f64>,
    /// `q[l] = Σ_k comb[l][k] · row_k` in terms of the original constraints.
    comb: Vec<Vec<f64>>,
}

impl BlockProblem {
    pub fn new(block_sizes: Vec<usize>) -> Self {
        BlockProblem { block_sizes, constraints: vec![], rhs: vec![] }
    }

    pub fn add_constraint(&mut self, terms: Vec<ConstraintTerm>, rhs: f64) {
        self.constraints.push(terms);
        self.rhs.push(rhs);
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.block_sizes.len() + 1);
        let mut acc = 0;
        for &m in &self.block_sizes {
            off.push(acc);
            acc += m * (m + 1) / 2;
        }
        off.push(acc);
        off
    }

    fn var_index(off: &[usize], sizes: &[usize], b: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let m = sizes[b];
        off[b] + i * (2 * m - i + 1) / 2 + (j - i)
    }

    /// Number of scalar unknowns in half-vectorised form.
    pub fn num_vars(&self) -> usize {
        *self.offsets().last().unwrap_or(&0)
    }

    /// `⟨A_k, G⟩` for every constraint.
    pub fn evaluate(&self, point: &[DenseSym]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|terms| terms.iter().map(|t| t.coef * point[t.block].get(t.i, t.j)).sum())
            .collect()
    }

    /// Largest violation relative to `max(1, ‖b‖_∞)`.
    pub fn affine_residual(&self, point: &[DenseSym]) -> f64 {
        let scale = self.rhs.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        self.evaluate(point)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / scale
    }

    /// `Σ_k y_k A_k` as one symmetric matrix per block.
    pub fn combine(&self, y: &[f64]) -> Vec<DenseSym> {
        let mut out: Vec<Vec<f64>> = self.block_sizes.iter().map(|&m| vec![0.0; m * m]).collect();
        for (terms, &yk) in self.constraints.iter().zip(y) {
            if yk == 0.0 {
                continue;
            }
            for t in terms {
                let m = self.block_sizes[t.block];
                let buf = &mut out[t.block];
                if t.i == t.j {
                    buf[t.i * m + t.i] += yk * t.coef;
                } else {
                    buf[t.i * m + t.j] += 0.5 * yk * t.coef;
                    buf[t.j * m + t.i] += 0.5 * yk * t.coef;
                }
            }
        }
        out.into_iter()
            .zip(&self.block_sizes)
            .map(|(buf, &m)| DenseSym::from_fn(m, |i, j| buf[i * m + j]))
            .collect()
    }

    fn dense_rows(&self) -> Vec<Vec<f64>> {
        let off = self.offsets();
        let nv = off[self.block_sizes.len()];
        self.constraints
            .iter()
            .map(|terms| {
                let mut r = vec![0.0; nv];
                for t in terms {
                    let k = Self::var_index(&off, &self.block_sizes, t.block, t.i, t.j);
                    r[k] += if t.i == t.j { t.coef } else { t.coef / SQRT2 };
                }
                r
            })
            .collect()
    }

    fn unpack(&self, s: &[f64]) -> Vec<DenseSym> {
        let off = self.offsets();
        self.block_sizes
            .iter()
            .enumerate()
            .map(|(b, &m)| {
                DenseSym::from_fn(m, |i, j| {
                    let v = s[Self::var_index(&off, &self.block_sizes, b, i, j)];
                    if i == j { v } else { v / SQRT2 }
                })
            })
            .collect()
    }

    fn pack(&self, blocks: &[DenseSym], s: &mut [f64]) {
        let off = self.offsets();
        for (b, g) in blocks.iter().enumerate() {
            let m = self.block_sizes[b];
            for i in 0..m {
                for j in i..m {
                    let k = Self::var_index(&off, &self.block_sizes, b, i, j);
                    s[k] = if i == j { g.get(i, j) } else { g.get(i, j) * SQRT2 };
                }
            }
        }
    }

    /// Modified Gram–Schmidt (applied twice) on the constraint rows.
    fn projector(&self) -> Result<AffineProjector, FeasibilityCertificate> {
        let rows = self.dense_rows();
        let k_total = rows.len();
        let bscale = self.rhs.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        let mut q: Vec<Vec<f64>> = vec![];
        let mut beta: Vec<f64> = vec![];
        let mut comb: Vec<Vec<f64>> = vec![];
        for (k, row) in rows.iter().enumerate() {
            let norm0 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut v = row.clone();
            let mut c = vec![0.0; k_total];
            c[k] = 1.0;
            let mut bk = self.rhs[k];
            for _pass in 0..2 {
                for l in 0..q.len() {
                    let dot: f64 = v.iter().zip(&q[l]).map(|(a, b)| a * b).sum();
                    if dot == 0.0 {
                        continue;
                    }
                    for (a, b) in v.iter_mut().zip(&q[l]) {
                        *a -= dot * b;
                    }
                    for (a, b) in c.iter_mut().zip(&comb[l]) {
                        *a -= dot * b;
                    }
                    bk -= dot * beta[l];
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= 1e-10 * norm0.max(1e-300) || norm0 == 0.0 {
                if bk.abs() > 1e-9 * bscale {
                    return Err(FeasibilityCertificate::InconsistentSystem { y: c });
                }
                continue;
            }
            q.push(v.iter().map(|x| x / norm).collect());
            comb.push(c.iter().map(|x| x / norm).collect());
            beta.push(bk / norm);
        }
        Ok(AffineProjector { q, beta, comb })
    }

    fn project_affine(p: &AffineProjector, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for (ql, bl) in p.q.iter().zip(&p.beta) {
            let r: f64 = ql.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - bl;
            if r != 0.0 {
                for (o, a) in out.iter_mut().zip(ql) {
                    *o -= r * a;
                }
            }
        }
        out
    }

    /// Projects every block onto the PSD cone; returns the most negative
    /// eigenvalue encountered (as a nonnegative magnitude).
    fn project_cone(&self, s: &[f64]) -> (Vec<f64>, f64) {
        let blocks = self.unpack(s);
        let mut worst = 0.0f64;
        let projected: Vec<DenseSym> = blocks
            .iter()
            .map(|g| {
                if g.size() == 0 {
                    return DenseSym::zeros(0);
                }
                if g.size() == 1 {
                    worst = worst.max(-g.get(0, 0));
                    return DenseSym::from_fn(1, |_, _| g.get(0, 0).max(0.0));
                }
                match sym_eig(g) {
                    Ok(e) => {
                        worst = worst.max(-e.values[0]);
                        e.reconstruct_with(|l| l.max(0.0))
                    }
                    Err(_) => DenseSym::zeros(g.size()),
                }
            })
            .collect();
        let mut out = vec![0.0; s.len()];
        self.pack(&projected, &mut out);
        (out, worst.max(0.0))
    }

    fn separator(&self, p: &AffineProjector, gap: &[f64]) -> Option<FeasibilityCertificate> {
        let z: Vec<f64> = p.q.iter().map(|ql| ql.iter().zip(gap).map(|(a, b)| a * b).sum()).collect();
        let mut y = vec![0.0; self.constraints.len()];
        for (zl, cl) in z.iter().zip(&p.comb) {
            for (yk, ck) in y.iter_mut().zip(cl) {
                *yk += zl * ck;
            }
        }
        let ymax = y.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if ymax == 0.0 || !ymax.is_finite() {
            return None;
        }
        for v in y.iter_mut() {
            *v /= ymax;
        }
        let cert = self.check_separator(&y)?;
        Some(cert)
    }

    fn check_separator(&self, y: &[f64]) -> Option<FeasibilityCertificate> {
        let value: f64 = y.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
        if !(value > 0.0) {
            return None;
        }
        let mut max_eigenvalue = f64::NEG_INFINITY;
        for s in self.combine(y) {
            if s.size() == 0 {
                continue;
            }
            let e = sym_eig(&s).ok()?;
            max_eigenvalue = max_eigenvalue.max(*e.values.last().unwrap());
        }
        let bscale = self.rhs.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        let trace_bound = if max_eigenvalue <= 0.0 { f64::INFINITY } else { value / max_eigenvalue };
        if trace_bound >= 1e6 * bscale * self.block_sizes.iter().sum::<usize>().max(1) as f64 {
            Some(FeasibilityCertificate::PsdSeparator { y: y.to_vec(), max_eigenvalue, value, trace_bound })
        } else {
            None
        }
    }

    /// Gauss–Newton refinement on the factorisation `G_b = V_b V_bᵀ`.
    ///
    /// Every iterate is PSD by construction, so success only requires the
    /// affine residual to drop below `eps`.
    fn polish(&self, p: &AffineProjector, start: &[DenseSym], eps: f64) -> Option<Vec<DenseSym>> {
        let nb = self.block_sizes.len();
        let mut vs: Vec<Vec<f64>> = Vec::with_capacity(nb);
        let global_max = start
            .iter()
            .filter_map(|g| sym_eig(g).ok().and_then(|e| e.values.last().copied()))
            .fold(1e-12f64, f64::max);
        for g in start {
            let m = g.size();
            let e = sym_eig(g).ok()?;
            let mut v = vec![0.0; m * m];
            for k in 0..m {
                let s = e.values[k].max(1e-6 * global_max).sqrt();
                for i in 0..m {
                    v[i * m + k] = e.vectors[k][i] * s;
                }
            }
            vs.push(v);
        }
        let off = self.offsets();
        let nvar: usize = self.block_sizes.iter().map(|m| m * m).sum();
        let voff: Vec<usize> = self
            .block_sizes
            .iter()
            .scan(0, |acc, &m| {
                let o = *acc;
                *acc += m * m;
                Some(o)
            })
            .collect();
        let gram = |vs: &[Vec<f64>]| -> Vec<DenseSym> {
            vs.iter()
                .zip(&self.block_sizes)
                .map(|(v, &m)| {
                    DenseSym::from_fn(m, |i, j| (0..m).map(|k| v[i * m + k] * v[j * m + k]).sum())
                })
                .collect()
        };
        let resid = |g: &[DenseSym]| -> Vec<f64> {
            let mut s = vec![0.0; off[nb]];
            self.pack(g, &mut s);
            p.q.iter()
                .zip(&p.beta)
                .map(|(ql, bl)| ql.iter().zip(&s).map(|(a, b)| a * b).sum::<f64>() - bl)
                .collect()
        };
        let norm = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut g = gram(&vs);
        let mut r = resid(&g);
        let mut rn = norm(&r);
        let rows = p.q.len();
        let mut mu = 1e-8;
        for _it in 0..200 {
            if self.affine_residual(&g) < 0.01 * eps {
                break;
            }
            // Jacobian rows: 2 Ã_l V_b, with Ã_l the symmetric matrix of q_l.
            let mut jac = vec![0.0; rows * nvar];
            for l in 0..rows {
                let ql = &p.q[l];
                for (b, &m) in self.block_sizes.iter().enumerate() {
                    let v = &vs[b];
                    let a = |i: usize, j: usize| {
                        let x = ql[Self::var_index(&off, &self.block_sizes, b, i, j)];
                        if i == j { x } else { x / SQRT2 }
                    };
                    let mut am = vec![0.0; m * m];
                    let mut any = false;
                    for i in 0..m {
                        for j in 0..m {
                            am[i * m + j] = a(i, j);
                            any |= am[i * m + j] != 0.0;
                        }
                    }
                    if !any {
                        continue;
                    }
                    for i in 0..m {
                        for k in 0..m {
                            let mut acc = 0.0;
                            for j in 0..m {
                                acc += am[i * m + j] * v[j * m + k];
                            }
                            jac[l * nvar + voff[b] + i * m + k] = 2.0 * acc;
                        }
                    }
                }
            }
            let mut jjt = vec![0.0; rows * rows];
            for a in 0..rows {
                for b in a..rows {
                    let v: f64 = jac[a * nvar..(a + 1) * nvar]
                        .iter()
                        .zip(&jac[b * nvar..(b + 1) * nvar])
                        .map(|(x, y)| x * y)
                        .sum();
                    jjt[a * rows + b] = v;
                    jjt[b * rows + a] = v;
                }
            }
            let tr: f64 = (0..rows).map(|a| jjt[a * rows + a]).sum::<f64>() / rows.max(1) as f64;
            let mut improved = false;
            for _try in 0..12 {
                let mut sys = jjt.clone();
                for a in 0..rows {
                    sys[a * rows + a] += mu * tr.max(1e-300);
                }
                let Ok(z) = cholesky_solve(&sys, rows, &r) else {
                    mu *= 10.0;
                    continue;
                };
                let mut trial = vs.clone();
                for (b, &m) in self.block_sizes.iter().enumerate() {
                    for idx in 0..m * m {
                        let mut d = 0.0;
                        for l in 0..rows {
                            d += jac[l * nvar + voff[b] + idx] * z[l];
                        }
                        trial[b][idx] -= d;
                    }
                }
                let g_t = gram(&trial);
                let r_t = resid(&g_t);
                let rn_t = norm(&r_t);
                if rn_t < rn {
                    vs = trial;
                    g = g_t;
                    r = r_t;
                    rn = rn_t;
                    mu = (mu / 4.0).max(1e-14);
                    improved = true;
                    break;
                }
                mu *= 8.0;
            }
            if !improved {
                break;
            }
        }
        if self.affine_residual(&g) < eps {
            Some(g)
        } else {
            None
        }
    }

    /// Exact correction on the face of the PSD cone spanned by the dominant
    /// eigenvectors of `start`: with `G_b = U_b S_b U_bᵀ`, the constraints
    /// are linear in `S`, and the least-norm change of `S` that satisfies
    /// them is taken. Accepted only when the result stays PSD and meets
    /// `0.01·eps`.
    fn face_refine(&self, start: &[DenseSym], eps: f64) -> Option<Vec<DenseSym>> {
        let eigs: Vec<_> = start.iter().map(sym_eig).collect::<Result<_, _>>().ok()?;
        let top = eigs
            .iter()
            .filter_map(|e| e.values.last().copied())
            .fold(0.0f64, f64::max);
        if top <= 0.0 {
            return None;
        }
        for tau in [1e-3, 1e-5, 1e-7, 1e-9] {
            // Basis U_b and its face coordinates (p ≤ q).
            let bases: Vec<Vec<Vec<f64>>> = eigs
                .iter()
                .map(|e| {
                    e.values
                        .iter()
                        .zip(&e.vectors)
                        .filter(|(v, _)| **v > tau * top)
                        .map(|(_, u)| u.clone())
                        .collect()
                })
                .collect();
            let mut coords: Vec<(usize, usize, usize)> = Vec::new();
            for (b, u) in bases.iter().enumerate() {
                for p in 0..u.len() {
                    for q in p..u.len() {
                        coords.push((b, p, q));
                    }
                }
            }
            if coords.is_empty() {
                continue;
            }
            let index: std::collections::HashMap<(usize, usize, usize), usize> =
                coords.iter().enumerate().map(|(k, c)| (*c, k)).collect();
            let k = self.constraints.len();
            let nc = coords.len();
            let mut m = vec![0.0; k * nc];
            for (row, terms) in self.constraints.iter().enumerate() {
                for t in terms {
                    let u = &bases[t.block];
                    for p in 0..u.len() {
                        for q in p..u.len() {
                            let v = if p == q {
                                u[p][t.i] * u[p][t.j]
                            } else {
                                u[p][t.i] * u[q][t.j] + u[q][t.i] * u[p][t.j]
                            };
                            m[row * nc + index[&(t.block, p, q)]] += t.coef * v;
                        }
                    }
                }
            }
            // Current face coordinates S0 = Uᵀ G U.
            let mut s0 = vec![0.0; nc];
            for (c, &(b, p, q)) in coords.iter().enumerate() {
                let (u, g) = (&bases[b], &start[b]);
                s0[c] = g.quad_form_pair(&u[p], &u[q]);
            }
            let resid: Vec<f64> = (0..k)
                .map(|row| self.rhs[row] - (0..nc).map(|c| m[row * nc + c] * s0[c]).sum::<f64>())
                .collect();
            // Least-norm solve through the pseudo-inverse of M Mᵀ.
            let mmt = DenseSym::from_fn(k, |a, b| (0..nc).map(|c| m[a * nc + c] * m[b * nc + c]).sum());
            let e = sym_eig(&mmt).ok()?;
            let cut = 1e-12 * e.values.last().copied().unwrap_or(0.0).max(1e-300);
            let mut z = vec![0.0; k];
            for (val, vec) in e.values.iter().zip(&e.vectors) {
                if *val > cut {
                    let w = vec.iter().zip(&resid).map(|(a, b)| a * b).sum::<f64>() / val;
                    for (zi, vi) in z.iter_mut().zip(vec) {
                        *zi += w * vi;
                    }
                }
            }
            let s: Vec<f64> =
                (0..nc).map(|c| s0[c] + (0..k).map(|row| m[row * nc + c] * z[row]).sum::<f64>()).collect();
            let mut out = Vec::with_capacity(start.len());
            let mut ok = true;
            for (b, u) in bases.iter().enumerate() {
                let r = u.len();
                let sb = DenseSym::from_fn(r, |p, q| s[index[&(b, p.min(q), p.max(q))]]);
                if r > 0 && sym_eig(&sb).ok().is_none_or(|e| e.values[0] < 0.0) {
                    ok = false;
                    break;
                }
                let msize = self.block_sizes[b];
                out.push(DenseSym::from_fn(msize, |i, j| {
                    let mut acc = 0.0;
                    for p in 0..r {
                        for q in 0..r {
                            acc += u[p][i] * sb.get(p, q) * u[q][j];
                        }
                    }
                    acc
                }));
            }
            if ok && self.affine_residual(&out) < 0.01 * eps {
                return Some(out);
            }
        }
        None
    }

    /// Alternating projections with Dykstra's correction between the affine
    /// subspace and the product of PSD cones, followed (when enabled) by a
    /// factorised Gauss–Newton refinement.
    pub fn solve(&self, opts: &SolveOptions) -> FeasibilityVerdict<BlockPoint> {
        let p = match self.projector() {
            Ok(p) => p,
            Err(cert) => {
                return FeasibilityVerdict {
                    status: FeasibilityStatus::Infeasible(cert),
                    iterations: 0,
                    affine_residual: f64::INFINITY,
                    cone_residual: 0.0,
                }
            }
        };
        let nv = self.num_vars();
        let mut x = vec![0.0; nv];
        let mut corr = vec![0.0; nv];
        let mut cone_res = 0.0;
        let mut best_res = f64::INFINITY;
        let mut last_polish_res = f64::INFINITY;
        for it in 1..=opts.max_iter.max(1) {
            let y = Self::project_affine(&p, &x);
            let shifted: Vec<f64> = y.iter().zip(&corr).map(|(a, b)| a + b).collect();
            let (xn, worst) = self.project_cone(&shifted);
            cone_res = worst;
            corr = shifted.iter().zip(&xn).map(|(a, b)| a - b).collect();
            x = xn;
            if it % 10 == 0 || it == opts.max_iter {
                let g = self.unpack(&x);
                let res = self.affine_residual(&g);
                best_res = best_res.min(res);
                if res < opts.eps {
                    // Tighten the point well below the tolerance when possible.
                    let (g, res) = match opts.polish.then(|| self.face_refine(&g, opts.eps)).flatten() {
                        Some(gp) => {
                            let r = self.affine_residual(&gp);
                            (gp, r)
                        }
                        None => (g, res),
                    };
                    return FeasibilityVerdict {
                        status: FeasibilityStatus::Feasible(g),
                        iterations: it,
                        affine_residual: res,
                        cone_residual: cone_res,
                    };
                }
                if it % 50 == 0 {
                    let gap: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
                    if let Some(cert) = self.separator(&p, &gap) {
                        return FeasibilityVerdict {
                            status: FeasibilityStatus::Infeasible(cert),
                            iterations: it,
                            affine_residual: res,
                            cone_residual: cone_res,
                        };
                    }
                }
                let polish_due = opts.polish
                    && res < 5e-2
                    && (it % 250 == 0 || it == opts.max_iter)
                    && res < 0.5 * last_polish_res;
                if polish_due {
                    last_polish_res = res;
                    let refined = self.face_refine(&g, opts.eps).or_else(|| {
                        self.polish(&p, &g, opts.eps)
                            .map(|gp| self.face_refine(&gp, opts.eps).unwrap_or(gp))
                    });
                    if let Some(gp) = refined {
                        let r = self.affine_residual(&gp);
                        return FeasibilityVerdict {
                            status: FeasibilityStatus::Feasible(gp),
                            iterations: it,
                            affine_residual: r,
                            cone_residual: cone_res,
                        };
                    }
                }
            }
        }
        FeasibilityVerdict {
            status: FeasibilityStatus::Inconclusive,
            iterations: opts.max_iter,
            affine_residual: best_res,
            cone_residual: cone_res,
        }
    }
}

/// Affine residual and smallest eigenvalue over the blocks of a point.
pub fn verify_block_point(problem: &BlockProblem, point: &[DenseSym]) -> (f64, f64) {
    let res = problem.affine_residual(point);
    let min_eig = point
        .iter()
        .filter(|g| g.size() > 0)
        .filter_map(|g| sym_eig(g).ok().map(|e| e.values[0]))
        .fold(f64::INFINITY, f64::min);
    (res, min_eig)
}

/// Re-derives a separator certificate from `y` alone; returns it when the
/// stated bounds hold.
pub fn verify_psd_separator(problem: &BlockProblem, y: &[f64]) -> Option<FeasibilityCertificate> {
    problem.check_separator(y)
}

/// Single-block convenience form: find a PSD `G` (size `m`) with
/// `⟨A_k, G⟩ = b_k` for every `(A_k, b_k)`.
pub fn affine_psd_feasibility(
    m: usize,
    constraints: &[(DenseSym, f64)],
    opts: &SolveOptions,
) -> FeasibilityVerdict<DenseSym> {
    let mut problem = BlockProblem::new(vec![m]);
    for (a, b) in constraints {
        let mut terms = vec![];
        for i in 0..m {
            for j in i..m {
                let c = if i == j { a.get(i, i) } else { 2.0 * a.get(i, j) };
                if c != 0.0 {
                    terms.push(ConstraintTerm { block: 0, i, j, coef: c });
                }
            }
        }
        problem.add_constraint(terms, *b);
    }
    let v = problem.solve(opts);
    FeasibilityVerdict {
        status: match v.status {
            FeasibilityStatus::Feasible(mut g) => FeasibilityStatus::Feasible(g.remove(0)),
            FeasibilityStatus::Infeasible(c) => FeasibilityStatus::Infeasible(c),
            FeasibilityStatus::Inconclusive => FeasibilityStatus::Inconclusive,
        },
        iterations: v.iterations,
        affine_residual: v.affine_residual,
        cone_residual: v.cone_residual,
    }
}
