//! Heuristic completely positive factorization.
//!
//! A dictionary of simplex points is fitted by nonnegative least squares in
//! the weighted coordinates `√multinomial(n,α)·T_α`, and the surviving atoms
//! are refined by a projected Levenberg–Marquardt iteration on
//! `T ≈ Σ_q u_q^⊗n`, `u_q ≥ 0`. Every restart draws its dictionary from an
//! independent stream of a seeded generator.

use crate::{is_nn, ConeCertificate, ConeStatus, ConeVerdict};
use combinat::{enumerate_occupations, sym_dim, OccupationVector};
use numkernel::{cholesky_solve, nnls, Matrix, NumericContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use symtensor::{monomial, SymTensor};

/// One term `weight · vector^⊗n` of a decomposition, with `vector` on the
/// probability simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpAtom {
    pub weight: f64,
    pub vector: Vec<f64>,
}

/// Budget and tolerance of [`cp_decompose`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpOptions {
    pub max_rank: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Relative weighted residual accepted as a decomposition.
    pub eps: f64,
}

impl CpOptions {
    /// Rank budget `2·sym_dim(n,d)`, restarts and seed from the context.
    pub fn for_tensor(t: &SymTensor, ctx: &NumericContext) -> Self {
        CpOptions {
            max_rank: 2 * sym_dim(t.order(), t.dim()),
            restarts: ctx.cp_restarts,
            seed: ctx.seed,
            eps: ctx.eps_cp,
        }
    }
}

/// `‖T − Σ_q w_q v_q^⊗n‖ / ‖T‖` in the weighted (Frobenius) norm, evaluated
/// from scratch.
pub fn cp_residual(t: &SymTensor, atoms: &[CpAtom]) -> f64 {
    let mut acc = t.clone();
    for atom in atoms {
        let r1 = SymTensor::from_fn(t.order(), t.dim(), |a| monomial(&atom.vector, a))
            .expect("same shape as the input");
        acc = acc.add_scaled(&r1, -atom.weight).expect("same shape");
    }
    acc.weighted_norm() / t.weighted_norm().max(f64::MIN_POSITIVE)
}

struct Fit {
    keys: Vec<OccupationVector>,
    scale: Vec<f64>,
    target: Vec<f64>,
    n: u32,
    d: usize,
}

impl Fit {
    fn new(t: &SymTensor) -> Self {
        let keys = t.keys().to_vec();
        let scale: Vec<f64> = keys.iter().map(|a| a.weight().sqrt()).collect();
        let target = t.values().iter().zip(&scale).map(|(v, s)| v * s).collect();
        Fit { keys, scale, target, n: t.order(), d: t.dim() }
    }

    fn norm(&self) -> f64 {
        self.target.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn residual(&self, u: &[Vec<f64>]) -> Vec<f64> {
        self.keys
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let model: f64 = u.iter().map(|uq| monomial(uq, a)).sum();
                self.scale[k] * model - self.target[k]
            })
            .collect()
    }

    fn cost(&self, u: &[Vec<f64>]) -> f64 {
        self.residual(u).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// NNLS over a dictionary of simplex points, returned in `u` form.
    fn dictionary_fit(&self, points: &[Vec<f64>], max_rank: usize) -> Vec<Vec<f64>> {
        let mut a = Matrix::zeros(self.keys.len(), points.len());
        for (row, key) in self.keys.iter().enumerate() {
            for (col, p) in points.iter().enumerate() {
                a.set(row, col, self.scale[row] * monomial(p, key));
            }
        }
        let sol = nnls(&a, &self.target);
        let mut chosen: Vec<(f64, usize)> =
            sol.x.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(i, w)| (*w, i)).collect();
        chosen.sort_by(|p, q| q.0.total_cmp(&p.0));
        chosen.truncate(max_rank);
        let root = 1.0 / self.n as f64;
        chosen
            .iter()
            .map(|(w, i)| points[*i].iter().map(|v| v * w.powf(root)).collect())
            .collect()
    }

    /// Projected Levenberg–Marquardt on the factors.
    fn refine(&self, mut u: Vec<Vec<f64>>, iters: usize) -> Vec<Vec<f64>> {
        let d = self.d;
        let tnorm = self.norm().max(f64::MIN_POSITIVE);
        let mut cost = self.cost(&u);
        let mut mu = 1e-3;
        for _ in 0..iters {
            if cost <= 1e-15 * tnorm || u.is_empty() {
                break;
            }
            let r = self.residual(&u);
            let nv = u.len() * d;
            // Jacobian rows: s_α · α_i · u_q^{α−e_i}.
            let mut jac = vec![0.0; self.keys.len() * nv];
            for (k, a) in self.keys.iter().enumerate() {
                for (q, uq) in u.iter().enumerate() {
                    for i in 0..d {
                        let ai = a.entries()[i];
                        if ai == 0 {
                            continue;
                        }
                        let mut m = self.scale[k] * ai as f64;
                        for (l, &al) in a.entries().iter().enumerate() {
                            let e = if l == i { al - 1 } else { al };
                            m *= uq[l].powi(e as i32);
                        }
                        jac[k * nv + q * d + i] = m;
                    }
                }
            }
            let mut h = vec![0.0; nv * nv];
            let mut g = vec![0.0; nv];
            for k in 0..self.keys.len() {
                let row = &jac[k * nv..(k + 1) * nv];
                for p in 0..nv {
                    if row[p] == 0.0 {
                        continue;
                    }
                    g[p] += row[p] * r[k];
                    for s in 0..nv {
                        h[p * nv + s] += row[p] * row[s];
                    }
                }
            }
            let mut improved = false;
            while mu < 1e14 {
                let mut hm = h.clone();
                for p in 0..nv {
                    hm[p * nv + p] += mu * (1.0 + h[p * nv + p]);
                }
                let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
                let Ok(step) = cholesky_solve(&hm, nv, &neg_g) else {
                    mu *= 10.0;
                    continue;
                };
                let trial: Vec<Vec<f64>> = u
                    .iter()
                    .enumerate()
                    .map(|(q, uq)| (0..d).map(|i| (uq[i] + step[q * d + i]).max(0.0)).collect())
                    .collect();
                let c = self.cost(&trial);
                if c < cost {
                    u = trial;
                    cost = c;
                    mu = (mu / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        u.retain(|uq| uq.iter().any(|v| *v > 0.0));
        u
    }

    fn grid(&self, budget: usize) -> Vec<Vec<f64>> {
        let mut m = 1u32;
        while sym_dim(m + 1, self.d) <= budget && m < 400 {
            m += 1;
        }
        enumerate_occupations(m, self.d)
            .iter()
            .map(|a| a.entries().iter().map(|&v| v as f64 / m as f64).collect())
            .collect()
    }
}

fn random_simplex_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

/// Combines atoms whose simplex directions differ by less than `tol`.
fn merge_close(atoms: &[CpAtom], tol: f64) -> Vec<CpAtom> {
    let mut out: Vec<CpAtom> = Vec::new();
    for a in atoms {
        let hit = out.iter_mut().find(|b| {
            b.vector.iter().zip(&a.vector).all(|(x, y)| (x - y).abs() < tol)
        });
        match hit {
            Some(b) => {
                let w = a.weight + b.weight;
                for (x, y) in b.vector.iter_mut().zip(&a.vector) {
                    *x = (*x * b.weight + y * a.weight) / w;
                }
                b.weight = w;
            }
            None => out.push(a.clone()),
        }
    }
    out
}

fn to_u(atoms: &[CpAtom], n: u32) -> Vec<Vec<f64>> {
    atoms
        .iter()
        .map(|a| {
            let s = a.weight.powf(1.0 / n as f64);
            a.vector.iter().map(|v| v * s).collect()
        })
        .collect()
}

fn to_atoms(u: &[Vec<f64>], n: u32) -> Vec<CpAtom> {
    u.iter()
        .filter_map(|uq| {
            let s: f64 = uq.iter().sum();
            (s > 0.0).then(|| CpAtom { weight: s.powi(n as i32), vector: uq.iter().map(|v| v / s).collect() })
        })
        .collect()
}

/// Searches for `T = Σ_q w_q v_q^⊗n` with `v_q ≥ 0`.
///
/// Returns `Member` with a decomposition whose relative weighted residual is
/// at most `opts.eps`, `NonMember` only when `T ∉ NN`, and `Inconclusive`
/// otherwise.
pub fn cp_decompose(t: &SymTensor, opts: &CpOptions) -> ConeVerdict {
    let nn = is_nn(t, 0.0);
    if !nn.is_member() {
        return ConeVerdict {
            cone: "CP".into(),
            seed: Some(opts.seed),
            details: "not entrywise nonnegative".into(),
            ..nn
        };
    }
    let fit = Fit::new(t);
    let member = |atoms: Vec<CpAtom>, rel: f64, restart: usize| ConeVerdict {
        cone: "CP".into(),
        level: None,
        status: ConeStatus::Member,
        certificate: Some(ConeCertificate::Decomposition { atoms, relative_residual: rel }),
        residual: Some(rel),
        seed: Some(opts.seed),
        details: format!("decomposition found in restart {restart}"),
    };
    if fit.norm() == 0.0 {
        return member(Vec::new(), 0.0, 0);
    }
    let mut best: (f64, Vec<Vec<f64>>) = (f64::INFINITY, Vec::new());
    for restart in 0..opts.restarts.max(1) {
        let mut points = Vec::new();
        if restart == 0 {
            points = fit.grid(1200);
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(restart as u64);
            for _ in 0..600 {
                points.push(random_simplex_point(&mut rng, fit.d));
            }
            let spread = 0.1 / restart as f64;
            for uq in &best.1 {
                let s: f64 = uq.iter().sum();
                for _ in 0..16 {
                    let mut p: Vec<f64> =
                        uq.iter().map(|v| (v / s + spread * (rng.random::<f64>() - 0.5)).max(0.0)).collect();
                    let ps: f64 = p.iter().sum();
                    if ps > 0.0 {
                        p.iter_mut().for_each(|v| *v /= ps);
                        points.push(p);
                    }
                }
            }
        }
        let u = fit.refine(fit.dictionary_fit(&points, opts.max_rank), 200);
        let mut atoms = to_atoms(&u, fit.n);
        let mut rel = cp_residual(t, &atoms);
        let merged = merge_close(&atoms, 1e-3);
        if merged.len() < atoms.len() {
            let mu = fit.refine(to_u(&merged, fit.n), 200);
            let matoms = to_atoms(&mu, fit.n);
            let mrel = cp_residual(t, &matoms);
            if mrel <= rel.max(1e-3 * opts.eps) {
                atoms = matoms;
                rel = mrel;
            }
        }
        let u = to_u(&atoms, fit.n);
        if rel < best.0 {
            best = (rel, u);
        }
        if rel <= opts.eps {
            return member(atoms, rel, restart);
        }
    }
    ConeVerdict {
        cone: "CP".into(),
        level: None,
        status: ConeStatus::Inconclusive,
        certificate: None,
        residual: Some(best.0),
        seed: Some(opts.seed),
        details: format!("best relative residual {:e} after {} restarts", best.0, opts.restarts),
    }
}
