//! Independent validation of the certificates carried by failing checks.
//!
//! Each certificate is re-derived from the raw input with direct
//! arithmetic, without calling the routine that produced it.

use combinat::OccupationVector;
use serde_json::Value;
use symtensor::SymTensor;

/// The input a report was produced from.
pub enum CheckedInput<'a> {
    /// `Q[X]` of a DS state.
    State(&'a SymTensor),
    /// A witness tensor `W`.
    Tensor(&'a SymTensor),
}

fn occupation(v: &Value) -> Result<OccupationVector, String> {
    let entries: Vec<u32> = serde_json::from_value(v.clone()).map_err(|e| format!("bad occupation vector: {e}"))?;
    Ok(OccupationVector::new(entries))
}

fn floats(v: &Value) -> Result<Vec<f64>, String> {
    serde_json::from_value(v.clone()).map_err(|e| format!("bad vector: {e}"))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("certificate lacks {key}"))
}

fn number(v: &Value, key: &str) -> Result<f64, String> {
    field(v, key)?.as_f64().ok_or_else(|| format!("{key} is not a number"))
}

/// `vᵀ M^(α,j) v` recomputed from the tensor entries.
fn moment_eigenvector(q: &SymTensor, cert: &Value) -> Result<(), String> {
    let alpha = occupation(field(cert, "alpha")?)?;
    let labels: Vec<OccupationVector> = field(cert, "labels")?
        .as_array()
        .ok_or("labels is not an array")?
        .iter()
        .map(occupation)
        .collect::<Result<_, _>>()?;
    let v = floats(field(cert, "eigenvector")?)?;
    let threshold = number(cert, "threshold")?;
    if v.len() != labels.len() {
        return Err("eigenvector and labels differ in length".into());
    }
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut quad = 0.0;
    for (i, li) in labels.iter().enumerate() {
        for (j, lj) in labels.iter().enumerate() {
            quad += v[i] * v[j] * q.get(&alpha.add(li).add(lj));
        }
    }
    let rayleigh = quad / (norm * norm);
    if rayleigh < -threshold {
        Ok(())
    } else {
        Err(format!("Rayleigh quotient {rayleigh:e} is not below −{threshold:e}"))
    }
}

fn negative_entry(t: &SymTensor, cert: &Value) -> Result<(), String> {
    let alpha = occupation(field(cert, "alpha")?)?;
    let value = t.get(&alpha);
    if value < 0.0 && value == number(cert, "value")? {
        Ok(())
    } else {
        Err(format!("entry {alpha} is {value}"))
    }
}

/// `yᵀA ≤ 0` and `yᵀQ > 0` for the marginal system, rebuilt here.
fn farkas_ray(q: &SymTensor, r: u32, cert: &Value) -> Result<(), String> {
    let labels: Vec<OccupationVector> = field(cert, "labels")?
        .as_array()
        .ok_or("labels is not an array")?
        .iter()
        .map(occupation)
        .collect::<Result<_, _>>()?;
    let y = floats(field(cert, "y")?)?;
    let yq: f64 = labels.iter().zip(&y).map(|(a, yi)| yi * q.get(a)).sum();
    if yq <= 0.0 {
        return Err(format!("yᵀQ = {yq:e} is not positive"));
    }
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for beta in combinat::enumerate_occupations(q.order() + r, q.dim()) {
        let col: f64 = labels
            .iter()
            .zip(&y)
            .filter_map(|(a, yi)| beta.checked_sub(a).map(|dl| yi * dl.weight()))
            .sum();
        if col > 1e-12 * scale {
            return Err(format!("column {beta} of yᵀA is {col:e}"));
        }
    }
    Ok(())
}

/// Coefficient of `p_T·(Σx)^r` at the recorded exponent, recomputed in
/// floating point.
fn polya_coefficient(t: &SymTensor, r: u32, cert: &Value) -> Result<(), String> {
    let gamma = occupation(field(cert, "exponent")?)?;
    let mut c = 0.0;
    for (alpha, v) in t.iter() {
        if let Some(dl) = gamma.checked_sub(alpha) {
            if dl.order() == r {
                c += alpha.weight() * dl.weight() * v;
            }
        }
    }
    if c < 0.0 {
        Ok(())
    } else {
        Err(format!("coefficient at {gamma} is {c:e}"))
    }
}

/// A Choi-Lam obstruction: the tensor equals `aM₃ + bM₁M₂ + cM₁³` and
/// `p*(t) < 0` at a recorded `t ∈ [2, d]`.
fn choi_lam(t: &SymTensor, cert: &Value) -> Result<(), String> {
    let (a, b, c, s) = (number(cert, "a")?, number(cert, "b")?, number(cert, "c")?, number(cert, "t")?);
    let d = t.dim();
    if !(2.0..=d as f64).contains(&s) {
        return Err(format!("t = {s} outside [2, {d}]"));
    }
    let value = a + b * s + c * s * s;
    if value >= 0.0 {
        return Err(format!("p*({s}) = {value} is not negative"));
    }
    for (alpha, v) in t.iter() {
        // aM₃ + bM₁M₂ + cM₁³ has coefficient a+b+c on x_i³, b+3c on x_i²x_j
        // and 6c on x_ix_jx_k; tensor entries divide by the multinomial.
        let coeff = match alpha.support().len() {
            1 => a + b + c,
            2 => b + 3.0 * c,
            _ => 6.0 * c,
        };
        if (coeff / alpha.weight() - v).abs() > 1e-12 {
            return Err(format!("entry {alpha} is {v}, not the Choi-Lam value"));
        }
    }
    Ok(())
}

/// A PSD separator of the moment extension system, rebuilt here in the
/// constraint order of the extension search: one equality
/// `G_(α,j)[p][s] = t_{α+l_p+l_s}` per moment block entry with `p ≤ s`,
/// then the marginal rows `Σ_β multinomial(r, β−α) t_β = Q_α / max|Q|`.
///
/// Every feasible point has trace at most `(1 + #blocks)·Σ_α |Q_α| / max|Q|`
/// (each `t_β` appears at most once on the diagonal of a block and every
/// column of the marginal system has a coefficient of at least one). With
/// `S = Σ_k y_k A_k` and `yᵀb > 0`, a feasible point `X` would satisfy
/// `yᵀb = ⟨S, X⟩ ≤ λ_max(S)·tr X`, which the check rules out.
fn moment_separator(q: &SymTensor, r: u32, cert: &Value) -> Result<(), String> {
    let kind = cert.get("kind").and_then(Value::as_str);
    if !matches!(kind, Some("psd_separator" | "inconsistent_system")) {
        return Err(format!("unexpected separator kind {kind:?}"));
    }
    let mut y = floats(field(cert, "y")?)?;
    let (n, d) = (q.order(), q.dim());
    let m = n + r;
    let cols = combinat::enumerate_occupations(m, d);
    let blocks: Vec<(OccupationVector, Vec<OccupationVector>)> = (1..=m / 2)
        .flat_map(|j| {
            let labels = combinat::enumerate_occupations(j, d);
            combinat::enumerate_occupations(m - 2 * j, d).into_iter().map(move |a| (a, labels.clone()))
        })
        .collect();
    let rows = combinat::enumerate_occupations(n, d);
    let expected: usize =
        blocks.iter().map(|(_, l)| l.len() * (l.len() + 1) / 2).sum::<usize>() + rows.len();
    if y.len() != expected {
        return Err(format!("separator has {} multipliers, the system {expected} constraints", y.len()));
    }
    let scale = q.values().iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return Err("zero tensor".into());
    }
    let first_marginal = expected - rows.len();
    let mut value: f64 = rows.iter().zip(&y[first_marginal..]).map(|(a, yk)| yk * q.get(a) / scale).sum();
    if value < 0.0 && kind == Some("inconsistent_system") {
        y.iter_mut().for_each(|v| *v = -*v);
        value = -value;
    }
    let marginal_y = &y[first_marginal..];
    if value <= 0.0 {
        return Err(format!("yᵀb = {value:e} is not positive"));
    }
    let mut scalar = vec![0.0; cols.len()];
    let mut mats = Vec::with_capacity(blocks.len());
    let mut k = 0;
    for (alpha, labels) in &blocks {
        let size = labels.len();
        let mut buf = vec![0.0; size * size];
        for p in 0..size {
            for s in p..size {
                let beta = alpha.add(&labels[p]).add(&labels[s]);
                if p == s {
                    buf[p * size + p] += y[k];
                } else {
                    buf[p * size + s] += 0.5 * y[k];
                    buf[s * size + p] += 0.5 * y[k];
                }
                scalar[beta.rank()] -= y[k];
                k += 1;
            }
        }
        mats.push(numkernel::DenseSym::from_fn(size, |i, j| buf[i * size + j]));
    }
    for (alpha, yk) in rows.iter().zip(marginal_y) {
        for (c, beta) in cols.iter().enumerate() {
            if let Some(dl) = beta.checked_sub(alpha) {
                scalar[c] += yk * dl.weight();
            }
        }
    }
    let mut lmax = scalar.iter().fold(f64::NEG_INFINITY, |s, v| s.max(*v));
    for mat in &mats {
        let e = numkernel::sym_eig(mat).map_err(|e| e.to_string())?;
        lmax = lmax.max(e.values.last().copied().unwrap_or(f64::NEG_INFINITY));
    }
    let trace_cap = (1 + blocks.len()) as f64 * q.values().iter().map(|v| v.abs()).sum::<f64>() / scale;
    if lmax <= 0.0 || value > 2.0 * lmax * trace_cap {
        Ok(())
    } else {
        Err(format!("yᵀb = {value:e} with λ_max(S) = {lmax:e} allows trace {:e} ≤ {trace_cap:e}", value / lmax))
    }
}

/// Coefficient of `x^e` in `p_W(x⊙x) / x^{2γ}`.
fn reduced_coefficient(t: &SymTensor, gamma: Option<&OccupationVector>, e: &OccupationVector) -> f64 {
    let shifted = match gamma {
        Some(g) => e.add(&g.scale(2)),
        None => e.clone(),
    };
    if shifted.entries().iter().any(|v| v % 2 == 1) {
        return 0.0;
    }
    let half = OccupationVector::new(shifted.entries().iter().map(|v| v / 2).collect());
    if half.order() != t.order() {
        return 0.0;
    }
    half.weight() * t.get(&half)
}

/// Diagonal-only and unreachable-monomial obstructions against the Gram
/// basis recorded in the verdict.
fn newton_obstruction(t: &SymTensor, verdict: &Value, cert: &Value, diagonal_only: bool) -> Result<(), String> {
    let e = occupation(field(cert, "exponent")?)?;
    let gamma = verdict.get("stripped_factor").map(occupation).transpose()?;
    let basis: Vec<OccupationVector> = field(verdict, "basis")?
        .as_array()
        .ok_or("basis is not an array")?
        .iter()
        .map(occupation)
        .collect::<Result<_, _>>()?;
    let c = reduced_coefficient(t, gamma.as_ref(), &e);
    if (c - number(cert, "coefficient")?).abs() > 1e-12 * c.abs().max(1.0) {
        return Err(format!("coefficient at {e} is {c}"));
    }
    let mut reps = 0;
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i..] {
            if a.add(b) == e {
                if a != b || !diagonal_only {
                    return Err(format!("{e} = {a} + {b} has an off-diagonal representation"));
                }
                reps += 1;
            }
        }
    }
    match (diagonal_only, reps) {
        (true, _) if c < 0.0 => Ok(()),
        (false, 0) if c != 0.0 => Ok(()),
        _ => Err(format!("obstruction at {e} does not hold (coefficient {c})")),
    }
}

/// Validates the certificate of every failing check of a report.
///
/// `level` is the hierarchy level for hierarchy and extension reports.
/// Returns the number of certificates checked.
pub fn validate_report(report: &Value, input: CheckedInput<'_>, level: Option<u32>) -> Result<usize, String> {
    let checks = report.get("checks").and_then(Value::as_array).ok_or("report has no checks")?;
    let mut validated = 0;
    for check in checks {
        if check.get("status").and_then(Value::as_str) != Some("fails") {
            continue;
        }
        let verdict = field(check, "verdict")?;
        let cert = verdict
            .get("certificate")
            .or_else(|| verdict.get("obstruction"))
            .ok_or("failing check carries no certificate")?;
        let (verdict, cert) = match cert.get("kind").and_then(Value::as_str) {
            Some("sos") => {
                let inner = field(cert, "verdict")?;
                (inner, field(inner, "obstruction")?)
            }
            _ => (verdict, cert),
        };
        let kind = cert.get("kind").and_then(Value::as_str).ok_or("certificate has no kind")?;
        match (kind, &input) {
            ("moment_eigenvector", CheckedInput::State(q)) => moment_eigenvector(q, cert)?,
            ("negative_entry", CheckedInput::State(q) | CheckedInput::Tensor(q)) => negative_entry(q, cert)?,
            ("farkas_ray", CheckedInput::State(q)) => farkas_ray(q, level.unwrap_or(0), cert)?,
            ("separator", CheckedInput::State(q)) => moment_separator(q, level.unwrap_or(0), field(cert, "certificate")?)?,
            ("precondition", CheckedInput::State(q)) => {
                let inner = field(field(cert, "verdict")?, "certificate")?;
                match inner.get("kind").and_then(Value::as_str) {
                    Some("moment_eigenvector") => moment_eigenvector(q, inner)?,
                    Some("negative_entry") => negative_entry(q, inner)?,
                    other => return Err(format!("unexpected precondition certificate {other:?}")),
                }
            }
            ("polya_coefficient", CheckedInput::Tensor(t)) => polya_coefficient(t, level.unwrap_or(0), cert)?,
            ("choi_lam", CheckedInput::Tensor(t)) => choi_lam(t, cert)?,
            ("diagonal_only", CheckedInput::Tensor(t)) => newton_obstruction(t, verdict, cert, true)?,
            ("unreachable_monomial", CheckedInput::Tensor(t)) => newton_obstruction(t, verdict, cert, false)?,
            ("pairing", CheckedInput::State(q)) => {
                let w = SymTensor::from_json_str(&field(cert, "witness")?.to_string()).map_err(|e| e.to_string())?;
                let pairing = q.euclid_inner(&w).map_err(|e| e.to_string())?;
                if pairing >= 0.0 || (pairing - number(cert, "pairing")?).abs() > 1e-12 {
                    return Err(format!("recomputed pairing {pairing}"));
                }
            }
            (other, _) => return Err(format!("no independent check for certificate kind {other}")),
        }
        validated += 1;
    }
    Ok(validated)
}
