//! Copositive witnesses in the W-parametrization, entanglement detection by
//! pairing, and the three-qutrit PPT-entangled construction.

use combinat::{enumerate_occupations, OccupationVector};
use dsmatrix::DSMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use numkernel::NumericContext;
use polynomial::{poly_from_tensor, tensor_from_poly, HomPoly, PolyError};
use serde::{Deserialize, Serialize};
use soscone::{choi_lam_copositive_minimum, choi_lam_sos_minimum, is_sos_tensor, SosObstruction};
use symtensor::{SymTensor, SymTensorJson, TensorError};

mod qutrit;

pub use qutrit::{qutrit3_objective, qutrit3_search, qutrit3_state, Qutrit3Result};

/// Errors raised by witness constructors and detection.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WitnessError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Evidence behind the flags of a witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessRecord {
    /// `p*(t) = a + bt + ct²`: its minimum over the integers `1..=d`
    /// (copositivity) and over `{1} ∪ [2, d]` (SOS).
    ChoiLam { a: f64, b: f64, c: f64, d: usize, copositive_min: (usize, f64), sos_min: (f64, f64) },
    /// Weighted AM-GM bound: `1 − μ·multinomial(n,α)·x^α ≥ 0` on the
    /// simplex iff `μ ≤ critical`.
    AmGm { alpha: OccupationVector, mu: f64, critical: f64 },
    /// Exact obstruction to `p_W(x⊙x)` being a sum of squares.
    NotSos { obstruction: SosObstruction },
    /// Copositivity from AM-GM on the cubic `x²y + xy² + z³ ≥ 3xyz` (or a
    /// lift of it) with the recorded SOS obstruction.
    AmGmNotSos { obstruction: SosObstruction },
}

/// A witness tensor with its known properties.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub name: String,
    /// W-parametrization: `p_W` is the form tested against states.
    pub tensor: SymTensor,
    pub provenance: String,
    pub copositive: Option<bool>,
    pub sos: Option<bool>,
    pub record: Option<WitnessRecord>,
}

/// Serialized witness: a SymTensor document plus metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub name: String,
    pub provenance: String,
    #[serde(flatten)]
    pub tensor: SymTensorJson,
    pub copositive: Option<bool>,
    pub sos: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record: Option<WitnessRecord>,
}

impl Witness {
    pub fn order(&self) -> u32 {
        self.tensor.order()
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn to_json(&self) -> WitnessJson {
        WitnessJson {
            name: self.name.clone(),
            provenance: self.provenance.clone(),
            tensor: self.tensor.to_json(),
            copositive: self.copositive,
            sos: self.sos,
            record: self.record.clone(),
        }
    }
}

impl WitnessJson {
    pub fn to_witness(&self) -> Result<Witness, WitnessError> {
        Ok(Witness {
            name: self.name.clone(),
            tensor: self.tensor.to_tensor()?,
            provenance: self.provenance.clone(),
            copositive: self.copositive,
            sos: self.sos,
            record: self.record.clone(),
        })
    }
}

fn ov(e: &[u32]) -> OccupationVector {
    OccupationVector::new(e.to_vec())
}

/// Exact obstruction of `p_W(x⊙x)` when one exists.
fn exact_obstruction(t: &SymTensor) -> Option<SosObstruction> {
    is_sos_tensor(t, &NumericContext::default())
        .ok()
        .and_then(|v| v.obstruction)
        .filter(|o| o.is_exact())
}

/// `x²y + xy² + z³ − 3xyz`; `p_W(x⊙x)` is the Motzkin form.
pub fn motzkin() -> Witness {
    let p = HomPoly::from_terms(
        3,
        3,
        [(ov(&[2, 1, 0]), 1.0), (ov(&[1, 2, 0]), 1.0), (ov(&[0, 0, 3]), 1.0), (ov(&[1, 1, 1]), -3.0)],
    )
    .expect("valid cubic");
    let tensor = tensor_from_poly(&p).expect("valid cubic");
    let obstruction = exact_obstruction(&tensor);
    Witness {
        name: "motzkin".into(),
        provenance: "Motzkin form in squared variables".into(),
        copositive: Some(true),
        sos: obstruction.as_ref().map(|_| false),
        record: obstruction.map(|obstruction| WitnessRecord::AmGmNotSos { obstruction }),
        tensor,
    }
}

/// `Σxᵢ³ − Σ_{i≠j} xᵢ²xⱼ + 3x₁x₂x₃`, generated as `choi_lam(3, −5/2, 1/2, 3)`.
pub fn robinson() -> Witness {
    let mut w = choi_lam(3.0, -2.5, 0.5, 3).expect("valid parameters");
    w.name = "robinson".into();
    w.provenance = "Robinson form in squared variables".into();
    w
}

/// `p*(t)` evaluated exactly.
fn pstar_exact(a: &BigRational, b: &BigRational, c: &BigRational, t: &BigRational) -> BigRational {
    a + b * t + c * t * t
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite parameter")
}

/// Copositivity and SOS flags of `aM₃ + bM₁M₂ + cM₁³` in `d` variables,
/// decided by the sign of `p*(t) = a + bt + ct²` in exact rational
/// arithmetic on the binary values of `a, b, c`: copositive iff `p*(k) ≥ 0`
/// for every integer `k ∈ [1, d]`, SOS iff `p* ≥ 0` on `{1} ∪ [2, d]`.
pub fn choi_lam_flags(a: f64, b: f64, c: f64, d: usize) -> (bool, bool) {
    let (a, b, c) = (exact(a), exact(b), exact(c));
    let int = |k: usize| BigRational::from_integer(BigInt::from(k));
    let copositive = (1..=d).all(|k| !pstar_exact(&a, &b, &c, &int(k)).is_negative());
    let mut points = vec![int(1)];
    if d >= 2 {
        points.extend([int(2), int(d)]);
    }
    let mut sos = points.iter().all(|t| !pstar_exact(&a, &b, &c, t).is_negative());
    if d > 2 && c.is_positive() {
        let vertex = -&b / (int(2) * &c);
        if vertex > int(2) && vertex < int(d) {
            sos &= !pstar_exact(&a, &b, &c, &vertex).is_negative();
        }
    }
    (copositive, sos)
}

/// The form `aM₃ + bM₁M₂ + cM₁³` with `M_k = Σ_{i ≤ d} x_i^k`.
pub fn choi_lam(a: f64, b: f64, c: f64, d: usize) -> Result<Witness, WitnessError> {
    if d < 2 {
        return Err(WitnessError::Domain(format!("d = {d} < 2")));
    }
    let power_sum = |k: u32| {
        HomPoly::from_terms(d, k, (0..d).map(|i| (OccupationVector::unit(d, i, k), 1.0)))
    };
    let m1 = power_sum(1)?;
    let m2 = power_sum(2)?;
    let m3 = power_sum(3)?;
    let p = m3
        .scale(a)
        .add_scaled(&m1.multiply(&m2)?, b)?
        .add_scaled(&m1.multiply(&m1)?.multiply(&m1)?, c)?;
    let (copositive, sos) = choi_lam_flags(a, b, c, d);
    Ok(Witness {
        name: format!("choi_lam({a},{b},{c},{d})"),
        tensor: tensor_from_poly(&p)?,
        provenance: "Choi-Lam symmetric cubic family".into(),
        copositive: Some(copositive),
        sos: Some(sos),
        record: Some(WitnessRecord::ChoiLam {
            a,
            b,
            c,
            d,
            copositive_min: choi_lam_copositive_minimum(a, b, c, d),
            sos_min: choi_lam_sos_minimum(a, b, c, d),
        }),
    })
}

/// `1 / (multinomial(n,α)·∏(α_i/n)^{α_i})`, the largest `μ` for which the
/// projective witness is copositive.
pub fn critical_mu(alpha: &OccupationVector) -> f64 {
    let n = alpha.order() as f64;
    let prod: f64 = alpha
        .entries()
        .iter()
        .filter(|&&a| a > 0)
        .map(|&a| (a as f64 / n).powi(a as i32))
        .product();
    1.0 / (alpha.weight() * prod)
}

/// `W = 1 − μ·e_α`: the W tensor of `Π − μ|D_α⟩⟨D_α|`.
pub fn projective_witness(alpha: &OccupationVector, mu: f64) -> Result<Witness, WitnessError> {
    if !mu.is_finite() {
        return Err(WitnessError::Domain("μ must be finite".into()));
    }
    let tensor = SymTensor::from_fn(alpha.order(), alpha.dim(), |b| if b == alpha { 1.0 - mu } else { 1.0 })?;
    let critical = critical_mu(alpha);
    Ok(Witness {
        name: format!("projective({alpha},{mu})"),
        tensor,
        provenance: "projector onto the symmetric subspace minus a Dicke projector".into(),
        copositive: Some(mu <= critical),
        sos: None,
        record: Some(WitnessRecord::AmGm { alpha: alpha.clone(), mu, critical }),
    })
}

/// The order-`(n+1)` witness `x_var·p_W` (`var` is 1-based). Copositivity
/// is preserved; a recorded non-SOS flag is re-certified on the lift.
pub fn lift_witness(w: &Witness, var: usize) -> Result<Witness, WitnessError> {
    let d = w.dim();
    if var == 0 || var > d {
        return Err(WitnessError::Domain(format!("variable {var} outside 1..={d}")));
    }
    let x = HomPoly::from_terms(d, 1, [(OccupationVector::unit(d, var - 1, 1), 1.0)])?;
    let tensor = tensor_from_poly(&poly_from_tensor(&w.tensor)?.multiply(&x)?)?;
    let (sos, record) = if w.sos == Some(false) {
        match exact_obstruction(&tensor) {
            Some(obstruction) => (Some(false), Some(WitnessRecord::NotSos { obstruction })),
            None => (None, None),
        }
    } else {
        (None, None)
    };
    Ok(Witness {
        name: format!("lift({},{var})", w.name),
        tensor,
        provenance: format!("x{var} times {}", w.name),
        copositive: w.copositive,
        sos,
        record,
    })
}

/// The shipped witnesses.
pub fn library() -> Vec<Witness> {
    let m = motzkin();
    let lifted = lift_witness(&m, 1).expect("valid variable");
    let cl4 = choi_lam(3.0, -2.5, 0.5, 4).expect("valid parameters");
    let mut out = vec![m, robinson(), cl4, lifted];
    for alpha in [ov(&[1, 1]), ov(&[2, 2]), ov(&[1, 1, 1])] {
        out.push(projective_witness(&alpha, critical_mu(&alpha)).expect("finite μ"));
    }
    out
}

/// Looks up a shipped witness by name.
pub fn by_name(name: &str) -> Option<Witness> {
    library().into_iter().find(|w| w.name == name)
}

/// Result of pairing a state with a witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub witness: String,
    pub pairing: f64,
    /// `pairing < −ε`: the state is certified entangled.
    pub entangled: bool,
}

/// `⟨Q[X], W⟩`; a value below `−ctx.eps_witness` certifies entanglement.
pub fn detect(x: &DSMatrix, w: &Witness, ctx: &NumericContext) -> Result<Detection, WitnessError> {
    if w.copositive != Some(true) {
        return Err(WitnessError::Usage(format!("{} is not known to be copositive", w.name)));
    }
    if x.order() != w.order() || x.dim() != w.dim() {
        return Err(WitnessError::Usage(format!(
            "state has (n,d) = ({},{}), witness ({},{})",
            x.order(),
            x.dim(),
            w.order(),
            w.dim()
        )));
    }
    let pairing = x.q_view().euclid_inner(&w.tensor)?;
    Ok(Detection { witness: w.name.clone(), pairing, entangled: pairing < -ctx.eps_witness })
}

/// Exact check that a recorded Choi-Lam witness has the expected values at
/// the integer points, used to flag corrupted data.
pub fn verify_record(w: &Witness) -> Result<(), String> {
    match &w.record {
        Some(WitnessRecord::ChoiLam { a, b, c, d, .. }) => {
            let expected = choi_lam(*a, *b, *c, *d).map_err(|e| e.to_string())?;
            let diff = expected
                .tensor
                .add_scaled(&w.tensor, -1.0)
                .map_err(|e| e.to_string())?
                .values()
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            if diff > 1e-12 {
                return Err(format!("{}: tensor differs from its parameters by {diff:e}", w.name));
            }
            if (Some(expected.copositive), Some(expected.sos)) != (Some(w.copositive), Some(w.sos)) {
                return Err(format!("{}: flags disagree with the p* criterion", w.name));
            }
            Ok(())
        }
        Some(WitnessRecord::AmGm { alpha, mu, critical }) => {
            if (critical_mu(alpha) - critical).abs() > 1e-12 * critical.abs().max(1.0) {
                return Err(format!("{}: critical μ mismatch", w.name));
            }
            if w.copositive != Some(mu <= critical) {
                return Err(format!("{}: copositive flag disagrees with μ ≤ μ*", w.name));
            }
            let expected = projective_witness(alpha, *mu).map_err(|e| e.to_string())?;
            if expected.tensor != w.tensor {
                return Err(format!("{}: tensor differs from 1 − μ·e_α", w.name));
            }
            Ok(())
        }
        Some(WitnessRecord::NotSos { obstruction } | WitnessRecord::AmGmNotSos { obstruction }) => {
            match exact_obstruction(&w.tensor) {
                Some(o) if &o == obstruction => Ok(()),
                _ => Err(format!("{}: recorded obstruction does not reproduce", w.name)),
            }
        }
        None => Ok(()),
    }
}

/// Entries of a tensor keyed by the sorted shape of their occupation
/// vector; `None` when two entries of the same shape differ.
pub fn shape_values(t: &SymTensor) -> Option<Vec<(OccupationVector, f64)>> {
    let mut out: Vec<(OccupationVector, f64)> = Vec::new();
    for a in enumerate_occupations(t.order(), t.dim()) {
        let mut e = a.entries().to_vec();
        e.sort_unstable_by(|x, y| y.cmp(x));
        let shape = OccupationVector::new(e);
        let v = t.get(&a);
        match out.iter().find(|(s, _)| *s == shape) {
            Some((_, prev)) if (prev - v).abs() > 1e-15 => return None,
            Some(_) => {}
            None => out.push((shape, v)),
        }
    }
    Some(out)
}
