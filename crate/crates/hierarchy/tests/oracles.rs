//! Hierarchy verdicts on instances with known answers, checked by
//! independent oracles.

use combinat::{enumerate_occupations, OccupationVector};
use dsmatrix::DSMatrix;
use hierarchy::{
    check_nn_ext_farkas, ds_extendibility, ext_witness_check, extension_state, mom_ext_feasible,
    rsos_member, HierarchyCertificate,
};
use numkernel::NumericContext;
use polynomial::{poly_from_tensor, tensor_from_poly, HomPoly};
use soscone::gram_reexpansion_error;
use symtensor::SymTensor;

fn ov(e: &[u32]) -> OccupationVector {
    OccupationVector::new(e.to_vec())
}

/// `x²y + y²x + z³ − 3xyz`, whose square substitution is the Motzkin form.
fn motzkin_tensor() -> SymTensor {
    let p = HomPoly::from_terms(
        3,
        3,
        [(ov(&[2, 1, 0]), 1.0), (ov(&[1, 2, 0]), 1.0), (ov(&[0, 0, 3]), 1.0), (ov(&[1, 1, 1]), -3.0)],
    )
    .unwrap();
    tensor_from_poly(&p).unwrap()
}

/// `Σ_k w_k v_k^⊗n` with `v_k` on the simplex and `Σ w_k = 1`.
fn planted_separable(n: u32, d: usize, atoms: &[(f64, Vec<f64>)]) -> DSMatrix {
    let total: f64 = atoms.iter().map(|a| a.0).sum();
    let mut q = SymTensor::zeros(n, d).unwrap();
    for (w, v) in atoms {
        let s: f64 = v.iter().sum();
        let u: Vec<f64> = v.iter().map(|x| x / s).collect();
        q = q.add_scaled(&SymTensor::rank_one(&u, n).unwrap(), w / total).unwrap();
    }
    DSMatrix::lambda_from_q(&q)
}

fn round_trip_error(x: &DSMatrix, ext: &DSMatrix, r: u32) -> f64 {
    let big = ext.to_dense().unwrap().partial_trace_last(r);
    big.max_abs_diff(&x.to_dense().unwrap())
}

#[test]
fn motzkin_separates_reznick_levels() {
    let ctx = NumericContext::default();
    let t = motzkin_tensor();
    assert!(rsos_member(&t, 0, &ctx).unwrap().is_non_member());
    let v = rsos_member(&t, 1, &ctx).unwrap();
    assert!(v.is_member(), "{}", v.details);
    let Some(HierarchyCertificate::Sos { verdict }) = &v.certificate else { panic!("no certificate") };
    let p = poly_from_tensor(&t)
        .unwrap()
        .substitute_squares()
        .multiply(&polynomial::norm_square_power(3, 1).unwrap())
        .unwrap();
    assert!(gram_reexpansion_error(&p, &verdict.gram) < 1e-7);
}

#[test]
fn dicke_one_one_is_not_extendible() {
    let ctx = NumericContext::default();
    let x = DSMatrix::pure_dicke(&ov(&[1, 1])).unwrap();
    for ppt in [false, true] {
        let v = ds_extendibility(&x, 1, ppt, &ctx).unwrap();
        assert!(v.is_non_member(), "ppt = {ppt}: {}", v.details);
    }
    let v = ds_extendibility(&x, 1, false, &ctx).unwrap();
    let Some(HierarchyCertificate::FarkasRay { y, .. }) = &v.certificate else { panic!("no ray") };
    assert!(check_nn_ext_farkas(&x.q_view(), 1, y, 1e-9));
}

#[test]
fn hand_lp_constraints_force_zero() {
    // From α = (2,0): t₃₀ + t₂₁ = 0; from α = (0,2): t₁₂ + t₀₃ = 0; so
    // the α = (1,1) row t₂₁ + t₁₂ = 1/2 cannot hold.
    let (rows, cols, a) = hierarchy::nn_ext_system(2, 2, 1);
    assert_eq!(rows, vec![ov(&[0, 2]), ov(&[1, 1]), ov(&[2, 0])]);
    assert_eq!(cols, vec![ov(&[0, 3]), ov(&[1, 2]), ov(&[2, 1]), ov(&[3, 0])]);
    assert_eq!(a, vec![vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0, 1.0]]);
}

#[test]
fn maximally_mixed_state_extends() {
    let ctx = NumericContext::default();
    for (n, d) in [(2, 2), (2, 3), (3, 2)] {
        let dim = enumerate_occupations(n, d).len() as f64;
        let x = DSMatrix::from_lambda(SymTensor::from_fn(n, d, |_| 1.0 / dim).unwrap());
        let v = ds_extendibility(&x, 1, false, &ctx).unwrap();
        assert!(v.is_member(), "({n},{d}): {}", v.details);
        let ext = extension_state(&v).unwrap();
        assert!(round_trip_error(&x, &ext, 1) < 1e-8);
    }
}

#[test]
fn separable_states_extend_with_exact_marginals() {
    let ctx = NumericContext::default();
    let atoms = [(0.5, vec![1.0, 2.0, 0.5]), (0.3, vec![0.1, 0.0, 1.0]), (0.2, vec![1.0, 1.0, 1.0])];
    for (n, d) in [(2u32, 3usize), (3, 2)] {
        let trimmed: Vec<(f64, Vec<f64>)> = atoms.iter().map(|(w, v)| (*w, v[..d].to_vec())).collect();
        let x = planted_separable(n, d, &trimmed);
        for r in 1..=3 {
            let v = ds_extendibility(&x, r, false, &ctx).unwrap();
            assert!(v.is_member(), "({n},{d},{r}): {}", v.details);
            assert!(round_trip_error(&x, &extension_state(&v).unwrap(), r) < 1e-8);
        }
        for r in 1..=2 {
            let v = mom_ext_feasible(&x.q_view(), r, &ctx).unwrap();
            assert!(v.is_member(), "moment ({n},{d},{r}): {}", v.details);
        }
    }
}

#[test]
fn witness_checks_split_polya_and_reznick() {
    let ctx = NumericContext::default();
    let ones = DSMatrix::from_w(&SymTensor::from_fn(3, 3, |_| 1.0).unwrap());
    for r in 0..=3 {
        assert!(ext_witness_check(&ones, r, false, &ctx).unwrap().is_member());
    }
    let motzkin = DSMatrix::from_w(&motzkin_tensor());
    assert!(ext_witness_check(&motzkin, 0, true, &ctx).unwrap().is_non_member());
    assert!(ext_witness_check(&motzkin, 1, true, &ctx).unwrap().is_member());
    let diff = DSMatrix::from_w(&SymTensor::from_dense(2, 2, &[1.0, -1.0, -1.0, 1.0]).unwrap());
    assert!(ext_witness_check(&diff, 0, true, &ctx).unwrap().is_member());
    for r in 0..=4 {
        assert!(ext_witness_check(&diff, r, false, &ctx).unwrap().is_non_member());
    }
}
